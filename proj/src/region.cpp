#include "bdbc/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bdbc/threading.hpp"

namespace bdbc {

namespace {

BoundaryPoint solve_at(const BidirectionalChannel& ch, double w1, const SolverConfig& cfg) {
  BoundaryPoint pt;
  pt.weight = WeightVector(w1, 1.0 - w1);
  if (w1 == 1.0 || w1 == 0.0) {
    // Exact endpoints from water-filling.
    const int node = (w1 == 1.0) ? 1 : 2;
    pt.q_opt = waterfill_single_user(ch, node).q_opt;
    pt.rates = rate_pair(ch, pt.q_opt);
    pt.certificate = kkt_residual(ch, pt.q_opt, pt.weight);
    pt.certified = pt.certificate.within_tolerance();
  } else {
    const SolveResult s = maximize_weighted_sum(ch, pt.weight, cfg);
    pt.q_opt = s.q;
    pt.rates = s.rates;
    pt.certificate = s.certificate;
    pt.certified = s.certified;
  }
  return pt;
}

CapacityBoundary assemble(const BidirectionalChannel& ch, std::vector<BoundaryPoint> points,
                          const SolverConfig& cfg) {
  CapacityBoundary b;
  b.points = std::move(points);
  b.endpoint_b = b.points.front();
  b.endpoint_a = b.points.back();
  for (const BoundaryPoint& pt : b.points) {
    if (!pt.certified) {
      b.partial = true;
      b.failed_weights.push_back(pt.weight.w1());
    }
  }
  const MaxminResult mm = maxmin_rate(ch, cfg);
  b.maxmin_point = mm.rates;
  b.maxmin_converged = mm.converged;
  return b;
}

std::vector<double> weight_grid(int n_weights) {
  if (n_weights < 2) throw std::invalid_argument("sweep needs at least 2 weights");
  std::vector<double> grid(static_cast<std::size_t>(n_weights));
  for (int i = 0; i < n_weights; ++i) grid[std::size_t(i)] = double(i) / double(n_weights - 1);
  grid.front() = 0.0;
  grid.back() = 1.0;
  return grid;
}

}  // namespace

CapacityBoundary sweep_boundary(const BidirectionalChannel& ch, int n_weights,
                                const SolverConfig& cfg) {
  const std::vector<double> grid = weight_grid(n_weights);
  std::vector<BoundaryPoint> points(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (int i = 0; i < n_weights; ++i)
    points[std::size_t(i)] = solve_at(ch, grid[std::size_t(i)], cfg);
  return assemble(ch, std::move(points), cfg);
}

CapacityBoundary sweep_boundary_serial(const BidirectionalChannel& ch, int n_weights,
                                       const SolverConfig& cfg) {
  const std::vector<double> grid = weight_grid(n_weights);
  std::vector<BoundaryPoint> points(grid.size());
  for (int i = 0; i < n_weights; ++i)
    points[std::size_t(i)] = solve_at(ch, grid[std::size_t(i)], cfg);
  return assemble(ch, std::move(points), cfg);
}

bool contains(const CapacityBoundary& boundary, const RatePair& r, double tol) {
  if (!(r.r1 >= 0.0 && r.r2 >= 0.0)) return false;
  for (const BoundaryPoint& pt : boundary.points) {
    const double supported = pt.weight.w1() * pt.rates.r1 + pt.weight.w2() * pt.rates.r2;
    const double tested = pt.weight.w1() * r.r1 + pt.weight.w2() * r.r2;
    if (tested > supported + tol) return false;
  }
  return true;
}

RatePair xor_comparison_point(const BidirectionalChannel& ch, const SolverConfig& cfg) {
  const MaxminResult mm = maxmin_rate(ch, cfg);
  const double equal_rate = std::min(mm.rates.r1, mm.rates.r2);
  return RatePair{equal_rate, equal_rate};
}

}  // namespace bdbc
