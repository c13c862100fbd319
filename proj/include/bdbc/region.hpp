#pragma once

#include <vector>

#include "bdbc/optimizer.hpp"

// Boundary tracing for the capacity region: a sweep of weighted-sum-rate
// maximizers over a uniform weight grid, the downward-hull membership test,
// and the equal-rate comparison point. The sweep is data-parallel across
// weights; a serial twin is kept as the reference implementation.

namespace bdbc {

struct BoundaryPoint {
  WeightVector weight{0.5, 0.5};
  CovarianceMatrix q_opt;
  RatePair rates;
  KktCertificate certificate;
  bool certified = false;
};

struct CapacityBoundary {
  std::vector<BoundaryPoint> points;  // ascending weight toward node 1
  BoundaryPoint endpoint_a;           // w = (1,0), maximizes r1
  BoundaryPoint endpoint_b;           // w = (0,1), maximizes r2
  RatePair maxmin_point;
  bool maxmin_converged = false;
  bool partial = false;                // some solve failed certification
  std::vector<double> failed_weights;  // node-1 weights of non-certified solves
};

/// Solves the weighted-sum problem on a uniform n_weights grid over the
/// node-1 weight in [0,1]; the two endpoint weights use the closed-form
/// water-filling solutions. OpenMP-parallel across weights, merged in
/// weight order. Worker count is capped by the BDBC_THREADS env var.
CapacityBoundary sweep_boundary(const BidirectionalChannel& ch, int n_weights,
                                const SolverConfig& cfg = {});

/// Serial reference for sweep_boundary; identical output.
CapacityBoundary sweep_boundary_serial(const BidirectionalChannel& ch, int n_weights,
                                       const SolverConfig& cfg = {});

/// Supporting-hyperplane membership: r is inside iff r >= 0 and
/// w . r <= w . rates(w) + tol for every swept weight. Outer-approximate
/// up to the weight-grid resolution.
bool contains(const CapacityBoundary& boundary, const RatePair& r, double tol);

/// The equal-rate pair (r*, r*) with r* = max min{R1(Q), R2(Q)}, the one
/// operating point where XOR-based relaying matches the boundary.
RatePair xor_comparison_point(const BidirectionalChannel& ch, const SolverConfig& cfg = {});

}  // namespace bdbc
