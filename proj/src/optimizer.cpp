#include "bdbc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdbc {

namespace {

double spectral_norm_hermitian(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix psd_part(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  CMatrix out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

double weighted_sum_rate_nats(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                              const WeightVector& w) {
  return weighted_sum_rate(ch, q, w) * kLn2;
}

}  // namespace

KktCertificate kkt_residual(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                            const WeightVector& w) {
  const Eigen::Index nr = ch.relay_antennas();
  const CMatrix g = rate_gradient(ch, q, w);

  KktCertificate cert;
  const bool trace_active = q.trace() >= ch.power - 1e-8;
  if (trace_active) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(q.matrix());
    const double lam_max = eig.eigenvalues().maxCoeff();
    const double rank_tol = 1e-9 * std::max(lam_max, 1.0);
    std::vector<Eigen::Index> range_cols;
    for (Eigen::Index i = 0; i < nr; ++i)
      if (eig.eigenvalues()[i] > rank_tol) range_cols.push_back(i);
    if (!range_cols.empty()) {
      CMatrix vr(nr, Eigen::Index(range_cols.size()));
      for (std::size_t j = 0; j < range_cols.size(); ++j)
        vr.col(Eigen::Index(j)) = eig.eigenvectors().col(range_cols[j]);
      CMatrix restricted = vr.adjoint() * g * vr;
      restricted = 0.5 * (restricted + restricted.adjoint());
      Eigen::SelfAdjointEigenSolver<CMatrix> eig_r(restricted, Eigen::EigenvaluesOnly);
      cert.mu = std::max(0.0, eig_r.eigenvalues().maxCoeff());
    }
  }

  const CMatrix shifted = cert.mu * CMatrix::Identity(nr, nr) - g;
  cert.psi = psd_part(shifted);
  cert.stationarity_residual =
      spectral_norm_hermitian(cert.mu * CMatrix::Identity(nr, nr) - cert.psi - g);
  cert.comp_slack_trace = std::abs(cert.mu * (ch.power - q.trace()));
  cert.comp_slack_cone = std::abs((q.matrix() * cert.psi).trace().real());
  return cert;
}

SolveResult maximize_weighted_sum(const BidirectionalChannel& ch, const WeightVector& w,
                                  const SolverConfig& cfg) {
  if (cfg.max_iters < 1 || cfg.grad_tol <= 0.0 || cfg.step_init <= 0.0 ||
      cfg.backtrack_ratio <= 0.0 || cfg.backtrack_ratio >= 1.0 || cfg.armijo_c <= 0.0)
    throw std::invalid_argument("invalid solver configuration");

  const Eigen::Index nr = ch.relay_antennas();
  SolveResult res;
  res.q = CovarianceMatrix::Isotropic(nr, ch.power);
  double f = weighted_sum_rate_nats(ch, res.q, w);
  res.objective_trace.push_back(f / kLn2);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const CMatrix g = rate_gradient(ch, res.q, w);

    const CovarianceMatrix mapped =
        project_feasible(res.q.matrix() + cfg.step_init * g, ch.power);
    const double mapping_norm =
        (res.q.matrix() - mapped.matrix()).norm() / cfg.step_init;
    if (mapping_norm <= cfg.grad_tol) {
      res.converged = true;
      res.iterations = it;
      break;
    }

    double step = cfg.step_init;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      const CovarianceMatrix cand =
          (bt == 0) ? mapped : project_feasible(res.q.matrix() + step * g, ch.power);
      const CMatrix delta = cand.matrix() - res.q.matrix();
      const double predicted = (g * delta).trace().real();
      if (predicted <= 0.0 || delta.norm() == 0.0) break;
      const double f_cand = weighted_sum_rate_nats(ch, cand, w);
      if (f_cand >= f + cfg.armijo_c * predicted) {
        res.q = cand;
        f = f_cand;
        accepted = true;
        break;
      }
      step *= cfg.backtrack_ratio;
    }
    res.iterations = it + 1;
    if (!accepted) break;  // no ascent step found; mapping check decides status
    res.objective_trace.push_back(f / kLn2);
  }

  if (!res.converged && res.iterations >= 1) {
    // Re-check the mapping at the final iterate (loop may exit by iteration cap).
    const CMatrix g = rate_gradient(ch, res.q, w);
    const CovarianceMatrix mapped =
        project_feasible(res.q.matrix() + cfg.step_init * g, ch.power);
    res.converged =
        (res.q.matrix() - mapped.matrix()).norm() / cfg.step_init <= cfg.grad_tol;
  }

  res.rates = rate_pair(ch, res.q);
  res.certificate = kkt_residual(ch, res.q, w);
  res.certified = res.converged && res.certificate.within_tolerance();
  return res;
}

WaterfillResult waterfill_single_user(const BidirectionalChannel& ch, int node) {
  const CMatrix& h = ch.channel(node);
  const Eigen::Index nr = ch.relay_antennas();
  const double sigma2 = ch.noise_variance;

  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  const Eigen::Index n_sv = svd.singularValues().size();
  Eigen::VectorXd gains = Eigen::VectorXd::Zero(nr);
  for (Eigen::Index i = 0; i < n_sv; ++i) {
    const double s = svd.singularValues()[i];
    gains[i] = s * s / sigma2;
  }

  WaterfillResult out;
  const double gain_floor = 1e-15 * std::max(gains.maxCoeff(), 1.0);
  Eigen::Index positive = 0;
  while (positive < nr && gains[positive] > gain_floor) ++positive;

  if (positive == 0) {
    out.q_opt = CovarianceMatrix::Isotropic(nr, ch.power);
    out.capacity = 0.0;
    out.water_level = 0.0;
    out.active_modes = 0;
    return out;
  }

  // Singular values arrive sorted descending, so gains are too.
  Eigen::Index active = positive;
  double level = 0.0;
  while (active > 0) {
    double inv_sum = 0.0;
    for (Eigen::Index i = 0; i < active; ++i) inv_sum += 1.0 / gains[i];
    level = (ch.power + inv_sum) / double(active);
    if (level > 1.0 / gains[active - 1]) break;
    --active;
  }

  Eigen::VectorXd alloc = Eigen::VectorXd::Zero(nr);
  double capacity = 0.0;
  for (Eigen::Index i = 0; i < active; ++i) {
    alloc[i] = level - 1.0 / gains[i];
    capacity += std::log2(1.0 + gains[i] * alloc[i]);
  }

  CMatrix q = svd.matrixV() * alloc.asDiagonal() * svd.matrixV().adjoint();
  out.q_opt = CovarianceMatrix(0.5 * (q + q.adjoint()));
  out.capacity = capacity;
  out.water_level = level;
  out.active_modes = int(active);
  return out;
}

namespace {

SolveResult endpoint_solution(const BidirectionalChannel& ch, int node) {
  const WeightVector w = (node == 1) ? WeightVector(1.0, 0.0) : WeightVector(0.0, 1.0);
  SolveResult res;
  res.q = waterfill_single_user(ch, node).q_opt;
  res.rates = rate_pair(ch, res.q);
  res.certificate = kkt_residual(ch, res.q, w);
  res.converged = true;
  res.certified = res.certificate.within_tolerance();
  return res;
}

MaxminResult from_solve(const SolveResult& s, double w1, bool converged) {
  MaxminResult m;
  m.q = s.q;
  m.rates = s.rates;
  m.certificate = s.certificate;
  m.weight_to_node1 = w1;
  m.converged = converged;
  return m;
}

}  // namespace

MaxminResult maxmin_rate(const BidirectionalChannel& ch, const SolverConfig& cfg) {
  // Endpoint A maximizes r1; if r2 >= r1 there, min{r1,r2} = max r1 already.
  const SolveResult at_a = endpoint_solution(ch, 1);
  if (at_a.rates.r2 >= at_a.rates.r1) return from_solve(at_a, 1.0, true);
  const SolveResult at_b = endpoint_solution(ch, 2);
  if (at_b.rates.r1 >= at_b.rates.r2) return from_solve(at_b, 0.0, true);

  // r1 - r2 is nondecreasing in the node-1 weight along the boundary:
  // negative at B, positive at A. Bisect on the weight.
  double lo = 0.0, hi = 1.0;
  SolveResult best = at_b;
  double best_w = 0.0;
  double best_gap = std::abs(at_b.rates.r1 - at_b.rates.r2);
  for (int it = 0; it < kMaxminMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const SolveResult s = maximize_weighted_sum(ch, WeightVector(mid, 1.0 - mid), cfg);
    const double diff = s.rates.r1 - s.rates.r2;
    if (std::abs(diff) < best_gap) {
      best = s;
      best_w = mid;
      best_gap = std::abs(diff);
    }
    if (best_gap <= kMaxminRateTol) return from_solve(best, best_w, true);
    if (diff < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return from_solve(best, best_w, false);  // flagged approximate
}

}  // namespace bdbc
