#include "bdbc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bdbc {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace

BidirectionalChannel::BidirectionalChannel(CMatrix h1_in, CMatrix h2_in, double sigma2,
                                           double p)
    : h1(std::move(h1_in)), h2(std::move(h2_in)), noise_variance(sigma2), power(p) {
  require(h1.rows() >= 1 && h1.cols() >= 1, "channel h1 must be at least 1x1");
  require(h2.rows() >= 1 && h2.cols() >= 1, "channel h2 must be at least 1x1");
  require(h1.cols() == h2.cols(), "h1 and h2 must have the same number of columns");
  require(all_finite(h1), "channel h1 has non-finite entries");
  require(all_finite(h2), "channel h2 has non-finite entries");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "noise_variance must be > 0");
  require(std::isfinite(p) && p > 0.0, "power must be > 0");
}

const CMatrix& BidirectionalChannel::channel(int node) const {
  if (node == 1) return h1;
  if (node == 2) return h2;
  throw std::invalid_argument("node must be 1 or 2");
}

CovarianceMatrix::CovarianceMatrix(const CMatrix& q) {
  if (q.rows() != q.cols() || q.rows() < 1)
    throw std::invalid_argument("covariance must be square and non-empty");
  if (!q.allFinite()) throw std::invalid_argument("covariance has non-finite entries");

  const double herm_defect = (q - q.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > kHermitianTol)
    throw std::invalid_argument("covariance is not Hermitian within tolerance");

  q_ = 0.5 * (q + q.adjoint());

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(q_);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol)
    throw std::invalid_argument("covariance is not positive semidefinite within tolerance");
  if (min_eig < 0.0) {
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    q_ = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
    q_ = 0.5 * (q_ + q_.adjoint());
  }
}

CovarianceMatrix CovarianceMatrix::Zero(Eigen::Index n) {
  return CovarianceMatrix(CMatrix::Zero(n, n), Trusted{});
}

CovarianceMatrix CovarianceMatrix::Isotropic(Eigen::Index n, double total_power) {
  return CovarianceMatrix(CMatrix::Identity(n, n) * (total_power / double(n)), Trusted{});
}

WeightVector::WeightVector(double toward_node1, double toward_node2) {
  if (!(std::isfinite(toward_node1) && std::isfinite(toward_node2)))
    throw std::invalid_argument("weights must be finite");
  if (toward_node1 < 0.0 || toward_node2 < 0.0)
    throw std::invalid_argument("weights must be nonnegative");
  const double sum = toward_node1 + toward_node2;
  if (sum <= 0.0) throw std::invalid_argument("weight vector must be nonzero");
  w1_ = toward_node1 / sum;
  w2_ = toward_node2 / sum;
}

double logdet_hpd(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("logdet_hpd: matrix must be square");
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("logdet_hpd: matrix is not positive definite");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = llt.matrixLLT()(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::domain_error("logdet_hpd: matrix is not positive definite");
    acc += std::log(d);
  }
  return 2.0 * acc;
}

namespace {

double rate_bits(const CMatrix& h, const CMatrix& q, double sigma2) {
  const Eigen::Index nk = h.rows();
  CMatrix arg = CMatrix::Identity(nk, nk) + (h * q * h.adjoint()) / sigma2;
  arg = 0.5 * (arg + arg.adjoint());
  const double nats = logdet_hpd(arg);
  return std::max(nats / kLn2, 0.0);
}

}  // namespace

RatePair rate_pair(const BidirectionalChannel& ch, const CovarianceMatrix& q) {
  if (q.dim() != ch.relay_antennas())
    throw std::invalid_argument("covariance dimension does not match relay antennas");
  RatePair r;
  r.r1 = rate_bits(ch.h1, q.matrix(), ch.noise_variance);
  r.r2 = rate_bits(ch.h2, q.matrix(), ch.noise_variance);
  return r;
}

double weighted_sum_rate(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                         const WeightVector& w) {
  const RatePair r = rate_pair(ch, q);
  return w.w1() * r.r1 + w.w2() * r.r2;
}

CMatrix rate_gradient(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                      const WeightVector& w) {
  if (q.dim() != ch.relay_antennas())
    throw std::invalid_argument("covariance dimension does not match relay antennas");
  const Eigen::Index nr = ch.relay_antennas();
  CMatrix g = CMatrix::Zero(nr, nr);
  const double weights[2] = {w.w1(), w.w2()};
  for (int node = 1; node <= 2; ++node) {
    const double wk = weights[node - 1];
    if (wk == 0.0) continue;
    const CMatrix& h = ch.channel(node);
    const Eigen::Index nk = h.rows();
    CMatrix inner = ch.noise_variance * CMatrix::Identity(nk, nk) + h * q.matrix() * h.adjoint();
    inner = 0.5 * (inner + inner.adjoint());
    Eigen::LLT<CMatrix> llt(inner);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("rate_gradient: inner matrix not positive definite");
    g += wk * (h.adjoint() * llt.solve(h));
  }
  g = 0.5 * (g + g.adjoint());
  return g;
}

CovarianceMatrix project_feasible(const CMatrix& m, double power_budget) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("project_feasible: matrix must be square and non-empty");
  if (!(power_budget > 0.0)) throw std::invalid_argument("project_feasible: budget must be > 0");

  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym);
  Eigen::VectorXd lam = eig.eigenvalues();

  bool changed = false;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < 0.0) {
      lam[i] = 0.0;
      changed = true;
    }
  }

  const double total = lam.sum();
  if (total > power_budget) {
    // Water level tau with sum_i max(lam_i - tau, 0) = budget.
    std::vector<double> sorted(lam.data(), lam.data() + lam.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double tau = 0.0;
    double prefix = 0.0;
    const int n = int(sorted.size());
    for (int k = 1; k <= n; ++k) {
      prefix += sorted[k - 1];
      const double cand = (prefix - power_budget) / double(k);
      if (k == n || cand >= sorted[k]) {
        tau = cand;
        break;
      }
    }
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = std::max(lam[i] - tau, 0.0);
    changed = true;
  }

  if (!changed) return CovarianceMatrix(sym, CovarianceMatrix::Trusted{});

  CMatrix out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint());
  return CovarianceMatrix(out, CovarianceMatrix::Trusted{});
}

}  // namespace bdbc
