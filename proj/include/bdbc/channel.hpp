#pragma once

#include <Eigen/Dense>
#include <complex>

// Core types and rate arithmetic for the two-user MIMO broadcast link:
// a relay with NR transmit antennas, receivers with N1/N2 antennas,
// i.i.d. circular complex Gaussian noise and a sum power budget.

namespace bdbc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

constexpr double kLn2 = 0.6931471805599453;

/// Problem instance: the pair of relay-to-node channel matrices plus the
/// noise variance (per complex dimension) and the average power budget.
struct BidirectionalChannel {
  CMatrix h1;  // N1 x NR
  CMatrix h2;  // N2 x NR
  double noise_variance = 1.0;
  double power = 1.0;

  BidirectionalChannel(CMatrix h1_in, CMatrix h2_in, double sigma2, double p);

  Eigen::Index relay_antennas() const { return h1.cols(); }
  const CMatrix& channel(int node) const;
};

/// Hermitian PSD transmit covariance. Construction symmetrizes, rejects
/// inputs that are non-Hermitian beyond 1e-10 entrywise or have an
/// eigenvalue below -1e-9, and clamps small negative eigenvalues to zero.
class CovarianceMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kPsdTol = 1e-9;

  CovarianceMatrix() = default;
  explicit CovarianceMatrix(const CMatrix& q);

  static CovarianceMatrix Zero(Eigen::Index n);
  static CovarianceMatrix Isotropic(Eigen::Index n, double total_power);

  const CMatrix& matrix() const { return q_; }
  Eigen::Index dim() const { return q_.rows(); }
  double trace() const { return q_.trace().real(); }

 private:
  struct Trusted {};
  CovarianceMatrix(CMatrix q, Trusted) : q_(std::move(q)) {}
  CMatrix q_;

  friend CovarianceMatrix project_feasible(const CMatrix&, double);
};

struct RatePair {
  double r1 = 0.0;  // bits/use delivered to node 1 (node 2's message)
  double r2 = 0.0;  // bits/use delivered to node 2
};

/// Nonnegative weight pair, normalized to w1 + w2 = 1 on construction.
class WeightVector {
 public:
  WeightVector(double toward_node1, double toward_node2);
  double w1() const { return w1_; }
  double w2() const { return w2_; }

 private:
  double w1_ = 0.5;
  double w2_ = 0.5;
};

/// log det of a Hermitian positive-definite matrix, in nats.
/// Throws std::domain_error if the Cholesky factorization fails.
double logdet_hpd(const CMatrix& m);

/// (C1(Q), C2(Q)) with C_k(Q) = log2 det(I + H_k Q H_k^H / sigma^2), bits.
RatePair rate_pair(const BidirectionalChannel& ch, const CovarianceMatrix& q);

/// w1*C1(Q) + w2*C2(Q) in bits.
double weighted_sum_rate(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                         const WeightVector& w);

/// Gradient of the weighted sum rate in nats with respect to Hermitian Q:
///   G = sum_k w_k H_k^H (sigma^2 I + H_k Q H_k^H)^{-1} H_k,
/// defined so that d/dt f(Q + t*D)|_0 = Re tr(G D) for Hermitian D.
CMatrix rate_gradient(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                      const WeightVector& w);

/// Euclidean projection of a (symmetrized) Hermitian matrix onto
/// { Q >= 0, tr Q <= power_budget }: eigenvalues are clamped at zero and,
/// if their sum still exceeds the budget, shifted by the water level of the
/// simplex projection.
CovarianceMatrix project_feasible(const CMatrix& m, double power_budget);

}  // namespace bdbc
