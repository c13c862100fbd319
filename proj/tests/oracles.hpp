#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// determinants go through LU instead of Cholesky, eigenvalues of 2x2
// Hermitian matrices come from the characteristic polynomial, and optima
// come from brute-force grids.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "bdbc/channel.hpp"

namespace oracle {

using bdbc::BidirectionalChannel;
using bdbc::CMatrix;
using bdbc::Complex;

inline double rate_bits_lu(const CMatrix& h, const CMatrix& q, double sigma2) {
  const Eigen::Index nk = h.rows();
  const CMatrix arg = CMatrix::Identity(nk, nk) + h * q * h.adjoint() / sigma2;
  const Complex det = Eigen::FullPivLU<CMatrix>(arg).determinant();
  return std::log2(std::abs(det));
}

inline double wsr_bits_lu(const BidirectionalChannel& ch, const CMatrix& q, double w1,
                          double w2) {
  double acc = 0.0;
  if (w1 != 0.0) acc += w1 * rate_bits_lu(ch.h1, q, ch.noise_variance);
  if (w2 != 0.0) acc += w2 * rate_bits_lu(ch.h2, q, ch.noise_variance);
  return acc;
}

/// Orthonormal basis of Hermitian n x n matrices under Re tr(X^H Y).
inline std::vector<CMatrix> hermitian_basis(Eigen::Index n) {
  std::vector<CMatrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      CMatrix s = CMatrix::Zero(n, n);
      s(i, j) = inv_sqrt2;
      s(j, i) = inv_sqrt2;
      basis.push_back(s);
      CMatrix a = CMatrix::Zero(n, n);
      a(i, j) = Complex(0.0, inv_sqrt2);
      a(j, i) = Complex(0.0, -inv_sqrt2);
      basis.push_back(a);
    }
  }
  return basis;
}

/// Central finite differences of the weighted sum rate in nats,
/// reconstructed as a Hermitian matrix from directional derivatives.
inline CMatrix fd_gradient_nats(const BidirectionalChannel& ch, const CMatrix& q,
                                double w1, double w2, double step) {
  const Eigen::Index n = q.rows();
  CMatrix g = CMatrix::Zero(n, n);
  for (const CMatrix& dir : hermitian_basis(n)) {
    const double fp = wsr_bits_lu(ch, q + step * dir, w1, w2) * bdbc::kLn2;
    const double fm = wsr_bits_lu(ch, q - step * dir, w1, w2) * bdbc::kLn2;
    g += ((fp - fm) / (2.0 * step)) * dir;
  }
  return g;
}

inline CMatrix random_complex_matrix(std::mt19937_64& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
  std::normal_distribution<double> gauss;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

/// Random Hermitian PD matrix with trace strictly inside the budget and
/// eigenvalues bounded away from zero (safe for finite differencing).
inline CMatrix random_interior_covariance(std::mt19937_64& rng, Eigen::Index n,
                                          double budget) {
  const CMatrix a = random_complex_matrix(rng, n, n);
  CMatrix q = a * a.adjoint() + 0.1 * CMatrix::Identity(n, n);
  q *= (0.8 * budget) / q.trace().real();
  return 0.5 * (q + q.adjoint());
}

/// Eigenvalues of a 2x2 Hermitian matrix via the characteristic polynomial.
inline std::pair<double, double> eig2x2_hermitian(const CMatrix& m) {
  const double tr = m.trace().real();
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

/// Exhaustive search over diagonal Q = diag(p, P - p), p on a uniform grid.
inline double grid_best_diagonal(const BidirectionalChannel& ch, double w1, double w2,
                                 int steps) {
  double best = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double p = ch.power * double(i) / double(steps);
    CMatrix q = CMatrix::Zero(2, 2);
    q(0, 0) = p;
    q(1, 1) = ch.power - p;
    best = std::max(best, wsr_bits_lu(ch, q, w1, w2));
  }
  return best;
}

/// 2x2 PSD trial covariance with full trace: eigenvalues (p, P-p) in the
/// frame of a planar rotation with phase.
inline CMatrix rotated_2x2(double p, double total, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex e_phi = std::polar(1.0, phi);
  CMatrix u(2, 2);
  u << Complex(c, 0.0), -s * std::conj(e_phi), s * e_phi, Complex(c, 0.0);
  CMatrix lam = CMatrix::Zero(2, 2);
  lam(0, 0) = p;
  lam(1, 1) = total - p;
  return u * lam * u.adjoint();
}

/// Brute-force lower bound on the weighted-sum optimum over 2x2 PSD
/// covariances. Monotonicity of both rates in Q makes tr Q = P optimal, so
/// only full-trace matrices are enumerated.
inline double grid_best_2x2(const BidirectionalChannel& ch, double w1, double w2,
                            int p_steps = 100, int theta_steps = 40, int phi_steps = 80) {
  double best = -1.0;
  for (int ip = 0; ip <= p_steps; ++ip) {
    const double p = ch.power * double(ip) / double(p_steps);
    for (int it = 0; it < theta_steps; ++it) {
      const double theta = 0.5 * M_PI * double(it) / double(theta_steps);
      for (int f = 0; f < phi_steps; ++f) {
        const double phi = 2.0 * M_PI * double(f) / double(phi_steps);
        const CMatrix q = rotated_2x2(p, ch.power, theta, phi);
        best = std::max(best, wsr_bits_lu(ch, q, w1, w2));
      }
    }
  }
  return best;
}

/// Brute-force lower bound on max min{R1, R2} over the same 2x2 grid.
inline double grid_best_maxmin_2x2(const BidirectionalChannel& ch, int p_steps = 100,
                                   int theta_steps = 40, int phi_steps = 80) {
  double best = -1.0;
  for (int ip = 0; ip <= p_steps; ++ip) {
    const double p = ch.power * double(ip) / double(p_steps);
    for (int it = 0; it < theta_steps; ++it) {
      const double theta = 0.5 * M_PI * double(it) / double(theta_steps);
      for (int f = 0; f < phi_steps; ++f) {
        const double phi = 2.0 * M_PI * double(f) / double(phi_steps);
        const CMatrix q = rotated_2x2(p, ch.power, theta, phi);
        const double r1 = rate_bits_lu(ch.h1, q, ch.noise_variance);
        const double r2 = rate_bits_lu(ch.h2, q, ch.noise_variance);
        best = std::max(best, std::min(r1, r2));
      }
    }
  }
  return best;
}

/// One-sided two-proportion z statistic for H1: pa > pb (pooled variance).
inline double two_proportion_z(long ka, long na, long kb, long nb) {
  const double pa = double(ka) / double(na);
  const double pb = double(kb) / double(nb);
  const double pool = double(ka + kb) / double(na + nb);
  const double se = std::sqrt(pool * (1.0 - pool) * (1.0 / double(na) + 1.0 / double(nb)));
  if (se == 0.0) return 0.0;
  return (pa - pb) / se;
}

inline BidirectionalChannel fig2_channel() {
  CMatrix h1(2, 2), h2(2, 2);
  h1 << Complex(1.0, -0.5), Complex(1.0, -0.5), Complex(-0.5, 0.0), Complex(1.3, 0.0);
  h2 << Complex(1.2, -0.2), Complex(0.7, 0.0), Complex(1.0, 0.0), Complex(0.0, -0.2);
  return BidirectionalChannel(h1, h2, 1.0, 1.0);
}

inline BidirectionalChannel scalar_channel(double h = 1.0, double sigma2 = 1.0,
                                           double power = 3.0) {
  CMatrix h1(1, 1), h2(1, 1);
  h1 << Complex(h, 0.0);
  h2 << Complex(h, 0.0);
  return BidirectionalChannel(h1, h2, sigma2, power);
}

inline BidirectionalChannel diagonal_2x2_channel() {
  CMatrix h1 = CMatrix::Zero(2, 2), h2 = CMatrix::Zero(2, 2);
  h1(0, 0) = 2.0;
  h1(1, 1) = 1.0;
  h2(0, 0) = 1.0;
  h2(1, 1) = 2.0;
  return BidirectionalChannel(h1, h2, 1.0, 1.0);
}

}  // namespace oracle
