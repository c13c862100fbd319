#pragma once

#include <vector>

#include "bdbc/channel.hpp"

// Weighted-sum-rate maximization over { Q >= 0, tr Q <= P } by projected
// gradient ascent with Armijo backtracking, first-order optimality
// certificates built from the trace and cone multipliers, closed-form
// single-user water-filling, and the maxmin (equal-rate) operating point.

namespace bdbc {

struct SolverConfig {
  int max_iters = 5000;
  double grad_tol = 1e-7;        // on the projected-gradient mapping norm, nats
  double step_init = 1.0;
  double backtrack_ratio = 0.5;  // in (0,1)
  double armijo_c = 1e-4;
};

/// Multipliers (mu, Psi) and residual norms for the first-order system
///   mu*I - Psi = G(Q),   Q >= 0, tr Q <= P,   Psi >= 0, mu >= 0,
///   tr(Q Psi) = 0,       mu (P - tr Q) = 0.
struct KktCertificate {
  double mu = 0.0;
  CMatrix psi;
  double stationarity_residual = 0.0;  // spectral norm of mu*I - Psi - G
  double comp_slack_trace = 0.0;       // |mu (P - tr Q)|
  double comp_slack_cone = 0.0;        // |tr(Q Psi)|

  static constexpr double kStationarityTol = 1e-5;
  static constexpr double kSlackTol = 1e-6;

  bool within_tolerance(double stat_tol = kStationarityTol,
                        double slack_tol = kSlackTol) const {
    return stationarity_residual <= stat_tol && comp_slack_trace <= slack_tol &&
           comp_slack_cone <= slack_tol;
  }
  double max_residual() const {
    double m = stationarity_residual;
    if (comp_slack_trace > m) m = comp_slack_trace;
    if (comp_slack_cone > m) m = comp_slack_cone;
    return m;
  }
};

struct SolveResult {
  CovarianceMatrix q;
  RatePair rates;
  KktCertificate certificate;
  bool converged = false;  // gradient mapping reached grad_tol
  bool certified = false;  // converged and certificate within tolerance
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted objective values, bits
};

struct WaterfillResult {
  CovarianceMatrix q_opt;
  double capacity = 0.0;    // bits
  double water_level = 0.0;
  int active_modes = 0;
};

struct MaxminResult {
  CovarianceMatrix q;
  RatePair rates;
  KktCertificate certificate;
  double weight_to_node1 = 0.5;  // weight at which the solution was found
  bool converged = false;        // |r1 - r2| within tolerance (or endpoint case)
};

/// Builds multipliers for a candidate Q: mu from the top eigenvalue of the
/// gradient restricted to the range of Q (zero when the trace constraint is
/// slack), Psi as the PSD part of mu*I - G, and reports all three defects.
KktCertificate kkt_residual(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                            const WeightVector& w);

/// Projected gradient ascent from Q0 = (P/NR) I. Stops when the unit-step
/// gradient mapping ||Q - proj(Q + step_init*G)||_F / step_init falls below
/// cfg.grad_tol. Non-convergence returns the best iterate, not certified.
SolveResult maximize_weighted_sum(const BidirectionalChannel& ch, const WeightVector& w,
                                  const SolverConfig& cfg = {});

/// Classical water-filling over the eigenmodes of H_node. A zero channel
/// yields the isotropic covariance and zero capacity.
WaterfillResult waterfill_single_user(const BidirectionalChannel& ch, int node);

/// max min{R1(Q), R2(Q)}: returns an endpoint when it is already maxmin
/// optimal, otherwise bisects the weight until |r1 - r2| <= 1e-4 bits.
MaxminResult maxmin_rate(const BidirectionalChannel& ch, const SolverConfig& cfg = {});

constexpr double kMaxminRateTol = 1e-4;  // bits
constexpr int kMaxminMaxBisections = 60;

}  // namespace bdbc
