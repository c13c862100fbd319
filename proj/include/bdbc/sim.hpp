#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdbc/channel.hpp"

// Monte Carlo achievability check: Gaussian codebooks drawn from the
// backed-off covariance, per-block information-density threshold decoding
// with the receiver's own message as side information, zero-sequence repair
// of power-violating codewords, and empirical error tallies.

namespace bdbc {

struct CodeConfig {
  int block_length = 1;        // n
  std::size_t m1 = 1;          // |W1|, messages originating at node 1
  std::size_t m2 = 1;          // |W2|, messages originating at node 2
  double epsilon_p = 0.05;     // power backoff, in (0, P]
  std::uint64_t seed = 0;
  double delta = 0.1;          // rate backoff in bits, consumed by code_rate
  bool fresh_codebook = true;  // draw a new codebook for every trial
  // Rates used for the decoding thresholds. Unset means the realized code
  // rates log2(m2)/n (node 1) and log2(m1)/n (node 2).
  std::optional<double> rate1_bits;
  std::optional<double> rate2_bits;
};

struct Codebook {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  int block_length = 0;
  CovarianceMatrix q_hat;              // sampling covariance (P-eps_p)/P * Q
  std::vector<CMatrix> codewords;      // row-major by (w1, w2); NR x n blocks
  std::vector<std::uint8_t> repaired;  // 1 where the zero sequence was substituted

  const CMatrix& codeword(std::size_t w1, std::size_t w2) const {
    return codewords[w1 * m2 + w2];
  }
  bool is_repaired(std::size_t w1, std::size_t w2) const {
    return repaired[w1 * m2 + w2] != 0;
  }
};

struct TrialStats {
  long trials = 0;
  long errors_node1 = 0;  // wrong message or erasure
  long errors_node2 = 0;
  long erasures_node1 = 0;
  long erasures_node2 = 0;
  long power_violations = 0;  // trials whose transmitted codeword was repaired
  bool operator==(const TrialStats&) const = default;
};

/// splitmix64-based stream splitter used for all deterministic sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Seed of the codebook used in a given trial (trial-dependent only when
/// cfg.fresh_codebook is set).
std::uint64_t codebook_seed(const CodeConfig& cfg, long trial);

/// Materializes all m1*m2 codewords for the codebook identified by
/// book_seed. Codeword (w1, w2) depends only on (book_seed, w1, w2), so any
/// slice of the book can be regenerated independently.
Codebook build_codebook(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                        const CodeConfig& cfg, std::uint64_t book_seed);

/// Same, with book_seed = codebook_seed(cfg, 0).
Codebook build_codebook(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                        const CodeConfig& cfg);

/// Block-averaged information density (1/n) sum_i log2 p(y_i|x_i)/p(y_i)
/// in bits, where p(y|x) is Gaussian with mean H_k x and covariance
/// sigma^2 I, and p(y) is Gaussian with covariance sigma^2 I + H_k Qhat H_k^H.
double information_density(const BidirectionalChannel& ch, int node,
                           const CovarianceMatrix& q_hat, const CMatrix& x_block,
                           const CMatrix& y_block);

/// Threshold decoder at the given node: scans every codeword consistent
/// with the receiver's own message and returns the index of the unique
/// candidate whose information density exceeds
/// (code_rate_bits + I(X;Y_node))/2; nullopt is the erasure symbol (none or
/// more than one candidate passed).
std::optional<std::size_t> decode(const BidirectionalChannel& ch, int node,
                                  const Codebook& book, std::size_t own_message,
                                  const CMatrix& y_block, double code_rate_bits);

/// Monte Carlo error rates over n_trials independent trials. Each trial
/// draws its codebook (fresh per trial unless disabled), a uniform message
/// pair, per-node noise, and decodes at both nodes; a wrong message or an
/// erasure counts as an error. A node whose message set is a singleton is
/// never in error (its code rate is zero and the message is known).
/// Deterministic given cfg.seed; OpenMP-parallel across trials with
/// trial-indexed seed streams, so results are thread-count independent.
TrialStats run_trials(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                      const CodeConfig& cfg, long n_trials);

/// Serial reference for run_trials, composed from build_codebook and
/// decode; produces identical statistics.
TrialStats run_trials_serial(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                             const CodeConfig& cfg, long n_trials);

/// Code rate max( floor(n (target - delta/2)) / n, 0 ) in bits per use.
double code_rate(const CodeConfig& cfg, double target_rate_bits);

}  // namespace bdbc
