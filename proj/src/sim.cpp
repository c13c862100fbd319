#include "bdbc/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bdbc/threading.hpp"

namespace bdbc {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kBookSalt = 0x636f6465626f6f6bULL;   // "codebook"
constexpr std::uint64_t kTrialSalt = 0x747269616c726e67ULL;  // "trialrng"

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t word_seed(std::uint64_t book_seed, std::size_t w1, std::size_t w2) {
  return mix_seed(mix_seed(book_seed, std::uint64_t(w1)), std::uint64_t(w2));
}

// Counter-based 64-bit stream (the splitmix64 sequence of its seed).
// Construction is free, which matters because every codeword draws from its
// own stream; mt19937_64 pays a ~2.6us state initialization per stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() {
    state_ += kGolden;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

// Hermitian square root of a PSD matrix, eigenvalues clamped at zero.
CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  CMatrix out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

// Draws codeword (w1,w2): columns i.i.d. complex Gaussian with covariance
// sqrt_qhat*sqrt_qhat^H. Returns true when the block violated the average
// power constraint and was replaced by the zero sequence. The scratch
// matrix only avoids reallocation in the decoder scan.
bool draw_codeword(const CMatrix& sqrt_qhat, double power, std::uint64_t seed,
                   CMatrix& block, CMatrix& scratch) {
  const Eigen::Index nr = sqrt_qhat.rows();
  const Eigen::Index n = block.cols();
  SplitMix64 rng(seed);
  std::normal_distribution<double> gauss;
  constexpr double inv_sqrt2 = 0.7071067811865476;
  scratch.resize(nr, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < nr; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      scratch(i, j) = Complex(re * inv_sqrt2, im * inv_sqrt2);
    }
  }
  block.noalias() = sqrt_qhat * scratch;
  if (block.squaredNorm() > power * double(n)) {
    block.setZero();
    return true;
  }
  return false;
}

CMatrix draw_noise(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                   double sigma2) {
  std::normal_distribution<double> gauss;
  const double scale = std::sqrt(0.5 * sigma2);
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      out(i, j) = Complex(re * scale, im * scale);
    }
  }
  return out;
}

struct DensityModel {
  CMatrix h;            // Nk x NR
  CMatrix sigma_y_inv;  // (sigma^2 I + H Qhat H^H)^{-1}
  double const_nats;    // ln det Sigma_y - Nk ln sigma^2
  double inv_sigma2;
  double mutual_info_bits;
};

DensityModel make_density_model(const BidirectionalChannel& ch, int node,
                                const CovarianceMatrix& q_hat) {
  DensityModel m;
  m.h = ch.channel(node);
  const Eigen::Index nk = m.h.rows();
  CMatrix sigma_y = ch.noise_variance * CMatrix::Identity(nk, nk) +
                    m.h * q_hat.matrix() * m.h.adjoint();
  sigma_y = 0.5 * (sigma_y + sigma_y.adjoint());
  Eigen::LLT<CMatrix> llt(sigma_y);
  m.sigma_y_inv = llt.solve(CMatrix::Identity(nk, nk));
  m.const_nats = logdet_hpd(sigma_y) - double(nk) * std::log(ch.noise_variance);
  m.inv_sigma2 = 1.0 / ch.noise_variance;
  m.mutual_info_bits = m.const_nats / kLn2;
  return m;
}

// Per-symbol terms that depend only on the received block:
// const_nats + y_j^H Sigma_y^{-1} y_j. Computed once per scan because they
// are identical for every candidate codeword.
Eigen::VectorXd receive_terms(const DensityModel& m, const CMatrix& y) {
  const Eigen::Index n = y.cols();
  Eigen::VectorXd terms(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto yj = y.col(j);
    terms[j] = m.const_nats + (yj.adjoint() * m.sigma_y_inv * yj)(0, 0).real();
  }
  return terms;
}

// Single arithmetic path for the block density; every caller (the public
// operation, the materialized decoder, the streaming kernel) goes through
// here so outcomes are bit-identical.
double block_density_bits(const DensityModel& m, const CMatrix& x, const CMatrix& y,
                          const Eigen::VectorXd& terms, CMatrix& residual) {
  const Eigen::Index n = x.cols();
  residual.resize(y.rows(), n);
  residual = y;
  residual.noalias() -= m.h * x;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    acc += terms[j] - residual.col(j).squaredNorm() * m.inv_sigma2;
  return acc / (double(n) * kLn2);
}

// Unique-passer scan; nullopt is the erasure symbol.
template <typename CandidateFn>
std::optional<std::size_t> scan_candidates(const DensityModel& m, double threshold_bits,
                                           std::size_t n_candidates, const CMatrix& y,
                                           CandidateFn&& candidate) {
  const Eigen::VectorXd terms = receive_terms(m, y);
  CMatrix residual;
  std::optional<std::size_t> found;
  for (std::size_t c = 0; c < n_candidates; ++c) {
    const CMatrix& x = candidate(c);
    if (block_density_bits(m, x, y, terms, residual) > threshold_bits) {
      if (found) return std::nullopt;  // more than one candidate passed
      found = c;
    }
  }
  return found;
}

struct TrialSetup {
  CovarianceMatrix q_hat;
  CMatrix sqrt_qhat;
  DensityModel model1;
  DensityModel model2;
  double rate1_bits = 0.0;
  double rate2_bits = 0.0;
  double threshold1 = 0.0;
  double threshold2 = 0.0;
};

CovarianceMatrix backed_off_covariance(const BidirectionalChannel& ch,
                                       const CovarianceMatrix& q, double epsilon_p) {
  const double scale = (ch.power - epsilon_p) / ch.power;
  return CovarianceMatrix(scale * q.matrix());
}

void validate_code_config(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                          const CodeConfig& cfg) {
  if (cfg.block_length < 1) throw std::invalid_argument("block_length must be >= 1");
  if (cfg.m1 < 1 || cfg.m2 < 1) throw std::invalid_argument("message counts must be >= 1");
  if (!(cfg.epsilon_p > 0.0) || cfg.epsilon_p > ch.power)
    throw std::invalid_argument("epsilon_p must lie in (0, P]");
  if (q.dim() != ch.relay_antennas())
    throw std::invalid_argument("covariance dimension does not match relay antennas");
}

TrialSetup make_trial_setup(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                            const CodeConfig& cfg) {
  TrialSetup s;
  s.q_hat = backed_off_covariance(ch, q, cfg.epsilon_p);
  s.sqrt_qhat = psd_sqrt(s.q_hat.matrix());
  s.model1 = make_density_model(ch, 1, s.q_hat);
  s.model2 = make_density_model(ch, 2, s.q_hat);
  const double n = double(cfg.block_length);
  s.rate1_bits = cfg.rate1_bits.value_or(std::log2(double(cfg.m2)) / n);
  s.rate2_bits = cfg.rate2_bits.value_or(std::log2(double(cfg.m1)) / n);
  s.threshold1 = 0.5 * (s.rate1_bits + s.model1.mutual_info_bits);
  s.threshold2 = 0.5 * (s.rate2_bits + s.model2.mutual_info_bits);
  return s;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ (kGolden * (salt + 1)));
}

std::uint64_t codebook_seed(const CodeConfig& cfg, long trial) {
  const std::uint64_t base = mix_seed(cfg.seed, kBookSalt);
  return cfg.fresh_codebook ? mix_seed(base, std::uint64_t(trial)) : base;
}

Codebook build_codebook(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                        const CodeConfig& cfg, std::uint64_t book_seed) {
  validate_code_config(ch, q, cfg);
  if (cfg.m1 > (std::size_t(1) << 24) / cfg.m2)
    throw std::invalid_argument(
        "codebook too large to materialize; run_trials streams codewords instead");

  Codebook book;
  book.m1 = cfg.m1;
  book.m2 = cfg.m2;
  book.block_length = cfg.block_length;
  book.q_hat = backed_off_covariance(ch, q, cfg.epsilon_p);
  const CMatrix root = psd_sqrt(book.q_hat.matrix());

  const std::size_t total = cfg.m1 * cfg.m2;
  book.codewords.resize(total);
  book.repaired.assign(total, 0);
  const Eigen::Index nr = ch.relay_antennas();
  CMatrix scratch;
  for (std::size_t a = 0; a < cfg.m1; ++a) {
    for (std::size_t b = 0; b < cfg.m2; ++b) {
      CMatrix block(nr, cfg.block_length);
      const bool rep =
          draw_codeword(root, ch.power, word_seed(book_seed, a, b), block, scratch);
      book.codewords[a * cfg.m2 + b] = std::move(block);
      book.repaired[a * cfg.m2 + b] = rep ? 1 : 0;
    }
  }
  return book;
}

Codebook build_codebook(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                        const CodeConfig& cfg) {
  return build_codebook(ch, q, cfg, codebook_seed(cfg, 0));
}

double information_density(const BidirectionalChannel& ch, int node,
                           const CovarianceMatrix& q_hat, const CMatrix& x_block,
                           const CMatrix& y_block) {
  const CMatrix& h = ch.channel(node);
  if (x_block.rows() != h.cols()) throw std::invalid_argument("x block has wrong row count");
  if (y_block.rows() != h.rows()) throw std::invalid_argument("y block has wrong row count");
  if (x_block.cols() != y_block.cols() || x_block.cols() < 1)
    throw std::invalid_argument("x and y blocks must share a positive length");
  if (q_hat.dim() != h.cols())
    throw std::invalid_argument("covariance dimension does not match relay antennas");
  const DensityModel model = make_density_model(ch, node, q_hat);
  const Eigen::VectorXd terms = receive_terms(model, y_block);
  CMatrix residual;
  return block_density_bits(model, x_block, y_block, terms, residual);
}

std::optional<std::size_t> decode(const BidirectionalChannel& ch, int node,
                                  const Codebook& book, std::size_t own_message,
                                  const CMatrix& y_block, double code_rate_bits) {
  if (node != 1 && node != 2) throw std::invalid_argument("node must be 1 or 2");
  const std::size_t own_limit = (node == 1) ? book.m1 : book.m2;
  if (own_message >= own_limit) throw std::invalid_argument("own_message out of range");

  const DensityModel model = make_density_model(ch, node, book.q_hat);
  const double threshold = 0.5 * (code_rate_bits + model.mutual_info_bits);
  const std::size_t n_candidates = (node == 1) ? book.m2 : book.m1;
  return scan_candidates(model, threshold, n_candidates, y_block,
                         [&](std::size_t c) -> const CMatrix& {
                           return (node == 1) ? book.codeword(own_message, c)
                                              : book.codeword(c, own_message);
                         });
}

TrialStats run_trials(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                      const CodeConfig& cfg, long n_trials) {
  validate_code_config(ch, q, cfg);
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");

  const TrialSetup setup = make_trial_setup(ch, q, cfg);
  const Eigen::Index nr = ch.relay_antennas();
  const Eigen::Index n1 = ch.h1.rows(), n2 = ch.h2.rows();
  const int n = cfg.block_length;

  long err1 = 0, err2 = 0, era1 = 0, era2 = 0, pv = 0;
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_threads()) \
    reduction(+ : err1, err2, era1, era2, pv)
  for (long t = 0; t < n_trials; ++t) {
    const std::uint64_t book = codebook_seed(cfg, t);
    std::mt19937_64 rng(mix_seed(mix_seed(cfg.seed, kTrialSalt), std::uint64_t(t)));
    const std::size_t w1 = std::uniform_int_distribution<std::size_t>(0, cfg.m1 - 1)(rng);
    const std::size_t w2 = std::uniform_int_distribution<std::size_t>(0, cfg.m2 - 1)(rng);

    CMatrix sent(nr, n);
    CMatrix gauss_scratch;
    if (draw_codeword(setup.sqrt_qhat, ch.power, word_seed(book, w1, w2), sent,
                      gauss_scratch))
      ++pv;

    const CMatrix y1 = ch.h1 * sent + draw_noise(rng, n1, n, ch.noise_variance);
    const CMatrix y2 = ch.h2 * sent + draw_noise(rng, n2, n, ch.noise_variance);

    CMatrix candidate(nr, n);
    if (cfg.m2 > 1) {
      const auto got =
          scan_candidates(setup.model1, setup.threshold1, cfg.m2, y1,
                          [&](std::size_t c) -> const CMatrix& {
                            draw_codeword(setup.sqrt_qhat, ch.power,
                                          word_seed(book, w1, c), candidate, gauss_scratch);
                            return candidate;
                          });
      if (!got) {
        ++era1;
        ++err1;
      } else if (*got != w2) {
        ++err1;
      }
    }
    if (cfg.m1 > 1) {
      const auto got =
          scan_candidates(setup.model2, setup.threshold2, cfg.m1, y2,
                          [&](std::size_t c) -> const CMatrix& {
                            draw_codeword(setup.sqrt_qhat, ch.power,
                                          word_seed(book, c, w2), candidate, gauss_scratch);
                            return candidate;
                          });
      if (!got) {
        ++era2;
        ++err2;
      } else if (*got != w1) {
        ++err2;
      }
    }
  }

  TrialStats stats;
  stats.trials = n_trials;
  stats.errors_node1 = err1;
  stats.errors_node2 = err2;
  stats.erasures_node1 = era1;
  stats.erasures_node2 = era2;
  stats.power_violations = pv;
  return stats;
}

TrialStats run_trials_serial(const BidirectionalChannel& ch, const CovarianceMatrix& q,
                             const CodeConfig& cfg, long n_trials) {
  validate_code_config(ch, q, cfg);
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");

  const TrialSetup setup = make_trial_setup(ch, q, cfg);
  const Eigen::Index n1 = ch.h1.rows(), n2 = ch.h2.rows();
  const int n = cfg.block_length;

  TrialStats stats;
  stats.trials = n_trials;
  Codebook book;
  bool have_book = false;
  for (long t = 0; t < n_trials; ++t) {
    if (!have_book || cfg.fresh_codebook) {
      book = build_codebook(ch, q, cfg, codebook_seed(cfg, t));
      have_book = true;
    }
    std::mt19937_64 rng(mix_seed(mix_seed(cfg.seed, kTrialSalt), std::uint64_t(t)));
    const std::size_t w1 = std::uniform_int_distribution<std::size_t>(0, cfg.m1 - 1)(rng);
    const std::size_t w2 = std::uniform_int_distribution<std::size_t>(0, cfg.m2 - 1)(rng);

    if (book.is_repaired(w1, w2)) ++stats.power_violations;
    const CMatrix& sent = book.codeword(w1, w2);
    const CMatrix y1 = ch.h1 * sent + draw_noise(rng, n1, n, ch.noise_variance);
    const CMatrix y2 = ch.h2 * sent + draw_noise(rng, n2, n, ch.noise_variance);

    if (cfg.m2 > 1) {
      const auto got = decode(ch, 1, book, w1, y1, setup.rate1_bits);
      if (!got) {
        ++stats.erasures_node1;
        ++stats.errors_node1;
      } else if (*got != w2) {
        ++stats.errors_node1;
      }
    }
    if (cfg.m1 > 1) {
      const auto got = decode(ch, 2, book, w2, y2, setup.rate2_bits);
      if (!got) {
        ++stats.erasures_node2;
        ++stats.errors_node2;
      } else if (*got != w1) {
        ++stats.errors_node2;
      }
    }
  }
  return stats;
}

double code_rate(const CodeConfig& cfg, double target_rate_bits) {
  if (!(target_rate_bits >= 0.0)) throw std::invalid_argument("target rate must be >= 0");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const double n = double(cfg.block_length);
  return std::max(std::floor(n * (target_rate_bits - 0.5 * cfg.delta)) / n, 0.0);
}

}  // namespace bdbc
