#include <doctest.h>

#include <random>
#include <stdexcept>

#include "bdbc/channel.hpp"
#include "oracles.hpp"

using namespace bdbc;

TEST_CASE("rate_pair: scalar closed form") {
  const auto ch = oracle::scalar_channel(1.0, 1.0, 3.0);
  CMatrix q(1, 1);
  q << Complex(3.0, 0.0);
  const RatePair r = rate_pair(ch, CovarianceMatrix(q));
  CHECK(r.r1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.r2 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rate_pair: zero covariance gives zero rates") {
  const auto ch = oracle::fig2_channel();
  const RatePair r = rate_pair(ch, CovarianceMatrix::Zero(2));
  CHECK(r.r1 == 0.0);
  CHECK(r.r2 == 0.0);
}

TEST_CASE("rate_pair: identity covariance matches independent determinant route") {
  const auto ch = oracle::fig2_channel();
  const CMatrix q = CMatrix::Identity(2, 2);
  const RatePair r = rate_pair(ch, CovarianceMatrix(q));
  // char-poly eigenvalues of I + H1 H1^H provide an independent value
  const CMatrix arg = CMatrix::Identity(2, 2) + ch.h1 * ch.h1.adjoint();
  const auto [lo, hi] = oracle::eig2x2_hermitian(arg);
  CHECK(r.r1 == doctest::Approx(std::log2(lo) + std::log2(hi)).epsilon(1e-12));
  CHECK(r.r1 == doctest::Approx(3.246408087246385).epsilon(1e-12));
  CHECK(r.r2 == doctest::Approx(oracle::rate_bits_lu(ch.h2, q, 1.0)).epsilon(1e-12));
}

TEST_CASE("weighted_sum_rate: degenerate and symmetric weights") {
  const auto ch = oracle::scalar_channel();
  CMatrix qm(1, 1);
  qm << Complex(3.0, 0.0);
  const CovarianceMatrix q(qm);
  const RatePair r = rate_pair(ch, q);
  CHECK(weighted_sum_rate(ch, q, WeightVector(1.0, 0.0)) == doctest::Approx(r.r1));
  CHECK(weighted_sum_rate(ch, q, WeightVector(0.0, 1.0)) == doctest::Approx(r.r2));
  CHECK(weighted_sum_rate(ch, q, WeightVector(0.5, 0.5)) == doctest::Approx(2.0));
}

TEST_CASE("rate_gradient: scalar and zero-channel closed forms") {
  const auto ch = oracle::scalar_channel(1.0, 1.0, 3.0);
  const CMatrix g = rate_gradient(ch, CovarianceMatrix::Zero(1), WeightVector(1.0, 0.0));
  CHECK(g(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g(0, 0).imag() == doctest::Approx(0.0));

  const BidirectionalChannel dead(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), 1.0, 1.0);
  const CMatrix gz = rate_gradient(dead, CovarianceMatrix::Zero(2), WeightVector(0.5, 0.5));
  CHECK(gz.norm() == doctest::Approx(0.0));
}

TEST_CASE("rate_gradient matches central finite differences on random instances") {
  std::mt19937_64 rng(0xfeedbead);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const int nr = dim(rng), n1 = dim(rng), n2 = dim(rng);
    const BidirectionalChannel ch(oracle::random_complex_matrix(rng, n1, nr),
                                  oracle::random_complex_matrix(rng, n2, nr), 1.0, 2.0);
    const CMatrix q = oracle::random_interior_covariance(rng, nr, ch.power);
    const double w1 = unit(rng);
    const WeightVector w(w1, 1.0 - w1);
    const CMatrix g = rate_gradient(ch, CovarianceMatrix(q), w);
    const CMatrix fd = oracle::fd_gradient_nats(ch, q, w.w1(), w.w2(), 1e-6);
    CHECK((g - fd).norm() / fd.norm() <= 1e-5);
  }
}

TEST_CASE("project_feasible: worked examples") {
  CMatrix feasible(2, 2);
  feasible << Complex(0.5, 0.0), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.8, 0.0);
  const CovarianceMatrix p0 = project_feasible(feasible, 2.0);
  CHECK((p0.matrix() - feasible).norm() <= 1e-12);

  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = -1.0;
  const CovarianceMatrix p1 = project_feasible(m, 2.0);
  CHECK(p1.matrix()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(p1.matrix()(1, 1)) <= 1e-12);

  const CovarianceMatrix p2 = project_feasible(CMatrix::Identity(2, 2), 2.0);
  CHECK((p2.matrix() - CMatrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("project_feasible: idempotent, nonexpansive, within budget") {
  std::mt19937_64 rng(77);
  std::vector<CMatrix> anchors;
  for (int i = 0; i < 8; ++i)
    anchors.push_back(oracle::random_interior_covariance(rng, 3, 1.5));

  for (int trial = 0; trial < 60; ++trial) {
    CMatrix m = oracle::random_complex_matrix(rng, 3, 3);
    m = m + m.adjoint();  // Hermitian but indefinite in general
    const CovarianceMatrix p = project_feasible(m, 1.5);
    CHECK(p.trace() <= 1.5 + 1e-9);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(p.matrix());
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);

    const CovarianceMatrix pp = project_feasible(p.matrix(), 1.5);
    CHECK((pp.matrix() - p.matrix()).norm() <= 1e-10);

    for (const CMatrix& f : anchors) {
      CHECK((p.matrix() - f).norm() <= (m - f).norm() + 1e-10);
    }
  }
}

TEST_CASE("logdet_hpd: identity, scaled identity, char-poly cross-check") {
  CHECK(logdet_hpd(CMatrix::Identity(3, 3)) == doctest::Approx(0.0));
  CHECK(logdet_hpd(2.0 * CMatrix::Identity(2, 2)) ==
        doctest::Approx(1.3862943611198906).epsilon(1e-14));

  CMatrix m(2, 2);
  m << Complex(3.0, 0.0), Complex(1.0, -1.0), Complex(1.0, 1.0), Complex(2.0, 0.0);
  const auto [lo, hi] = oracle::eig2x2_hermitian(m);  // {1, 4}
  CHECK(logdet_hpd(m) == doctest::Approx(std::log(lo) + std::log(hi)).epsilon(1e-13));

  CMatrix indef = CMatrix::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(logdet_hpd(indef), std::domain_error);
}

TEST_CASE("rates are concave and monotone in the covariance") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const BidirectionalChannel ch(oracle::random_complex_matrix(rng, 2, 2),
                                  oracle::random_complex_matrix(rng, 2, 2), 1.0, 2.0);
    const CMatrix qa = oracle::random_interior_covariance(rng, 2, 2.0);
    const CMatrix qb = oracle::random_interior_covariance(rng, 2, 2.0);
    const double lam = unit(rng);
    const RatePair mix =
        rate_pair(ch, CovarianceMatrix(lam * qa + (1.0 - lam) * qb));
    const RatePair ra = rate_pair(ch, CovarianceMatrix(qa));
    const RatePair rb = rate_pair(ch, CovarianceMatrix(qb));
    CHECK(mix.r1 >= lam * ra.r1 + (1.0 - lam) * rb.r1 - 1e-9);
    CHECK(mix.r2 >= lam * ra.r2 + (1.0 - lam) * rb.r2 - 1e-9);

    // monotonicity: adding a PSD increment never lowers either rate
    const CMatrix inc = oracle::random_interior_covariance(rng, 2, 1.0);
    const RatePair rbig = rate_pair(ch, CovarianceMatrix(qa + inc));
    CHECK(rbig.r1 >= ra.r1 - 1e-9);
    CHECK(rbig.r2 >= ra.r2 - 1e-9);
  }
}

TEST_CASE("rate_pair invariant under the compensating unitary reparameterization") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const BidirectionalChannel ch(oracle::random_complex_matrix(rng, 2, 2),
                                  oracle::random_complex_matrix(rng, 2, 2), 1.0, 2.0);
    const CMatrix q = oracle::random_interior_covariance(rng, 2, 2.0);
    // unitary from the QR of a random matrix
    const Eigen::HouseholderQR<CMatrix> qr(oracle::random_complex_matrix(rng, 2, 2));
    const CMatrix u = qr.householderQ() * CMatrix::Identity(2, 2);

    const BidirectionalChannel rotated(ch.h1 * u, ch.h2 * u, ch.noise_variance, ch.power);
    const RatePair a = rate_pair(ch, CovarianceMatrix(q));
    const RatePair b = rate_pair(rotated, CovarianceMatrix(u.adjoint() * q * u));
    CHECK(a.r1 == doctest::Approx(b.r1).epsilon(1e-10));
    CHECK(a.r2 == doctest::Approx(b.r2).epsilon(1e-10));
  }
}

TEST_CASE("covariance validation") {
  CMatrix bad(2, 2);
  bad << Complex(1.0, 0.0), Complex(0.5, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0);
  CHECK_THROWS_AS(CovarianceMatrix{bad}, std::invalid_argument);

  CMatrix indef = CMatrix::Identity(2, 2);
  indef(1, 1) = -0.5;
  CHECK_THROWS_AS(CovarianceMatrix{indef}, std::invalid_argument);

  // an eigenvalue within the tolerance band is clamped to zero
  CMatrix nearly = CMatrix::Identity(2, 2);
  nearly(1, 1) = -5e-10;
  const CovarianceMatrix c(nearly);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c.matrix());
  CHECK(eig.eigenvalues().minCoeff() >= -1e-15);
}

TEST_CASE("channel and weight validation") {
  CHECK_THROWS_AS(BidirectionalChannel(CMatrix::Zero(2, 2), CMatrix::Zero(2, 3), 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BidirectionalChannel(CMatrix::Zero(1, 1), CMatrix::Zero(1, 1), 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BidirectionalChannel(CMatrix::Zero(1, 1), CMatrix::Zero(1, 1), 1.0, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(-0.2, 0.4), std::invalid_argument);
  const WeightVector w(2.0, 6.0);
  CHECK(w.w1() == doctest::Approx(0.25));
  CHECK(w.w2() == doctest::Approx(0.75));

  const auto ch = oracle::fig2_channel();
  CHECK_THROWS_AS(rate_pair(ch, CovarianceMatrix::Zero(3)), std::invalid_argument);
}
