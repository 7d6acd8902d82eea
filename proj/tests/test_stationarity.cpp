#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "schatten/fpia.hpp"
#include "schatten/stationarity.hpp"

#include <random>

using namespace schatten;

namespace {

FactoredIterate random_iterate(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  return {oracle::random_matrix(n, 1, rng), oracle::random_orthogonal(m, rng),
          oracle::random_orthogonal(n, rng)};
}

ProblemInstance random_problem(Eigen::Index m, Eigen::Index n, double p, double lambda,
                               std::mt19937_64& rng) {
  return ProblemInstance(LinearMap(m, n, LeftMultiply{oracle::random_matrix(m, m, rng)}),
                         oracle::random_matrix(m, n, rng), lambda, p);
}

}  // namespace

TEST_CASE("canonicalize") {
  FactoredIterate it{Vector(2), Matrix::Identity(3, 3), Matrix::Identity(2, 2)};
  it.sigma << -2.0, 3.0;
  const CanonicalSVD c = canonicalize(it);
  CHECK(c.sigma_plus(0) == 3.0);
  CHECK(c.sigma_plus(1) == 2.0);
  CHECK(c.r == 2);
  const Matrix X = c.U.topRows(2).transpose() * c.sigma_plus.asDiagonal() * c.V;
  CHECK((X - it.assemble()).norm() == 0.0);

  FactoredIterate canon{Vector(2), Matrix::Identity(3, 3), Matrix::Identity(2, 2)};
  canon.sigma << 3.0, 2.0;
  const CanonicalSVD same = canonicalize(canon);
  CHECK(same.U == canon.U);
  CHECK(same.V == canon.V);
  CHECK(same.sigma_plus == canon.sigma);

  std::mt19937_64 rng(1);
  const FactoredIterate r = random_iterate(7, 4, rng);
  const CanonicalSVD rc = canonicalize(r);
  const Matrix Y = rc.U.topRows(4).transpose() * rc.sigma_plus.asDiagonal() * rc.V;
  CHECK((Y - r.assemble()).norm() <= 1e-12);
  const auto sv = oracle::jacobi_singular_values(r.assemble());
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(rc.sigma_plus(i) - sv[static_cast<std::size_t>(i)]) <= 1e-8);
}

TEST_CASE("distance at certified stationary points") {
  std::mt19937_64 rng(2);
  const Matrix A = oracle::random_matrix(6, 6, rng);
  const Matrix b = oracle::random_matrix(6, 3, rng);
  const LinearMap L(6, 3, LeftMultiply{A});
  // lambda above ||A^T b||_2 puts 0 in the subdifferential at 0.
  const double big = 1.01 * oracle::jacobi_singular_values(A.transpose() * b).front();
  const ProblemInstance P(L, b, big, 1.0);
  CHECK(dist_subdiff_full(P, Matrix::Zero(6, 3)) == 0.0);
  FactoredIterate zero{Vector::Zero(3), Matrix::Identity(6, 6), Matrix::Identity(3, 3)};
  CHECK(dist_subdiff_factored(P, zero) == 0.0);

  // lambda = 0 at the least-squares solution of the identity map.
  const Matrix B = oracle::random_matrix(4, 3, rng);
  const ProblemInstance LS(LinearMap::identity(4, 3), B, 0.0, 1.0);
  CHECK(dist_subdiff_full(LS, B) <= 1e-12);

  // Zero gradients give zero factored distance.
  FactoredIterate it = random_iterate(4, 3, rng);
  const ProblemInstance Z(LinearMap::identity(4, 3), it.assemble(), 0.0, 0.5);
  CHECK(dist_subdiff_factored(Z, it) <= 1e-12);
}

TEST_CASE("full distance from an explicit block computation") {
  // Diagonal X with identity map, so U = V = I and G = X - b.
  const Eigen::Index m = 5, n = 3;
  Matrix X = Matrix::Zero(m, n);
  X(0, 0) = 2.0;
  X(1, 1) = 0.5;
  Matrix b(m, n);
  b << 1, 2, 0, -1, 3, 1, 0.5, 1, 4, 2, 0, 1, 1, 1, 1;
  const Matrix G = X - b;
  for (double p : {0.0, 0.5, 1.0}) {
    const double lam = 0.8;
    const ProblemInstance P(LinearMap::identity(m, n), b, lam, p);
    double d = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = G(i, i) + (p > 0 ? lam * p * std::pow(X(i, i), p - 1) : 0.0);
      d += e * e;
    }
    d += G(0, 1) * G(0, 1) + G(1, 0) * G(1, 0);
    d += G.block(0, 2, 2, 1).squaredNorm() + G.block(2, 0, 3, 2).squaredNorm();
    if (p == 1.0)
      for (double s : oracle::jacobi_singular_values(G.block(2, 2, 3, 1)))
        d += std::pow(std::max(s - lam, 0.0), 2);
    CHECK(dist_subdiff_full(P, X) == doctest::Approx(std::sqrt(d)).epsilon(1e-10));
  }
}

TEST_CASE("tau") {
  Vector s(2);
  s << 2.0, 1.0;
  CHECK(tau_sigma(s, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Vector one(1);
  one << 5.0;
  CHECK(tau_sigma(one, 1) == doctest::Approx(std::sqrt(2.0) / 5.0).epsilon(1e-15));
  Vector dup(2);
  dup << 2.0, 2.0;
  CHECK_THROWS_AS(tau_sigma(dup, 2), HypothesisViolation);
}

TEST_CASE("full distance is invariant to the factorization") {
  std::mt19937_64 rng(3);
  for (double p : {0.0, 0.5, 1.0}) {
    const ProblemInstance P = random_problem(6, 4, p, 0.4, rng);
    const FactoredIterate it = random_iterate(6, 4, rng);
    FactoredIterate other = it;
    other.sigma(1) = -other.sigma(1);
    other.U.row(1) = -other.U.row(1);
    other.sigma.row(0).swap(other.sigma.row(3));
    other.U.row(0).swap(other.U.row(3));
    other.V.row(0).swap(other.V.row(3));
    const double a = dist_subdiff_full(P, canonicalize(it));
    CHECK(std::abs(a - dist_subdiff_full(P, canonicalize(other))) <= 1e-8);
    CHECK(std::abs(a - dist_subdiff_full(P, it.assemble())) <= 1e-8);
    CHECK(std::abs(a - dist_subdiff_full(P, canonical_svd(it.assemble()))) <= 1e-8);
    CHECK(dist_subdiff_factored(P, it) >= 0.0);
  }
}

TEST_CASE("factored distance at a soft-threshold fixed point") {
  const Eigen::Index m = 4, n = 3;
  Matrix b = Matrix::Zero(m, n);
  b(0, 0) = 0.3;
  b(1, 1) = -0.2;
  const ProblemInstance P(LinearMap::identity(m, n), b, 0.5, 1.0);
  FactoredIterate zero{Vector::Zero(n), Matrix::Identity(m, m), Matrix::Identity(n, n)};
  CHECK(dist_subdiff_factored(P, zero) == 0.0);
}

TEST_CASE("comparison inequality on random factorizations") {
  std::mt19937_64 rng(4);
  int tested = 0;
  for (int trial = 0; trial < 60 && tested < 20; ++trial) {
    const double p = trial % 2 ? 0.5 : 1.0;
    const ProblemInstance P = random_problem(6, 4, p, 3.0, rng);
    FactoredIterate it = random_iterate(6, 4, rng);
    it.sigma(3) = 0.0;
    const CanonicalSVD c = canonicalize(it);
    const HypothesisReport h = check_hypothesis(P, c);
    if (!h.holds()) continue;
    ++tested;
    const double full = dist_subdiff_full(P, c);
    const double fac = dist_subdiff_factored(P, it);
    CHECK(full <= (2 * h.tau + 1) * fac + 1e-8);
  }
  CHECK(tested >= 20);
}

TEST_CASE("FPIA output is stationary") {
  std::mt19937_64 rng(5);
  const ProblemInstance P = random_problem(20, 10, 1.0, 2.0, rng);
  SolverConfig cfg;
  cfg.epsilon = 1e-9;
  cfg.max_iter = 200000;
  const SolveResult r = fpia_solve(P, cfg, Matrix::Zero(20, 10));
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(dist_subdiff_full(P, r.X_final) <= 1e-9 * 1.0001);
}
