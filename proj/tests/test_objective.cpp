#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "schatten/objective.hpp"

#include <random>

using namespace schatten;

namespace {

ProblemInstance random_problem(Eigen::Index m, Eigen::Index n, double p, std::mt19937_64& rng,
                               double lambda = 0.3) {
  const Matrix A = oracle::random_matrix(m + 2, m, rng);
  const Matrix b = oracle::random_matrix(m + 2, n, rng);
  return ProblemInstance(LinearMap(m, n, LeftMultiply{A}), b, lambda, p);
}

FactoredIterate random_iterate(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  FactoredIterate it;
  it.sigma = oracle::random_matrix(n, 1, rng);
  it.U = oracle::random_orthogonal(m, rng);
  it.V = oracle::random_orthogonal(n, rng);
  return it;
}

Matrix padded_diag(Eigen::Index m, Eigen::Index n, std::initializer_list<double> d) {
  Matrix X = Matrix::Zero(m, n);
  Eigen::Index i = 0;
  for (double v : d) X(i, i) = v, ++i;
  return X;
}

}  // namespace

TEST_CASE("problem validation") {
  const Matrix b = Matrix::Zero(2, 3);
  CHECK_THROWS_AS(ProblemInstance(LinearMap::identity(2, 3), b, 1.0, 1.0), DimensionError);
  CHECK_THROWS_AS(ProblemInstance(LinearMap::identity(3, 2), Matrix::Zero(2, 2), 1.0, 1.0),
                  DimensionError);
  CHECK_THROWS_AS(ProblemInstance(LinearMap::identity(3, 2), Matrix::Zero(3, 2), -1.0, 1.0),
                  DomainError);
  CHECK_THROWS_AS(ProblemInstance(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 1.0, 1.5),
                  DomainError);
}

TEST_CASE("f and F values") {
  const ProblemInstance I(LinearMap::identity(2, 2), Matrix::Zero(2, 2), 1.0, 1.0);
  CHECK(f_value(I, Matrix::Identity(2, 2)) == 0.5 * 2.0);
  const ProblemInstance L1(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 1.0, 1.0);
  const ProblemInstance L0(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 1.0, 0.0);
  const Matrix X = padded_diag(3, 2, {2.0, 1.0});
  CHECK(F_value(L1, X) == doctest::Approx(5.5).epsilon(1e-14));
  CHECK(F_value(L0, X) == doctest::Approx(4.5).epsilon(1e-14));

  std::mt19937_64 rng(1);
  const ProblemInstance P = random_problem(6, 4, 0.5, rng);
  const Matrix Y = oracle::random_matrix(6, 4, rng);
  CHECK(f_value(P, Y) >= 0.0);
  const ProblemInstance exact(P.map(), P.map().apply(Y), 0.3, 0.5);
  CHECK(f_value(exact, Y) <= 1e-24);
  const Matrix r = P.map().apply(Y) - P.b();
  CHECK(std::abs(f_value(P, Y) - 0.5 * r.squaredNorm()) <= 1e-14 * f_value(P, Y));
  double pen = 0.0;
  for (double s : oracle::jacobi_singular_values(Y)) pen += std::sqrt(s);
  CHECK(std::abs(F_value(P, Y) - (f_value(P, Y) + 0.3 * pen)) <= 1e-10 * F_value(P, Y));
}

TEST_CASE("F_factored") {
  std::mt19937_64 rng(2);
  const ProblemInstance P = random_problem(5, 3, 1.0, rng, 0.7);
  FactoredIterate z{Vector::Zero(3), Matrix::Identity(5, 5), Matrix::Identity(3, 3)};
  CHECK(F_factored(P, z) == doctest::Approx(0.5 * P.b().squaredNorm()).epsilon(1e-14));

  const ProblemInstance I(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 0.7, 1.0);
  FactoredIterate it{Vector(2), Matrix::Identity(3, 3), Matrix::Identity(2, 2)};
  it.sigma << 2.0, -1.0;
  CHECK(F_factored(I, it) == doctest::Approx(2.5 + 0.7 * 3.0).epsilon(1e-14));

  for (double p : {0.0, 0.5, 2.0 / 3.0, 1.0}) {
    const ProblemInstance Q = random_problem(7, 4, p, rng);
    const FactoredIterate r = random_iterate(7, 4, rng);
    CHECK(std::abs(F_factored(Q, r) - F_value(Q, r.assemble())) <= 1e-8 * F_value(Q, r.assemble()));
  }
}

TEST_CASE("factored Schatten consistency and permutation covariance") {
  std::mt19937_64 rng(3);
  const ProblemInstance P = random_problem(6, 4, 0.5, rng);
  FactoredIterate it = random_iterate(6, 4, rng);
  const auto sv = oracle::jacobi_singular_values(it.assemble());
  double lhs = 0.0;
  for (double s : sv) lhs += std::sqrt(s);
  double rhs = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) rhs += std::sqrt(std::abs(it.sigma(i)));
  CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);

  FactoredIterate swapped = it;
  swapped.sigma.row(0).swap(swapped.sigma.row(2));
  swapped.U.row(0).swap(swapped.U.row(2));
  swapped.V.row(0).swap(swapped.V.row(2));
  CHECK(std::abs(F_factored(P, swapped) - F_factored(P, it)) <= 1e-12 * F_factored(P, it));
}

TEST_CASE("grad_f matches finite differences") {
  const ProblemInstance I(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 1.0, 1.0);
  std::mt19937_64 rng(4);
  const Matrix X = oracle::random_matrix(3, 2, rng);
  CHECK((grad_f(I, X) - X).norm() <= 1e-15);

  const ProblemInstance P = random_problem(7, 5, 1.0, rng);
  const Matrix Y = oracle::random_matrix(7, 5, rng);
  const Matrix G = grad_f(P, Y);
  for (Eigen::Index i = 0; i < 7; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double fd = oracle::central_difference(
          [&](double h) {
            Matrix Z = Y;
            Z(i, j) += h;
            return f_value(P, Z);
          },
          1e-5);
      CHECK(std::abs(fd - G(i, j)) <= 1e-6 * std::max(1.0, std::abs(G(i, j))));
    }
  const ProblemInstance exact(P.map(), P.map().apply(Y), 0.3, 1.0);
  CHECK(grad_f(exact, Y).norm() <= 1e-12);
}

TEST_CASE("partial gradients") {
  // Identity map, b = 0, U = V = I: gradient is (sigma, 0, 0).
  const ProblemInstance I(LinearMap::identity(4, 3), Matrix::Zero(4, 3), 1.0, 1.0);
  FactoredIterate it{Vector(3), Matrix::Identity(4, 4), Matrix::Identity(3, 3)};
  it.sigma << 1.5, -0.5, 2.0;
  const PartialGrads g = partial_grads(I, it);
  CHECK((g.sigma - it.sigma).norm() <= 1e-15);
  CHECK(g.E.norm() == 0.0);
  CHECK(g.F.norm() == 0.0);

  std::mt19937_64 rng(5);
  const ProblemInstance P = random_problem(6, 4, 1.0, rng);
  const FactoredIterate r = random_iterate(6, 4, rng);
  const ProblemInstance exact(P.map(), P.map().apply(r.assemble()), 0.3, 1.0);
  const PartialGrads z = partial_grads(exact, r);
  CHECK(z.sigma.norm() + z.E.norm() + z.F.norm() <= 1e-12);

  const PartialGrads h = partial_grads(P, r);
  CHECK(h.E.matrix() == -Matrix(h.E.matrix().transpose()));
  CHECK(h.F.matrix() == -Matrix(h.F.matrix().transpose()));
}

TEST_CASE("step constants") {
  const double inf = std::numeric_limits<double>::infinity();
  const StepConstants z = step_constants_from_norms(2.5, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
  CHECK(z.l_sigma == 2.5);
  CHECK(z.l_omega == 0.0);
  CHECK(z.c == 0.0);
  CHECK(z.s_bar == inf);

  // Identity map, b = 0, sigma_k = sigma_next = e1, U = V = I.
  const ProblemInstance I(LinearMap::identity(3, 2), Matrix::Zero(3, 2), 1.0, 1.0);
  FactoredIterate it{Vector::Unit(2, 0), Matrix::Identity(3, 3), Matrix::Identity(2, 2)};
  const PartialGrads g = partial_grads(I, it);
  const StepConstants c = step_constants(I, it, it.sigma, g, 1.0);
  CHECK(c.l_sigma == doctest::Approx(5.0).epsilon(1e-14));

  // Independent evaluation of the constants on a random instance.
  std::mt19937_64 rng(6);
  const ProblemInstance P = random_problem(6, 4, 1.0, rng);
  const FactoredIterate r = random_iterate(6, 4, rng);
  const Vector next = oracle::random_matrix(4, 1, rng);
  const PartialGrads pg = partial_grads(P, r);
  const double L = P.op_norm();
  const double G = P.map().adjoint(P.map().apply(r.assemble()) - P.b()).norm();
  const double s = r.sigma.norm(), sn = next.norm();
  const double atb = P.map().adjoint(P.b()).norm();
  const double ls = L + 2 * G + 2 * L * s;
  const double lo = L * s * s + (0.5 + s) * G + 0.5 * s;
  const double cc = (L * sn * sn + atb * sn) * (pg.E.norm() + pg.F.norm());
  const double sb = 2.0 / (std::sqrt(lo * lo + 2 * cc) + lo);
  const StepConstants k = step_constants(P, r, next, pg, L);
  CHECK(std::abs(k.l_sigma - ls) <= 1e-12 * ls);
  CHECK(std::abs(k.l_omega - lo) <= 1e-12 * lo);
  CHECK(std::abs(k.c - cc) <= 1e-12 * cc);
  CHECK(std::abs(k.s_bar - sb) <= 1e-12 * sb);
  CHECK(k.grad_E_norm >= 0.0);
}

TEST_CASE("rank tolerance") {
  Vector s(3);
  s << 100.0, 1e-7, 1e-5;
  CHECK(rank_tol(s) == doctest::Approx(1e-6));
  CHECK(rank_tol(Vector::Zero(2)) == 1e-8);
}

#include "fd_helpers.hpp"

TEST_CASE("partial gradients match finite differences of the factored model") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const ProblemInstance P = random_problem(6, 4, 1.0, rng);
    const fd::GradError e = fd::partial_grad_error(P, random_iterate(6, 4, rng));
    CHECK(e.sigma <= 1e-6);
    CHECK(e.E <= 1e-6);
    CHECK(e.F <= 1e-6);
  }
}
