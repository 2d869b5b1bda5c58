#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spectriples/numerics.hpp"

using namespace spectriples;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
  return (a + a.transpose()) / 2.0;
}

MatrixXc random_hermitian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  MatrixXc a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("hermitian_eigen on small matrices") {
  auto e = hermitian_eigen(Eigen::MatrixXd::Identity(2, 2));
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));

  Eigen::MatrixXd d = Eigen::Vector2d(-3.0, 2.0).asDiagonal();
  e = hermitian_eigen(d);
  CHECK(e.values(0) == doctest::Approx(-3.0));
  CHECK(e.values(1) == doctest::Approx(2.0));

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const Eigen::VectorXd v = hermitian_eigenvalues(swap);
  CHECK(v(0) == doctest::Approx(-1.0));
  CHECK(v(1) == doctest::Approx(1.0));
}

TEST_CASE("non-Hermitian input is rejected") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 0, 1;
  try {
    hermitian_eigen(a);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_hermitian);
  }
  // rounding-level asymmetry is symmetrized away
  a << 1, 2, 2 + 1e-14, 1;
  CHECK_NOTHROW(hermitian_eigen(a));
}

TEST_CASE("eigen residual is backward stable") {
  std::mt19937_64 rng(3);
  const MatrixXc m = random_hermitian(rng, 30);
  const auto e = hermitian_eigen(m);
  for (Index i = 0; i < m.rows(); ++i)
    CHECK((m * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() <= 1e-10 * m.norm());
  for (Index i = 1; i < m.rows(); ++i) CHECK(e.values(i - 1) <= e.values(i));
}

TEST_CASE("fractional_power") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK((fractional_power(id, 0.5) - id).norm() < 1e-14);
  Eigen::MatrixXd four(1, 1);
  four << 4.0;
  CHECK(fractional_power(four, 0.5)(0, 0) == doctest::Approx(2.0));
  Eigen::MatrixXd five(1, 1);
  five << 5.0;
  CHECK(fractional_power(five, 0.25)(0, 0) == doctest::Approx(std::pow(5.0, 0.25)));

  std::mt19937_64 rng(11);
  const Eigen::MatrixXd a = random_symmetric(rng, 12);
  const Eigen::MatrixXd spd = a * a.transpose() + Eigen::MatrixXd::Identity(12, 12);
  CHECK((fractional_power(spd, 1.0) - spd).norm() <= 1e-12 * spd.norm());
  for (double s : {0.25, 0.5, 1.5}) {
    const Eigen::MatrixXd prod = fractional_power(spd, s) * fractional_power(spd, -s);
    CHECK((prod - Eigen::MatrixXd::Identity(12, 12)).norm() <= 1e-10 * std::sqrt(12.0));
  }

  Eigen::MatrixXd indefinite = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  CHECK_THROWS_AS(fractional_power(indefinite, 0.5), Error);
}

TEST_CASE("inertia") {
  Eigen::MatrixXd d = Eigen::Vector3d(-1.0, 0.0, 2.0).asDiagonal();
  Inertia in = inertia(d, 1e-12);
  CHECK(in.n_minus == 1);
  CHECK(in.n_zero == 1);
  CHECK(in.n_plus == 1);

  in = inertia(Eigen::MatrixXd::Identity(5, 5));
  CHECK(in.n_plus == 5);
  CHECK(in.dimension() == 5);

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  in = inertia(swap);
  CHECK(in.n_minus == 1);
  CHECK(in.n_plus == 1);

  // diagonal pivoting cannot factor the swap matrix; this one it can
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 2, 1, 1, -3;
  in = inertia(indefinite);
  CHECK(in.n_minus == 1);
  REQUIRE(in.ldl_agrees.has_value());
  CHECK(*in.ldl_agrees);

  // an eigenvalue just outside the band raises the flag but still counts
  Eigen::MatrixXd near = Eigen::Vector2d(1.0, 5e-9).asDiagonal();
  in = inertia(near);
  CHECK(in.ambiguous);
  CHECK(in.n_plus == 1);
  CHECK(in.n_zero == 1);
}

TEST_CASE("inertia is invariant under congruence") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 8;
    const MatrixXc m = random_hermitian(rng, n);
    MatrixXc s(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) s(i, j) = Complex(g(rng), g(rng));
    s += 4.0 * MatrixXc::Identity(n, n);
    const Inertia a = inertia(m);
    const Inertia b = inertia(MatrixXc(s.adjoint() * m * s));
    if (a.ambiguous || b.ambiguous) continue;
    CHECK(a.n_minus == b.n_minus);
    CHECK(a.n_zero == b.n_zero);
    CHECK(a.n_plus == b.n_plus);
    CHECK(a.dimension() == n);
  }
}

TEST_CASE("singular_values") {
  const Eigen::VectorXd z = singular_values(Eigen::MatrixXd::Zero(3, 2));
  CHECK(z.size() == 2);
  CHECK(z.norm() == 0.0);

  Eigen::MatrixXd d = Eigen::Vector2d(3.0, -4.0).asDiagonal();
  const Eigen::VectorXd s = singular_values(d);
  CHECK(s(0) == doctest::Approx(4.0));
  CHECK(s(1) == doctest::Approx(3.0));

  std::mt19937_64 rng(9);
  const MatrixXc m = random_hermitian(rng, 20);
  Eigen::VectorXd abs_eig = hermitian_eigenvalues(m).cwiseAbs();
  std::sort(abs_eig.data(), abs_eig.data() + abs_eig.size(), std::greater<>());
  const Eigen::VectorXd sv = singular_values(m);
  CHECK((sv - abs_eig).norm() <= 1e-12 * sv(0) * std::sqrt(20.0));
}

TEST_CASE("solve_linear") {
  const Eigen::VectorXd b = Eigen::Vector3d(1.0, -2.0, 0.5);
  CHECK((solve_linear(Eigen::MatrixXd::Identity(3, 3), b) - b).norm() == 0.0);
  Eigen::MatrixXd two(1, 1);
  two << 2.0;
  Eigen::VectorXd four(1);
  four << 4.0;
  CHECK(solve_linear(two, four)(0) == doctest::Approx(2.0));

  Eigen::MatrixXd rank1(2, 2);
  rank1 << 1, 2, 2, 4;
  try {
    solve_linear(rank1, Eigen::Vector2d(1.0, 1.0));
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_system);
  }
  CHECK_THROWS_AS(solve_linear(Eigen::MatrixXd::Ones(2, 3), b), Error);
}
