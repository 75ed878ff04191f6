#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "varalg/linalg.hpp"
#include "varalg/problems.hpp"

using namespace varalg;

namespace {

Eigen::MatrixXd tridiagonal_entries(int n, double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = b;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = a;
  }
  return m;
}

}  // namespace

TEST_CASE("make_spd: identity") {
  const SpdMatrix A = make_spd(Eigen::MatrixXd::Identity(3, 3));
  CHECK(A.n() == 3);
  for (int k = 0; k < 3; ++k) CHECK(A.spectrum()(k) == doctest::Approx(1.0));
  CHECK(A.ones_form() == doctest::Approx(3.0));
}

TEST_CASE("make_spd: Trid_3(-1,2,-1) spectrum and ones form") {
  const SpdMatrix A = make_spd(tridiagonal_entries(3, -1.0, 2.0));
  CHECK(A.lambda_min() ==
        doctest::Approx(2.0 - 2.0 * std::cos(M_PI / 4.0)).epsilon(1e-12));
  CHECK(A.ones_form() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("make_spd: indefinite matrix is rejected with lambda_1 attached") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  CHECK_THROWS_AS(make_spd(m), NotPositiveDefinite);
  try {
    make_spd(m);
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.lambda_min == doctest::Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("make_spd: asymmetry beyond tolerance is rejected, within is fixed") {
  Eigen::MatrixXd m(2, 2);
  m << 2, -1, -0.5, 2;
  CHECK_THROWS_AS(make_spd(m), NotSymmetric);

  m << 2, -1 + 1e-12, -1, 2;
  const SpdMatrix A = make_spd(m);
  CHECK(A.entries()(0, 1) == A.entries()(1, 0));
}

TEST_CASE("make_spd: non-square and non-finite inputs") {
  CHECK_THROWS_AS(make_spd(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_spd(m), BadParams);
}

TEST_CASE("ones_form equals the explicit quadratic form at the ones vector") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const SpdMatrix A = test_support::random_spd(rng, 1 + trial % 7);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.n());
    const double direct = ones.dot(A.entries() * ones);
    CHECK(std::abs(A.ones_form() - direct) <=
          1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("jacobi spectrum matches the tridiagonal closed form up to n=50") {
  for (int n : {2, 3, 5, 13, 50}) {
    const SpdMatrix A = make_spd(tridiagonal_entries(n, -1.0, 2.0));
    for (int k = 1; k <= n; ++k) {
      const double expected = 2.0 - 2.0 * std::cos(k * M_PI / (n + 1));
      CHECK(std::abs(A.spectrum()(k - 1) - expected) < 1e-10);
    }
  }
}

TEST_CASE("jacobi eigenvectors diagonalize the matrix") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd m = test_support::random_spd_entries(rng, 6);
  const JacobiEigen eig = jacobi_eigen(m);
  const Eigen::MatrixXd recon =
      eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  CHECK((recon - m).norm() < 1e-10 * m.norm());
  CHECK((eig.vectors.transpose() * eig.vectors -
         Eigen::MatrixXd::Identity(6, 6))
            .norm() < 1e-12);
}

TEST_CASE("verify_norm_bounds: identity and eigenvector tightness") {
  const SpdMatrix I2 = make_spd(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd u(2);
  u << 1, 1;
  const NormBoundCheck c = verify_norm_bounds(I2, u);
  CHECK(c.quad_form == doctest::Approx(2.0));
  CHECK(c.lower_ok);
  CHECK(c.upper_ok);
  CHECK(c.infnorm_ok);

  const SpdMatrix T = make_spd(tridiagonal_entries(2, -1.0, 2.0));
  const Eigen::VectorXd v = T.eigenvectors().col(0);
  const NormBoundCheck tight = verify_norm_bounds(T, v);
  CHECK(std::abs(tight.quad_form - T.lambda_min() * v.squaredNorm()) < 1e-10);
  CHECK(tight.lower_ok);

  CHECK_THROWS_AS(verify_norm_bounds(T, Eigen::VectorXd::Zero(3)),
                  DimensionMismatch);
}

TEST_CASE("verify_norm_bounds: random property") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const SpdMatrix A = test_support::random_spd(rng, n);
    const Eigen::VectorXd u = test_support::random_vector(rng, n, 5.0);
    const NormBoundCheck c = verify_norm_bounds(A, u);
    CHECK(c.lower_ok);
    CHECK(c.upper_ok);
    CHECK(c.infnorm_ok);
  }
}

TEST_CASE("check_sign_conditions: tridiagonal stencil") {
  const SpdMatrix A = make_spd(tridiagonal_entries(4, -1.0, 2.0));
  const SignConditionVerdict v = check_sign_conditions(A);
  CHECK(v.a1_holds);
  CHECK(v.a2_holds);
  for (int i = 2; i <= 4; ++i) {
    REQUIRE(v.a2_witnesses[i - 2].has_value());
    CHECK(*v.a2_witnesses[i - 2] == i - 1);
  }
}

TEST_CASE("check_sign_conditions: 2x2 lattice matrix witnesses") {
  const Net net = rectangle_net(2, 2);
  const Problem p =
      build_lattice(net, catalog_make("ex42_logistic_log", {{"n", 4}}));
  const SignConditionVerdict v = check_sign_conditions(p.matrix);
  CHECK(v.a1_holds);
  CHECK(v.a2_holds);
  CHECK(*v.a2_witnesses[0] == 1);  // row 2
  CHECK(*v.a2_witnesses[1] == 1);  // row 3
  CHECK(*v.a2_witnesses[2] == 2);  // row 4
}

TEST_CASE("check_sign_conditions: fourth-order matrix violates (A1)") {
  const Problem p = build_fourth_order(4, catalog_make("rational_sq", {{"n", 4}}));
  const SignConditionVerdict v = check_sign_conditions(p.matrix);
  CHECK_FALSE(v.a1_holds);
  CHECK_FALSE(v.a2_holds);
}

TEST_CASE("check_sign_conditions: zeroing a negative entry is monotone") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 4;
    // diagonally dominant with mixed-sign off-diagonals, SPD by construction
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = mag(rng) - 0.8;  // mostly negative
        m(i, j) = m(j, i) = v;
      }
    for (int i = 0; i < n; ++i) m(i, i) = m.row(i).cwiseAbs().sum() + 0.5;

    int zi = -1, zj = -1;
    for (int i = 0; i < n && zi < 0; ++i)
      for (int j = i + 1; j < n; ++j)
        if (m(i, j) < 0.0) {
          zi = i;
          zj = j;
          break;
        }
    if (zi < 0) continue;

    const SignConditionVerdict before = check_sign_conditions(make_spd(m));
    m(zi, zj) = m(zj, zi) = 0.0;
    const SignConditionVerdict after = check_sign_conditions(make_spd(m));
    if (!before.a1_holds) CHECK_FALSE(after.a1_holds);
    if (!before.a2_holds) CHECK_FALSE(after.a2_holds);
  }
}

TEST_CASE("solve_spd: identity, tridiagonal, and random round trips") {
  const SpdMatrix I3 = make_spd(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd b(3);
  b << 1, -2, 0.5;
  CHECK((solve_spd(I3, b) - b).norm() < 1e-14);

  const SpdMatrix T = make_spd(tridiagonal_entries(2, -1.0, 2.0));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK((solve_spd(T, ones) - ones).norm() < 1e-12);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    const SpdMatrix A = test_support::random_spd(rng, n);
    const Eigen::VectorXd x = test_support::random_vector(rng, n, 3.0);
    const Eigen::VectorXd b2 = A.entries() * x;
    const Eigen::VectorXd got = solve_spd(A, b2);
    CHECK((got - x).norm() < 1e-8 * (1.0 + x.norm()));
    CHECK((A.entries() * got - b2).norm() <= 1e-10 * (1.0 + b2.norm()));
  }

  CHECK_THROWS_AS(solve_spd(T, b), DimensionMismatch);
}
