#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hdqkd/bell.hpp"

using namespace hdqkd;

namespace {

double max_abs(const DensityMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Largest off-diagonal magnitude of rho expressed in the Bell basis,
// computed from the projector pairs directly.
double bell_offdiag(const DensityMatrix& rho, int d) {
  double worst = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2) {
          if (a == a2 && b == b2) continue;
          const StateVector u = bell_basis_vector(d, a, b);
          const StateVector w = bell_basis_vector(d, a2, b2);
          worst = std::max(worst, std::abs((u.adjoint() * rho * w)(0, 0)));
        }
  return worst;
}

BellDiagonalState random_simplex_lambda(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd grid(d, d);
  double total = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      grid(a, b) = -std::log(1.0 - unif(rng));
      total += grid(a, b);
    }
  grid /= total;
  return BellDiagonalState(d, grid);
}

}  // namespace

TEST_CASE("symmetrize fixes Bell-state and maximally mixed inputs") {
  for (int d : {2, 3}) {
    const StateVector phi = bell_state(d);
    const DensityMatrix pure = phi * phi.adjoint();
    CHECK(max_abs(symmetrize(pure) - pure) < 1e-13);

    const DensityMatrix mixed =
        DensityMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
    CHECK(max_abs(symmetrize(mixed) - mixed) < 1e-13);
  }
}

TEST_CASE("symmetrize outputs Bell-diagonal states") {
  const DensityMatrix rho = random_density_matrix(9, 424242);
  const DensityMatrix sym = symmetrize(rho);
  validate_density_matrix(sym, 9);
  CHECK(bell_offdiag(sym, 3) < 1e-12);
  // and is idempotent
  CHECK(max_abs(symmetrize(sym) - sym) < 1e-10);
}

TEST_CASE("symmetrize leaves every measured error rate invariant") {
  for (int d : {2, 3, 5}) {
    for (std::uint64_t seed : {7ULL, 8ULL, 9ULL}) {
      const DensityMatrix rho = random_density_matrix(d * d, 1000 * d + seed);
      const DensityMatrix sym = symmetrize(rho);
      CHECK(error_rate_in_basis(rho, computational_basis(d)) ==
            doctest::Approx(error_rate_in_basis(sym, computational_basis(d))).epsilon(1e-10));
      for (int k = 0; k < d; ++k)
        CHECK(error_rate_in_basis(rho, mub_basis(d, k)) ==
              doctest::Approx(error_rate_in_basis(sym, mub_basis(d, k))).epsilon(1e-10));
    }
  }
}

TEST_CASE("lambda round trips") {
  // point mass and uniform grid
  for (int d : {2, 3}) {
    Eigen::MatrixXd point = Eigen::MatrixXd::Zero(d, d);
    point(0, 0) = 1.0;
    const BellDiagonalState pure(d, point);
    const StateVector phi = bell_state(d);
    CHECK(max_abs(state_from_lambda(pure) - phi * phi.adjoint()) < 1e-14);

    const BellDiagonalState uniform(
        d, Eigen::MatrixXd::Constant(d, d, 1.0 / (d * d)));
    CHECK(max_abs(state_from_lambda(uniform) -
                  DensityMatrix::Identity(d * d, d * d) / double(d * d)) < 1e-14);
  }

  // random simplex point, d=5: lambda_from_state(state_from_lambda) = id
  const BellDiagonalState bds = random_simplex_lambda(5, 321);
  const BellDiagonalState round = lambda_from_state(state_from_lambda(bds));
  CHECK((round.lambdas - bds.lambdas).cwiseAbs().maxCoeff() < 1e-12);

  // a clearly non-Bell-diagonal state is rejected with the offender reported
  DensityMatrix skew = DensityMatrix::Identity(4, 4) / 4.0;
  skew(0, 1) = skew(1, 0) = 0.2;
  CHECK_THROWS_AS(lambda_from_state(skew), not_bell_diagonal_error);
  try {
    lambda_from_state(skew);
  } catch (const not_bell_diagonal_error& e) {
    CHECK(e.max_offdiag() > 0.1);
  }
}

TEST_CASE("weyl coefficients") {
  // maximally mixed: r_00 = 1, everything else 0
  for (int d : {2, 3}) {
    const DensityMatrix mixed =
        DensityMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
    CHECK(std::abs(weyl_coefficient(mixed, 0, 0) - cxd(1, 0)) < 1e-13);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        if (k || l) CHECK(std::abs(weyl_coefficient(mixed, k, l)) < 1e-13);
  }

  // |phi+><phi+| at d=2: every coefficient is 1; oracle = direct trace
  const StateVector phi = bell_state(2);
  const DensityMatrix pure = phi * phi.adjoint();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      const DenseOperator u = kron(weyl_op(2, k, l), weyl_op(2, k, -l));
      const cxd direct = (u.adjoint() * pure).trace();
      CHECK(std::abs(weyl_coefficient(pure, k, l) - direct) < 1e-14);
      CHECK(std::abs(weyl_coefficient(pure, k, l) - cxd(1, 0)) < 1e-13);
    }

  // reconstruction of a random symmetrized d=3 state
  const int d = 3;
  const DensityMatrix sym = symmetrize(random_density_matrix(d * d, 777));
  DensityMatrix rebuilt = DensityMatrix::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      rebuilt += weyl_coefficient(sym, k, l) * kron(weyl_op(d, k, l), weyl_op(d, k, -l));
  rebuilt /= static_cast<double>(d * d);
  CHECK(max_abs(rebuilt - sym) < 1e-10);
}

TEST_CASE("error rates from lambdas") {
  for (int d : {2, 5}) {
    Eigen::MatrixXd point = Eigen::MatrixXd::Zero(d, d);
    point(0, 0) = 1.0;
    const BellDiagonalState pure(d, point);
    CHECK(error_rate_z(pure) == 0.0);
    for (int k = 0; k < d; ++k) CHECK(error_rate_xzk(pure, k) == 0.0);

    const BellDiagonalState uniform(
        d, Eigen::MatrixXd::Constant(d, d, 1.0 / (d * d)));
    CHECK(error_rate_z(uniform) == doctest::Approx(1.0 - 1.0 / d).epsilon(1e-12));
    for (int k = 0; k < d; ++k)
      CHECK(error_rate_xzk(uniform, k) == doctest::Approx(1.0 - 1.0 / d).epsilon(1e-12));
  }

  // cross-path agreement against the density-matrix route, random lambda
  const BellDiagonalState bds = random_simplex_lambda(5, 654);
  const DensityMatrix rho = state_from_lambda(bds);
  CHECK(error_rate_z(bds) ==
        doctest::Approx(error_rate_in_basis(rho, computational_basis(5))).epsilon(1e-10));
  for (int k = 0; k < 5; ++k)
    CHECK(error_rate_xzk(bds, k) ==
          doctest::Approx(error_rate_in_basis(rho, mub_basis(5, k))).epsilon(1e-10));

  CHECK_THROWS_AS(error_rate_xzk(bds, 5), std::out_of_range);
}

TEST_CASE("perfect correlations of the Bell state in every conjugated basis") {
  for (int d : {2, 3, 5, 7}) {
    const StateVector phi = bell_state(d);
    const DensityMatrix pure = phi * phi.adjoint();
    CHECK(error_rate_in_basis(pure, computational_basis(d)) < 1e-12);
    for (int k = 0; k < d; ++k)
      CHECK(error_rate_in_basis(pure, mub_basis(d, k)) < 1e-12);

    const DensityMatrix mixed =
        DensityMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
    CHECK(error_rate_in_basis(mixed, computational_basis(d)) ==
          doctest::Approx(1.0 - 1.0 / d).epsilon(1e-12));
  }
}

TEST_CASE("von Neumann entropy of the coefficient grid") {
  Eigen::MatrixXd point = Eigen::MatrixXd::Zero(3, 3);
  point(0, 0) = 1.0;
  CHECK(von_neumann_entropy(BellDiagonalState(3, point)) == 0.0);

  for (int d : {2, 3, 5}) {
    const BellDiagonalState uniform(
        d, Eigen::MatrixXd::Constant(d, d, 1.0 / (d * d)));
    CHECK(von_neumann_entropy(uniform) ==
          doctest::Approx(2.0 * std::log2(double(d))).epsilon(1e-12));
  }

  Eigen::MatrixXd half = Eigen::MatrixXd::Zero(2, 2);
  half(0, 0) = 0.5;
  half(0, 1) = 0.5;
  CHECK(von_neumann_entropy(BellDiagonalState(2, half)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("type invariants") {
  CHECK_THROWS_AS(ErrorRateSet(5, {0.1}), std::invalid_argument);          // m < 2
  CHECK_THROWS_AS(ErrorRateSet(2, {0.1, 0.1, 0.1, 0.1}), std::invalid_argument);  // m > d+1
  CHECK_THROWS_AS(ErrorRateSet(3, {0.1, 1.2}), std::invalid_argument);     // out of range

  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 0.3);
  CHECK_THROWS_AS(BellDiagonalState(2, bad).validate(), std::invalid_argument);  // sum 1.2
  bad = Eigen::MatrixXd::Constant(2, 2, 0.25);
  bad(0, 0) = 0.5;
  bad(0, 1) = -0.001;
  CHECK_THROWS_AS(BellDiagonalState(2, bad).validate(), std::invalid_argument);  // negative

  CHECK_THROWS_AS(symmetrize(DensityMatrix::Identity(5, 5)), std::invalid_argument);
  CHECK_THROWS_AS(error_rate_in_basis(DensityMatrix::Identity(4, 4) / 4.0,
                                      computational_basis(3)),
                  std::invalid_argument);
}
