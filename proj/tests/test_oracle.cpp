#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hdqkd/asymptotic.hpp"
#include "hdqkd/oracle.hpp"

using namespace hdqkd;

TEST_CASE("all-zero rates force the point mass") {
  const OracleResult res = max_entropy_lambda(ConstrainedProblem(2, {0.0, 0.0}));
  CHECK(res.lambda_star.lambda(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.rate == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("six-state pattern at d=2 matches the analytic solution") {
  const ErrorRateSet observed = ErrorRateSet::symmetric(2, 3, 0.05);
  const OracleResult res = max_entropy_lambda(ConstrainedProblem(observed));
  const AsymptoticSolution sol = solve_eta(observed);
  const BellDiagonalState analytic = lambda_grid_from_solution(sol);
  CHECK((res.lambda_star.lambdas - analytic.lambdas).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(res.rate == doctest::Approx(sol.rate).epsilon(1e-6));
  CHECK(res.constraint_residual < 1e-8);
  CHECK(res.lambda_star.lambdas.minCoeff() > -1e-10);
}

TEST_CASE("unconstrained coefficients equalize (the free-coefficient pattern)") {
  const int d = 5;
  const OracleResult res =
      max_entropy_lambda(ConstrainedProblem(ErrorRateSet::symmetric(d, 3, 0.05)));
  // cells outside the Z and XZ^0, XZ^1 sets
  double lo = 1e300, hi = -1e300;
  for (int a = 1; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (b == 0 || b == a) continue;  // XZ^0 and XZ^1 sets
      lo = std::min(lo, res.lambda_star.lambda(a, b));
      hi = std::max(hi, res.lambda_star.lambda(a, b));
    }
  CHECK(hi - lo < 1e-6);
}

TEST_CASE("oracle rate agrees with the closed forms") {
  // two bases, at the bisected two-basis threshold the rate vanishes
  double lo = 0.08, hi = 0.15;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (rate_two_mubs(2, mid, mid) > 0 ? lo : hi) = mid;
  }
  const double q_threshold = 0.5 * (lo + hi);
  CHECK(std::abs(oracle_rate(ConstrainedProblem(2, {q_threshold, q_threshold}))) < 1e-4);

  // at Q = 0.11 the closed form is the reference
  CHECK(oracle_rate(ConstrainedProblem(2, {0.11, 0.11})) ==
        doctest::Approx(rate_two_mubs(2, 0.11, 0.11)).epsilon(1e-6));

  // asymmetric two-basis case
  CHECK(oracle_rate(ConstrainedProblem(3, {0.07, 0.03})) ==
        doctest::Approx(rate_two_mubs(3, 0.03, 0.07)).epsilon(1e-6));

  // maximal bases, symmetric
  CHECK(oracle_rate(ConstrainedProblem(ErrorRateSet::symmetric(5, 6, 0.05))) ==
        doctest::Approx(rate_max_mubs_symmetric(5, 0.05)).epsilon(1e-6));

  // maximal bases, asymmetric feasible tuple
  CHECK(oracle_rate(ConstrainedProblem(3, {0.03, 0.033, 0.036, 0.04})) ==
        doctest::Approx(rate_max_mubs(3, {0.03, 0.033, 0.036, 0.04})).epsilon(1e-6));
}

TEST_CASE("restarts agree (concavity)") {
  const ConstrainedProblem problem(ErrorRateSet::symmetric(3, 3, 0.06));
  const double reference = max_entropy_lambda(problem).rate;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::VectorXd start = random_feasible_interior(problem, seed);
    const OracleResult res = max_entropy_lambda(problem, start);
    CHECK(res.rate == doctest::Approx(reference).epsilon(1e-7));
  }
}

TEST_CASE("constraints hold at the optimum") {
  const ConstrainedProblem problem(ErrorRateSet(5, {0.04, 0.05, 0.06}));
  const OracleResult res = max_entropy_lambda(problem);
  const Eigen::MatrixXd a = problem.constraint_matrix();
  const Eigen::VectorXd b = problem.constraint_targets();
  Eigen::VectorXd x(25);
  for (int alpha = 0; alpha < 5; ++alpha)
    for (int beta = 0; beta < 5; ++beta) x(alpha * 5 + beta) = res.lambda_star.lambdas(alpha, beta);
  CHECK((a * x - b).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(x.minCoeff() > -1e-10);
  CHECK(res.stationarity < 1e-5);

  // against the analytic general-m rate
  CHECK(res.rate == doctest::Approx(rate_general(ErrorRateSet(5, {0.04, 0.05, 0.06}))).epsilon(1e-6));
}

TEST_CASE("infeasible constraint sets are rejected") {
  // Q_Z = 0 and Q_X = 0 pin everything on (0,0); Q_XZ = 0.5 contradicts it.
  CHECK_THROWS_AS(max_entropy_lambda(ConstrainedProblem(2, {0.0, 0.0, 0.5})),
                  infeasible_error);
}
