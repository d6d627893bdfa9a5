#include "hdqkd/verify.hpp"

#include <cmath>
#include <sstream>

#include "hdqkd/asymptotic.hpp"
#include "hdqkd/bell.hpp"
#include "hdqkd/finite.hpp"
#include "hdqkd/oracle.hpp"
#include "hdqkd/weyl.hpp"

namespace hdqkd {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  void check(const std::string& what, bool ok) {
    ++result_.checks;
    if (!ok) {
      ++result_.failures;
      if (result_.first_failure.empty()) result_.first_failure = what;
    }
  }

  void check_close(const std::string& what, double a, double b, double tol) {
    check(what, std::abs(a - b) <= tol);
  }

  SuiteResult result() const { return result_; }

 private:
  SuiteResult result_;
};

SuiteResult weyl_suite(VerifyLevel level) {
  Suite s("weyl-algebra");
  const int d_max = level == VerifyLevel::quick ? 3 : 7;
  for (int d = 2; d <= d_max; ++d) {
    const DenseOperator x = shift_op(d);
    const DenseOperator z = clock_op(d);
    const DenseOperator id = DenseOperator::Identity(d, d);
    DenseOperator xp = id, zp = id;
    for (int i = 0; i < d; ++i) {
      xp = x * xp;
      zp = z * zp;
    }
    s.check("X^d = 1", (xp - id).cwiseAbs().maxCoeff() < 1e-12);
    s.check("Z^d = 1", (zp - id).cwiseAbs().maxCoeff() < 1e-12);
    s.check("ZX = wXZ",
            (z * x - root_of_unity(d, 1) * x * z).cwiseAbs().maxCoeff() < 1e-12);

    // Bell basis orthonormal and complete.
    DenseOperator gram = DenseOperator::Zero(d * d, d * d);
    DenseOperator completeness = DenseOperator::Zero(d * d, d * d);
    std::vector<StateVector> bell;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) bell.push_back(bell_basis_vector(d, a, b));
    for (std::size_t i = 0; i < bell.size(); ++i) {
      completeness += bell[i] * bell[i].adjoint();
      for (std::size_t j = 0; j < bell.size(); ++j) gram(i, j) = bell[i].dot(bell[j]);
    }
    s.check("Bell basis orthonormal",
            (gram - DenseOperator::Identity(d * d, d * d)).cwiseAbs().maxCoeff() < 1e-12);
    s.check("Bell basis complete",
            (completeness - DenseOperator::Identity(d * d, d * d)).cwiseAbs().maxCoeff() < 1e-12);

    // Eigen-relation of every constructed basis vector.
    for (int k = 0; k < d; ++k) {
      const DenseOperator op = x * [&] {
        DenseOperator zk = id;
        for (int i = 0; i < k; ++i) zk = z * zk;
        return zk;
      }();
      double worst = 0;
      for (int j = 0; j < d; ++j) {
        const StateVector psi = mub_vector(d, k, j);
        const cxd mu = psi.dot(op * psi);  // Rayleigh quotient
        worst = std::max(worst, (op * psi - mu * psi).norm());
        worst = std::max(worst, std::abs(std::abs(mu) - 1.0));
      }
      s.check("XZ^k eigen-relation", worst < 1e-10);
    }
  }

  std::vector<int> primes = {2, 3};
  if (level == VerifyLevel::full) primes = {2, 3, 5, 7, 11, 13};
  for (int d : primes) {
    std::vector<Basis> bases;
    bases.push_back(computational_basis(d));
    for (int k = 0; k < d; ++k) bases.push_back(mub_basis(d, k));
    double worst = 0;
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t j = i + 1; j < bases.size(); ++j)
        worst = std::max(worst, check_mutually_unbiased(bases[i], bases[j]));
    s.check("d+1 bases pairwise unbiased (prime d)", worst < 1e-10);
  }
  s.check("max_num_mubs composite", max_num_mubs(6) == 3 && max_num_mubs(4) == 3);
  return s.result();
}

SuiteResult bell_suite(VerifyLevel level, std::uint64_t seed, bool inject_fault) {
  Suite s("bell-states");
  std::vector<int> dims = {2, 3};
  if (level == VerifyLevel::full) dims = {2, 3, 5};
  const int states_per_dim = level == VerifyLevel::quick ? 3 : 8;
  for (int d : dims) {
    for (int rep = 0; rep < states_per_dim; ++rep) {
      const DensityMatrix rho =
          random_density_matrix(d * d, seed + 977 * d + static_cast<std::uint64_t>(rep));
      const DensityMatrix sym = symmetrize(rho);
      validate_density_matrix(sym, d * d);

      BellDiagonalState bds = lambda_from_state(sym);
      if (inject_fault && d == dims.front() && rep == 0)
        bds.lambdas(0, d - 1) += 0.05;  // deliberate corruption
      s.check("symmetrized state is Bell-diagonal and normalized",
              std::abs(bds.sum() - 1.0) < 1e-10 && bds.lambdas.minCoeff() > -1e-12);

      s.check_close("symmetrize preserves Q_Z",
                    error_rate_in_basis(rho, computational_basis(d)),
                    error_rate_in_basis(sym, computational_basis(d)), 1e-10);
      for (int k = 0; k < d; ++k)
        s.check_close("symmetrize preserves Q_XZ^k",
                      error_rate_in_basis(rho, mub_basis(d, k)),
                      error_rate_in_basis(sym, mub_basis(d, k)), 1e-10);

      const DensityMatrix twice = symmetrize(sym);
      s.check("symmetrize idempotent", (twice - sym).cwiseAbs().maxCoeff() < 1e-10);

      // lambda path agrees with the density-matrix path.
      const BellDiagonalState clean = lambda_from_state(sym);
      s.check_close("Q_Z via lambdas", error_rate_z(clean),
                    error_rate_in_basis(sym, computational_basis(d)), 1e-10);
      for (int k = 0; k < d; ++k)
        s.check_close("Q_XZ^k via lambdas", error_rate_xzk(clean, k),
                      error_rate_in_basis(sym, mub_basis(d, k)), 1e-10);

      const DensityMatrix rebuilt = state_from_lambda(clean);
      s.check("state_from_lambda round-trip",
              (rebuilt - sym).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  return s.result();
}

SuiteResult asymptotic_suite(VerifyLevel level) {
  Suite s("asymptotic-rates");
  std::vector<int> dims = {2, 3};
  if (level == VerifyLevel::full) dims = {2, 3, 5};
  for (int d : dims) {
    for (int i = 0; i <= 10; ++i) {
      const double q = 0.8 * max_tolerable_q(d, 2) * i / 10;
      s.check_close("m=2 closed form", rate_general_symmetric(d, 2, q),
                    rate_two_mubs(d, q, q), 1e-10);
      const double qq = 0.8 * max_tolerable_q(d, d + 1) * i / 10;
      s.check_close("m=d+1 closed form", rate_general_symmetric(d, d + 1, qq),
                    rate_max_mubs_symmetric(d, qq), 1e-10);
    }
  }
  s.check_close("two-basis threshold (d=2)", max_tolerable_q(2, 2), 0.110027864438, 5e-7);
  s.check_close("three-basis threshold (d=2)", max_tolerable_q(2, 3), 0.126193083277, 5e-7);
  if (level == VerifyLevel::full) {
    double prev = rate_general_symmetric(5, 2, 0.05);
    bool increasing = true;
    for (int m = 3; m <= 6; ++m) {
      const double r = rate_general_symmetric(5, m, 0.05);
      increasing = increasing && r > prev;
      prev = r;
    }
    s.check("rate strictly increasing in m at d=5, Q=0.05", increasing);
  }
  return s.result();
}

SuiteResult oracle_suite(VerifyLevel level) {
  Suite s("entropy-oracle");
  struct Case {
    int d;
    std::vector<double> rates;
  };
  std::vector<Case> cases = {{2, {0.05, 0.05}},
                             {2, {0.05, 0.05, 0.05}},
                             {3, {0.07, 0.03}}};
  if (level == VerifyLevel::full) {
    cases.push_back({3, {0.05, 0.05, 0.05}});
    cases.push_back({3, {0.03, 0.033, 0.036, 0.04}});
    cases.push_back({5, {0.05, 0.05, 0.05}});
    cases.push_back({5, {0.05, 0.05, 0.05, 0.05, 0.05, 0.05}});
  }
  for (const auto& c : cases) {
    const ErrorRateSet er(c.d, c.rates);
    const double analytic = c.rates.size() == static_cast<std::size_t>(c.d) + 1
                                ? rate_max_mubs(c.d, c.rates)
                                : rate_general(er);
    const double oracle = oracle_rate(ConstrainedProblem(er));
    s.check_close("oracle agrees with analytic rate", oracle, analytic, 1e-6);
  }
  return s.result();
}

SuiteResult finite_suite(VerifyLevel level) {
  Suite s("finite-rates");
  const double budget = std::log2(1e-10);

  double prev_mu = 1e300;
  bool decreasing = true;
  for (double k : {1e3, 1e4, 1e5, 1e6}) {
    const double mu = mu_correction(1e7, k, 1e7 - k, 2, std::log2(1e-12));
    decreasing = decreasing && mu < prev_mu;
    prev_mu = mu;
  }
  s.check("mu decreases with more test rounds", decreasing);

  const std::vector<double> grid =
      level == VerifyLevel::quick ? std::vector<double>{1e6, 1e8}
                                  : std::vector<double>{1e5, 1e6, 1e7, 1e8, 1e10};
  for (double n : grid) {
    const RateResult eur =
        optimize_rate(n, 5, 2, 0.05, budget, BoundType::eur, AttackModel::collective);
    const RateResult aep =
        optimize_rate(n, 5, 2, 0.05, budget, BoundType::aep, AttackModel::collective);
    s.check("EUR dominates AEP at m=2", eur.rate >= aep.rate);
    s.check("finite rate below asymptotic",
            aep.rate <= rate_general_symmetric(5, 2, 0.05) + 1e-12);
  }

  FiniteScenario sc;
  sc.total_rounds = 1e9;
  sc.test_rounds = 1e8;
  sc.dim = 5;
  sc.num_bases = 3;
  sc.q_tol = 0.05;
  const SecuritySplit split = SecuritySplit::from_weights(budget, 0.3, 0.3);
  const RateResult col = aep_rate(sc, split);
  const RateResult coh = coherent_rate(sc, split, EpsMode::fixed);
  s.check("fixed-eps coherent = collective - damping",
          coh.rate == col.rate - coherent_damping(5, sc.total_rounds));
  return s.result();
}

}  // namespace

std::vector<SuiteResult> run_verification(VerifyLevel level, std::uint64_t seed,
                                          bool inject_fault) {
  std::vector<SuiteResult> results;
  results.push_back(weyl_suite(level));
  results.push_back(bell_suite(level, seed, inject_fault));
  results.push_back(asymptotic_suite(level));
  results.push_back(oracle_suite(level));
  results.push_back(finite_suite(level));
  return results;
}

}  // namespace hdqkd
