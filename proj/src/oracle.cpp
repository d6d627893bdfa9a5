#include "hdqkd/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

namespace hdqkd {

namespace {

constexpr double kLogFloor = 1e-300;

double entropy_bits_of(const Eigen::VectorXd& x) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) h += entropy_term(std::max(0.0, x(i)));
  return h;
}

Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g(i) = -std::log2(std::max(x(i), kLogFloor)) - 1.0 / std::log(2.0);
  return g;
}

// Exact projector onto {x : A x = b} plus Dykstra's alternating scheme for
// the intersection with the nonnegative orthant.
class FeasibleSetProjector {
 public:
  FeasibleSetProjector(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)), llt_(a_ * a_.transpose()) {
    if (llt_.info() != Eigen::Success)
      throw std::invalid_argument("constraint rows are linearly dependent");
  }

  Eigen::VectorXd onto_affine(const Eigen::VectorXd& x) const {
    return x + a_.transpose() * llt_.solve(b_ - a_ * x);
  }

  double affine_residual(const Eigen::VectorXd& x) const {
    return (a_ * x - b_).cwiseAbs().maxCoeff();
  }

  Eigen::VectorXd onto_intersection(const Eigen::VectorXd& x0,
                                    long max_sweeps = 20000) const {
    Eigen::VectorXd x = x0;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd q = Eigen::VectorXd::Zero(x.size());
    for (long it = 0; it < max_sweeps; ++it) {
      const Eigen::VectorXd y = onto_affine(x + p);
      p = x + p - y;
      const Eigen::VectorXd z = (y + q).cwiseMax(0.0);
      q = y + q - z;
      const double change = (z - x).cwiseAbs().maxCoeff();
      x = z;
      if (change < 1e-15 && affine_residual(x) < 1e-13) break;
    }
    return x;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace

ConstrainedProblem::ConstrainedProblem(int d, std::vector<double> qs)
    : dim(d), num_bases(static_cast<int>(qs.size())), rates(std::move(qs)) {
  validate();
}

void ConstrainedProblem::validate() const {
  ErrorRateSet(dim, rates);  // reuse the rate-set invariants
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
}

Eigen::MatrixXd ConstrainedProblem::constraint_matrix() const {
  const int d = dim;
  const int n = d * d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1 + num_bases, n);
  a.row(0).setOnes();
  for (int alpha = 0; alpha < d; ++alpha) a(1, 0 * d + alpha) = 1.0;  // Z set
  for (int k = 0; k + 1 < num_bases; ++k)
    for (int alpha = 0; alpha < d; ++alpha)
      a(2 + k, alpha * d + mod_reduce(static_cast<long long>(k) * alpha, d)) = 1.0;
  return a;
}

Eigen::VectorXd ConstrainedProblem::constraint_targets() const {
  Eigen::VectorXd b(1 + num_bases);
  b(0) = 1.0;
  for (int i = 0; i < num_bases; ++i) b(1 + i) = 1.0 - rates[i];
  return b;
}

OracleResult max_entropy_lambda(const ConstrainedProblem& problem) {
  problem.validate();
  const FeasibleSetProjector proj(problem.constraint_matrix(),
                                  problem.constraint_targets());
  // Least-squares solution of the equalities, pushed into the feasible set.
  const Eigen::VectorXd ls = proj.onto_affine(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.dim) * problem.dim));
  const Eigen::VectorXd init = proj.onto_intersection(ls, 100000);
  if (proj.affine_residual(init) > 1e-9 || init.minCoeff() < -1e-9)
    throw infeasible_error("no nonnegative lambda grid satisfies the observed rates");
  return max_entropy_lambda(problem, init);
}

OracleResult max_entropy_lambda(const ConstrainedProblem& problem,
                                const Eigen::VectorXd& init) {
  problem.validate();
  const int d = problem.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  if (init.size() != n) throw std::invalid_argument("initial point has wrong size");
  const FeasibleSetProjector proj(problem.constraint_matrix(),
                                  problem.constraint_targets());

  Eigen::VectorXd x = proj.onto_intersection(init);
  if (proj.affine_residual(x) > 1e-9 || x.minCoeff() < -1e-9)
    throw infeasible_error("no nonnegative lambda grid satisfies the observed rates");

  double h = entropy_bits_of(x);
  Eigen::VectorXd x_prev = x;
  double step = 0.5;
  long momentum_age = 0;

  constexpr int kStallWindow = 50;
  std::vector<double> history;
  history.reserve(kStallWindow + 1);

  long iter = 0;
  bool converged = false;
  for (; iter < problem.max_iterations; ++iter) {
    // Momentum extrapolation; affine feasibility survives the affine
    // combination, only negativity can appear and the projection fixes it.
    const double beta =
        static_cast<double>(momentum_age) / (momentum_age + 3.0);
    const Eigen::VectorXd y = x + beta * (x - x_prev);
    Eigen::VectorXd cand = proj.onto_intersection(y + step * entropy_gradient(y));
    double hc = entropy_bits_of(cand);

    if (hc >= h) {
      x_prev = x;
      x = cand;
      h = hc;
      ++momentum_age;
      step = std::min(step * 1.25, 1e3);
    } else {
      // Restart momentum and backtrack from the incumbent.
      momentum_age = 0;
      const Eigen::VectorXd g = entropy_gradient(x);
      bool improved = false;
      while (step > 1e-14) {
        cand = proj.onto_intersection(x + step * g);
        hc = entropy_bits_of(cand);
        if (hc > h) {
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (improved) {
        x_prev = x;
        x = cand;
        h = hc;
      } else {
        // Projection stalls: multiplicative (mirror) update, then project.
        Eigen::VectorXd mult(n);
        double tau = 1.0;
        bool mirror_improved = false;
        for (int attempt = 0; attempt < 20; ++attempt) {
          for (Eigen::Index i = 0; i < n; ++i)
            mult(i) = std::max(x(i), 1e-18) * std::exp2(tau * g(i));
          mult *= 1.0 / mult.sum();
          cand = proj.onto_intersection(mult);
          hc = entropy_bits_of(cand);
          if (hc > h) {
            mirror_improved = true;
            break;
          }
          tau *= 0.5;
        }
        if (mirror_improved) {
          x_prev = x;
          x = cand;
          h = hc;
        }
        step = std::max(step, 1e-6);
      }
    }

    history.push_back(h);
    if (history.size() > static_cast<std::size_t>(kStallWindow)) {
      const double gain = h - history[history.size() - 1 - kStallWindow];
      if (gain < 1e-12 && proj.affine_residual(x) < problem.tolerance) {
        converged = true;
        ++iter;
        break;
      }
    }
  }
  if (!converged)
    throw convergence_error("entropy maximization hit the iteration cap");

  OracleResult result;
  Eigen::MatrixXd grid(d, d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta) grid(alpha, beta) = x(alpha * d + beta);
  result.lambda_star = BellDiagonalState(d, std::move(grid));
  result.entropy_bits = h;
  result.rate = std::log2(static_cast<double>(d)) - h;
  result.iterations = iter;
  result.constraint_residual = proj.affine_residual(x);
  result.stationarity =
      (x - proj.onto_intersection(x + entropy_gradient(x))).norm();
  return result;
}

double oracle_rate(const ConstrainedProblem& problem) {
  return max_entropy_lambda(problem).rate;
}

Eigen::VectorXd random_feasible_interior(const ConstrainedProblem& problem,
                                         std::uint64_t seed) {
  problem.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(problem.dim) * problem.dim;
  const FeasibleSetProjector proj(problem.constraint_matrix(),
                                  problem.constraint_targets());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.25, 1.75);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(rng) / static_cast<double>(n);
  x = proj.onto_intersection(x, 100000);
  if (proj.affine_residual(x) > 1e-9)
    throw infeasible_error("no nonnegative lambda grid satisfies the observed rates");
  return x;
}

}  // namespace hdqkd
