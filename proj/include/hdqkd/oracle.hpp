#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hdqkd/bell.hpp"

namespace hdqkd {

/// Maximize the Bell-coefficient entropy subject to the observed error
/// rates, by brute-force convex optimization over the d^2 coefficients.
/// Deliberately ignorant of the analytic lambda pattern: the constraint
/// sets are encoded straight from the error-rate definitions
///   Q_Z uses cells (0, alpha),  Q_{XZ^k} uses cells (alpha, k*alpha mod d),
/// sharing only (0, 0).
struct ConstrainedProblem {
  int dim = 0;
  int num_bases = 0;               // m
  std::vector<double> rates;       // [Q_Z, Q_X, ..., Q_XZ^{m-2}]
  double tolerance = 1e-10;        // constraint residual target
  long max_iterations = 200000;

  ConstrainedProblem() = default;
  ConstrainedProblem(const ErrorRateSet& observed)
      : dim(observed.dim), num_bases(observed.num_bases), rates(observed.rates) {}
  ConstrainedProblem(int d, std::vector<double> qs);

  void validate() const;
  /// Equality-constraint matrix: normalization row plus one row per rate.
  Eigen::MatrixXd constraint_matrix() const;
  Eigen::VectorXd constraint_targets() const;
};

struct OracleResult {
  BellDiagonalState lambda_star;
  double entropy_bits = 0;
  double rate = 0;  // log2 d - entropy_bits
  long iterations = 0;
  double constraint_residual = 0;
  double stationarity = 0;  // |x - proj(x + grad)|
};

/// Projected gradient ascent on the entropy with Dykstra projections onto
/// {A lambda = b} intersected with the nonnegative orthant; backtracking
/// line search, momentum with function-value restarts, and a multiplicative
/// (mirror-descent) fallback when projection steps stall.
OracleResult max_entropy_lambda(const ConstrainedProblem& problem);
OracleResult max_entropy_lambda(const ConstrainedProblem& problem,
                                const Eigen::VectorXd& init);

/// log2 d - H(lambda*): the verified Devetak-Winter rate.
double oracle_rate(const ConstrainedProblem& problem);

/// A seeded feasible point away from the default initializer, for restart
/// agreement checks.
Eigen::VectorXd random_feasible_interior(const ConstrainedProblem& problem,
                                         std::uint64_t seed);

}  // namespace hdqkd
