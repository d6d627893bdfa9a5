#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hdqkd/weyl.hpp"

namespace hdqkd {

using DensityMatrix = Eigen::MatrixXcd;  // bipartite, d^2 x d^2

/// Bell-diagonal state: the d x d grid of coefficients lambda_{alpha,beta}
/// in rho = sum lambda_{alpha,beta} |phi_{alpha,beta}><phi_{alpha,beta}|.
struct BellDiagonalState {
  int dim = 0;
  Eigen::MatrixXd lambdas;  // (alpha, beta); alpha = X power, beta = Z power

  BellDiagonalState() = default;
  BellDiagonalState(int d, Eigen::MatrixXd grid);

  /// Coefficient clamped to 0 from below (tiny negatives are arithmetic noise).
  double lambda(int alpha, int beta) const {
    return std::max(0.0, lambdas(alpha, beta));
  }
  double sum() const { return lambdas.sum(); }

  /// Enforces lambda >= -1e-12 entrywise and sum(lambda) = 1 within 1e-10.
  void validate() const;
};

/// Observed error rates [Q_Z, Q_X, Q_XZ, ..., Q_XZ^{m-2}] for m measured bases.
struct ErrorRateSet {
  int dim = 0;
  int num_bases = 0;  // m
  std::vector<double> rates;

  ErrorRateSet() = default;
  ErrorRateSet(int d, std::vector<double> qs);
  static ErrorRateSet symmetric(int d, int m, double q);

  void validate() const;  // 2 <= m <= d+1, each rate in [0,1], size == m
};

/// Twirl over X^a Z^b (x) X^a Z^{-b}; output is Bell-diagonal.
DensityMatrix symmetrize(const DensityMatrix& rho);

/// Bell-basis diagonal of a (Bell-diagonal) state. Throws
/// not_bell_diagonal_error if any off-diagonal Bell element exceeds `tol`.
BellDiagonalState lambda_from_state(const DensityMatrix& rho_tilde,
                                    double tol = 1e-8);

/// sum_{alpha,beta} lambda_{alpha,beta} |phi_{alpha,beta}><phi_{alpha,beta}|.
DensityMatrix state_from_lambda(const BellDiagonalState& bds);

/// r_{k,l} = Tr[(X^k Z^l (x) X^k Z^{-l})^dagger rho]. For a symmetrized
/// state, (1/d^2) sum_{k,l} r_{k,l} X^k Z^l (x) X^k Z^{-l} reproduces it.
cxd weyl_coefficient(const DensityMatrix& rho, long long k, long long l);

/// Q_Z = 1 - sum_alpha lambda_{0,alpha}.
double error_rate_z(const BellDiagonalState& bds);

/// Q_{XZ^k} = 1 - sum_alpha lambda_{alpha, k*alpha mod d}.
double error_rate_xzk(const BellDiagonalState& bds, int k);

/// 1 - sum_j <psi*_j psi_j| rho |psi*_j psi_j>, with the complex conjugate
/// taken on Alice's side. For the Z basis this reduces to
/// 1 - sum_j <jj|rho|jj>.
double error_rate_in_basis(const DensityMatrix& rho, const Basis& basis);

/// All m error rates of a Bell-diagonal state (Q_Z first).
ErrorRateSet error_rates(const BellDiagonalState& bds, int m);

/// H(A,B) = -sum lambda log2 lambda in bits (Bell basis is orthogonal, so
/// the lambdas are the eigenvalues).
double von_neumann_entropy(const BellDiagonalState& bds);

/// Hermiticity within 1e-12, unit trace within 1e-10, smallest eigenvalue
/// >= -1e-10. Throws std::invalid_argument on violation.
void validate_density_matrix(const DensityMatrix& rho, int expected_dim);

/// Seeded Wishart-type random state G G^dagger / Tr on a `dim`-dimensional
/// space (pass d^2 for a bipartite state).
DensityMatrix random_density_matrix(int dim, std::uint64_t seed);

}  // namespace hdqkd
