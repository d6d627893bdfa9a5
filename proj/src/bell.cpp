#include "hdqkd/bell.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace hdqkd {

namespace {

// Side length d of a bipartite d (x) d operator; rejects non-square inputs.
int bipartite_dim(const DensityMatrix& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(rho.rows()))));
  if (static_cast<long long>(d) * d != rho.rows() || d < 2)
    throw std::invalid_argument("density matrix must act on a d x d bipartite space with d >= 2");
  return d;
}

}  // namespace

BellDiagonalState::BellDiagonalState(int d, Eigen::MatrixXd grid)
    : dim(require_dimension(d)), lambdas(std::move(grid)) {
  if (lambdas.rows() != dim || lambdas.cols() != dim)
    throw std::invalid_argument("lambda grid must be d x d");
}

void BellDiagonalState::validate() const {
  require_dimension(dim);
  if (lambdas.rows() != dim || lambdas.cols() != dim)
    throw std::invalid_argument("lambda grid must be d x d");
  if (lambdas.minCoeff() < -1e-12)
    throw std::invalid_argument("lambda coefficients must be >= -1e-12");
  if (std::abs(lambdas.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("lambda coefficients must sum to 1 within 1e-10");
}

ErrorRateSet::ErrorRateSet(int d, std::vector<double> qs)
    : dim(d), num_bases(static_cast<int>(qs.size())), rates(std::move(qs)) {
  validate();
}

ErrorRateSet ErrorRateSet::symmetric(int d, int m, double q) {
  return ErrorRateSet(d, std::vector<double>(static_cast<std::size_t>(m), q));
}

void ErrorRateSet::validate() const {
  require_dimension(dim);
  if (num_bases < 2 || num_bases > dim + 1)
    throw std::invalid_argument("number of measured bases must satisfy 2 <= m <= d+1");
  if (static_cast<int>(rates.size()) != num_bases)
    throw std::invalid_argument("rate list length must equal m");
  for (double q : rates)
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("error rates must lie in [0, 1]");
}

DensityMatrix symmetrize(const DensityMatrix& rho) {
  const int d = bipartite_dim(rho);
  DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta) {
      const DenseOperator u = kron(weyl_op(d, alpha, beta), weyl_op(d, alpha, -beta));
      out.noalias() += u * rho * u.adjoint();
    }
  return out / static_cast<double>(d) / static_cast<double>(d);
}

BellDiagonalState lambda_from_state(const DensityMatrix& rho_tilde, double tol) {
  const int d = bipartite_dim(rho_tilde);
  DenseOperator basis(d * d, d * d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta)
      basis.col(alpha * d + beta) = bell_basis_vector(d, alpha, beta);
  const DenseOperator in_bell = basis.adjoint() * rho_tilde * basis;

  double max_offdiag = 0.0;
  for (Eigen::Index i = 0; i < in_bell.rows(); ++i)
    for (Eigen::Index j = 0; j < in_bell.cols(); ++j)
      if (i != j) max_offdiag = std::max(max_offdiag, std::abs(in_bell(i, j)));
  if (max_offdiag > tol) throw not_bell_diagonal_error(max_offdiag);

  Eigen::MatrixXd grid(d, d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta)
      grid(alpha, beta) = in_bell(alpha * d + beta, alpha * d + beta).real();
  return BellDiagonalState(d, std::move(grid));
}

DensityMatrix state_from_lambda(const BellDiagonalState& bds) {
  bds.validate();
  const int d = bds.dim;
  DensityMatrix rho = DensityMatrix::Zero(d * d, d * d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta) {
      const double lambda = bds.lambda(alpha, beta);
      if (lambda == 0.0) continue;
      const StateVector phi = bell_basis_vector(d, alpha, beta);
      rho.noalias() += lambda * (phi * phi.adjoint());
    }
  return rho;
}

cxd weyl_coefficient(const DensityMatrix& rho, long long k, long long l) {
  const int d = bipartite_dim(rho);
  const DenseOperator u = kron(weyl_op(d, k, l), weyl_op(d, k, -l));
  return (u.adjoint() * rho).trace();
}

double error_rate_z(const BellDiagonalState& bds) {
  double correlated = 0.0;
  for (int beta = 0; beta < bds.dim; ++beta) correlated += bds.lambda(0, beta);
  return std::clamp(1.0 - correlated, 0.0, 1.0);
}

double error_rate_xzk(const BellDiagonalState& bds, int k) {
  if (k < 0 || k >= bds.dim) throw std::out_of_range("basis index k must lie in [0, d)");
  double correlated = 0.0;
  for (int alpha = 0; alpha < bds.dim; ++alpha)
    correlated += bds.lambda(alpha, mod_reduce(static_cast<long long>(k) * alpha, bds.dim));
  return std::clamp(1.0 - correlated, 0.0, 1.0);
}

double error_rate_in_basis(const DensityMatrix& rho, const Basis& basis) {
  const int d = bipartite_dim(rho);
  if (static_cast<int>(basis.size()) != d)
    throw std::invalid_argument("basis must contain d vectors");
  double correlated = 0.0;
  for (const StateVector& psi : basis) {
    if (psi.size() != d) throw std::invalid_argument("basis vector dimension mismatch");
    const StateVector pair = kron_vec(psi.conjugate(), psi);
    correlated += (pair.adjoint() * rho * pair)(0, 0).real();
  }
  return std::clamp(1.0 - correlated, 0.0, 1.0);
}

ErrorRateSet error_rates(const BellDiagonalState& bds, int m) {
  if (m < 2 || m > bds.dim + 1)
    throw std::invalid_argument("number of measured bases must satisfy 2 <= m <= d+1");
  std::vector<double> qs;
  qs.reserve(m);
  qs.push_back(error_rate_z(bds));
  for (int k = 0; k + 1 < m; ++k) qs.push_back(error_rate_xzk(bds, k));
  return ErrorRateSet(bds.dim, std::move(qs));
}

double von_neumann_entropy(const BellDiagonalState& bds) {
  double h = 0.0;
  for (int alpha = 0; alpha < bds.dim; ++alpha)
    for (int beta = 0; beta < bds.dim; ++beta)
      h += entropy_term(bds.lambda(alpha, beta));
  return h;
}

void validate_density_matrix(const DensityMatrix& rho, int expected_dim) {
  if (rho.rows() != expected_dim || rho.cols() != expected_dim)
    throw std::invalid_argument("density matrix has wrong dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("density matrix is not Hermitian within 1e-12");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw std::invalid_argument("density matrix trace differs from 1 by more than 1e-10");
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix has eigenvalue below -1e-10");
}

DensityMatrix random_density_matrix(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DensityMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cxd(gauss(rng), gauss(rng));
  DensityMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace hdqkd
