#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdqkd/common.hpp"

namespace hdqkd {

using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Basis = std::vector<StateVector>;

/// Primitive d-th root of unity raised to `power`, exp(2*pi*i*power/d).
cxd root_of_unity(int d, long long power);

/// Shift operator X with X|j> = |j+1 mod d>.
DenseOperator shift_op(int d);

/// Clock operator Z = sum_j w^j |j><j|, w = exp(2*pi*i/d).
DenseOperator clock_op(int d);

/// X^alpha Z^beta (indices reduced mod d).
DenseOperator weyl_op(int d, long long alpha, long long beta);

/// Maximally entangled state (1/sqrt(d)) sum_j |jj> on the d^2 space.
StateVector bell_state(int d);

/// |phi_{alpha,beta}> = (1 (x) X^alpha Z^beta) |phi+>.
StateVector bell_basis_vector(int d, long long alpha, long long beta);

/// Normalized j-th eigenvector of X Z^k. Phase exponent is
/// l*j + k*l*(l-1)/2 for odd d and l*j + k*l^2/2 for even d, in units of
/// 2*pi/d; half-integer exponents are evaluated as exp(i*pi*k*l^2/d).
StateVector mub_vector(int d, int k, int j);

/// All d eigenvectors of X Z^k.
Basis mub_basis(int d, int k);

/// The computational (Z eigen-) basis.
Basis computational_basis(int d);

/// max over vector pairs of | |<a|b>|^2 - 1/d |. Zero iff the bases are
/// mutually unbiased.
double check_mutually_unbiased(const Basis& a, const Basis& b);

/// d+1 for prime d, else 3 (only Z, X, XZ are guaranteed unbiased).
int max_num_mubs(int d);

DenseOperator kron(const DenseOperator& a, const DenseOperator& b);
StateVector kron_vec(const StateVector& a, const StateVector& b);

}  // namespace hdqkd
