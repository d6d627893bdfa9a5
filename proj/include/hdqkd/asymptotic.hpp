#pragma once

#include <vector>

#include "hdqkd/bell.hpp"

namespace hdqkd {

/// Entropy-maximizing Bell-coefficient pattern for m measured bases and the
/// resulting Devetak-Winter asymptotic key rate (bits per sifted symbol).
///
/// The pattern places `lambda00` at (0,0), `lambdaZ` on the remaining Z-set
/// cells, `lambdaK[k]` on the remaining XZ^k-set cells, and the common free
/// coefficient `eta` on every cell not constrained by a measured rate.
struct AsymptoticSolution {
  int dim = 0;
  int num_bases = 0;
  double q = 0;    // (Q_Z + sum_k Q_{XZ^k}) / (m-1)
  double v = 0;    // (d-1)(d-(m-1))/(m-1); zero when m = d+1
  double eta = 0;  // free coefficient; multiplicity (d-1)(d+1-m)
  double lambda00 = 0;
  double lambdaZ = 0;
  std::vector<double> lambdaK;  // size m-1
  double rate = 0;
};

/// Binary Shannon entropy h(Q) in bits; endpoints map to 0.
double shannon_binary(double q);

/// Closed-form rate for m = 2:
/// log2 d - h(Q_X) - h(Q_Z) - (Q_X + Q_Z) log2(d-1).
double rate_two_mubs(int d, double qx, double qz);

/// Closed-form rate for m = d+1 with rates [Q_Z, Q_X, ..., Q_XZ^{d-1}].
/// Throws infeasible_error unless q - Q_i >= 0 for all i and q <= 1.
double rate_max_mubs(int d, const std::vector<double>& rates);

/// m = d+1 with all rates equal: log2 d - h(q) - q log2(d^2-1),
/// q = (d+1) Q / d. Requires Q in [0, d/(d+1)].
double rate_max_mubs_symmetric(int d, double q);

/// Solves the degree-m polynomial condition for eta on its feasible
/// interval and returns the rate-minimizing feasible solution.
///
/// For non-prime d the pattern is only meaningful for m <= 3 (and m = d+1
/// at prime-power d); other combinations require allow_nonprime = true.
AsymptoticSolution solve_eta(const ErrorRateSet& observed,
                             bool allow_nonprime = false);

/// Asymptotic key rate for any 2 <= m <= d+1. May be negative; callers
/// that report to users clamp at zero.
double rate_general(const ErrorRateSet& observed, bool allow_nonprime = false);

/// rate_general with all m rates equal to q.
double rate_general_symmetric(int d, int m, double q,
                              bool allow_nonprime = false);

/// Smallest Q > 0 with rate_general(d, m, symmetric Q) = 0, bisected to 1e-8.
double max_tolerable_q(int d, int m, bool allow_nonprime = false);

/// Expands the solution pattern into a full d x d lambda grid. Throws
/// std::invalid_argument if two constrained cell sets collide (possible only
/// for non-prime d with m > 3).
BellDiagonalState lambda_grid_from_solution(const AsymptoticSolution& sol);

}  // namespace hdqkd
