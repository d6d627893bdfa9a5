#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hdqkd {

using cxd = std::complex<double>;

inline constexpr const char* kToolName = "hd-qkd-ratekit";
inline constexpr const char* kVersion = "1.0";

/// Rates or coefficient patterns that cannot be realized by any
/// nonnegative Bell-coefficient assignment.
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before meeting tolerance.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input state failed the Bell-diagonality check; carries the largest
/// off-diagonal magnitude found.
class not_bell_diagonal_error : public std::runtime_error {
 public:
  explicit not_bell_diagonal_error(double max_offdiag)
      : std::runtime_error("state is not Bell-diagonal: max off-diagonal " +
                           std::to_string(max_offdiag)),
        max_offdiag_(max_offdiag) {}
  double max_offdiag() const { return max_offdiag_; }

 private:
  double max_offdiag_;
};

inline int require_dimension(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2, got " + std::to_string(d));
  return d;
}

/// Canonical representative of x mod d in [0, d).
inline int mod_reduce(long long x, int d) {
  long long r = x % d;
  if (r < 0) r += d;
  return static_cast<int>(r);
}

/// -p log2 p with the 0 log 0 = 0 convention.
inline double entropy_term(double p) {
  return p > 0.0 ? -p * std::log2(p) : 0.0;
}

/// x log2 x with the 0 log 0 = 0 convention.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; static_cast<long long>(p) * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

/// True for p^k with p prime, k >= 1 (diagnostic only; no basis
/// construction depends on this).
inline bool is_prime_power(int n) {
  if (n < 2) return false;
  for (int p = 2; p <= n; ++p) {
    if (!is_prime(p)) continue;
    if (n % p != 0) continue;
    int m = n;
    while (m % p == 0) m /= p;
    return m == 1;
  }
  return false;
}

}  // namespace hdqkd
