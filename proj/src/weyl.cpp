#include "hdqkd/weyl.hpp"

#include <cmath>

namespace hdqkd {

cxd root_of_unity(int d, long long power) {
  // Reduce first so the angle stays small and the phase stays accurate.
  const int r = mod_reduce(power, d);
  return std::polar(1.0, 2.0 * M_PI * r / d);
}

DenseOperator shift_op(int d) {
  require_dimension(d);
  DenseOperator x = DenseOperator::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return x;
}

DenseOperator clock_op(int d) {
  require_dimension(d);
  DenseOperator z = DenseOperator::Zero(d, d);
  for (int j = 0; j < d; ++j) z(j, j) = root_of_unity(d, j);
  return z;
}

DenseOperator weyl_op(int d, long long alpha, long long beta) {
  require_dimension(d);
  const int a = mod_reduce(alpha, d);
  DenseOperator op = DenseOperator::Zero(d, d);
  // X^a Z^b |j> = w^{b j} |j+a>
  for (int j = 0; j < d; ++j) op((j + a) % d, j) = root_of_unity(d, beta * j);
  return op;
}

StateVector bell_state(int d) {
  require_dimension(d);
  StateVector v = StateVector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) v(j * d + j) = amp;
  return v;
}

StateVector bell_basis_vector(int d, long long alpha, long long beta) {
  require_dimension(d);
  const int a = mod_reduce(alpha, d);
  StateVector v = StateVector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  // (1 (x) X^a Z^b) |phi+> = (1/sqrt(d)) sum_j w^{b j} |j, j+a>
  for (int j = 0; j < d; ++j)
    v(j * d + (j + a) % d) = amp * root_of_unity(d, beta * j);
  return v;
}

StateVector mub_vector(int d, int k, int j) {
  require_dimension(d);
  if (k < 0 || k >= d || j < 0 || j >= d)
    throw std::out_of_range("mub_vector: indices must lie in [0, d)");
  StateVector v(d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int l = 0; l < d; ++l) {
    double angle;
    if (d % 2 == 1) {
      const long long e = static_cast<long long>(l) * j +
                          static_cast<long long>(k) * l * (l - 1) / 2;
      angle = 2.0 * M_PI * mod_reduce(e, d) / d;
    } else {
      // exponent l*j + k*l^2/2 in units of 2*pi/d, i.e. (2*l*j + k*l^2)
      // in units of pi/d; reduce mod 2d.
      const long long e2 = 2LL * l * j + static_cast<long long>(k) * l * l;
      angle = M_PI * mod_reduce(e2, 2 * d) / d;
    }
    v(l) = std::polar(amp, angle);
  }
  return v;
}

Basis mub_basis(int d, int k) {
  Basis basis;
  basis.reserve(d);
  for (int j = 0; j < d; ++j) basis.push_back(mub_vector(d, k, j));
  return basis;
}

Basis computational_basis(int d) {
  require_dimension(d);
  Basis basis;
  basis.reserve(d);
  for (int j = 0; j < d; ++j) {
    StateVector v = StateVector::Zero(d);
    v(j) = 1.0;
    basis.push_back(v);
  }
  return basis;
}

double check_mutually_unbiased(const Basis& a, const Basis& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty basis");
  const Eigen::Index d = a.front().size();
  for (const auto& v : a)
    if (v.size() != d) throw std::invalid_argument("basis dimension mismatch");
  for (const auto& v : b)
    if (v.size() != d) throw std::invalid_argument("basis dimension mismatch");
  const double target = 1.0 / static_cast<double>(d);
  double deviation = 0.0;
  for (const auto& va : a)
    for (const auto& vb : b) {
      const double overlap = std::norm(va.dot(vb));
      deviation = std::max(deviation, std::abs(overlap - target));
    }
  return deviation;
}

int max_num_mubs(int d) {
  require_dimension(d);
  return is_prime(d) ? d + 1 : 3;
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
  DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

StateVector kron_vec(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace hdqkd
