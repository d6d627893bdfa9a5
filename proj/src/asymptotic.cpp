#include "hdqkd/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdqkd {

namespace {

// The lambda pattern (and hence the rate formula) is established for all d
// when m <= 3, for prime d up to m = d+1, and for m = d+1 at prime powers.
// Anything else is computable but carries no security statement; callers
// must opt in.
void gate_nonprime(int d, int m, bool allow_nonprime) {
  if (m <= 3 || is_prime(d)) return;
  if (m == d + 1 && is_prime_power(d)) return;
  if (!allow_nonprime)
    throw std::invalid_argument(
        "m > 3 with non-prime dimension is outside the guaranteed-MUB regime; "
        "pass allow_nonprime to compute anyway");
}

double entropy_of_pattern(int d, int m, double lambda00, double lambdaZ,
                          const std::vector<double>& lambdaK, double eta) {
  double h = entropy_term(std::max(0.0, lambda00));
  h += (d - 1) * entropy_term(std::max(0.0, lambdaZ));
  for (double lk : lambdaK) h += (d - 1) * entropy_term(std::max(0.0, lk));
  const double eta_count = static_cast<double>(d - 1) * (d + 1 - m);
  h += eta_count * entropy_term(std::max(0.0, eta));
  return h;
}

// Literal rate expression in terms of q, v, eta; requires every log
// argument positive (equivalently, a strictly interior lambda pattern).
double rate_closed_expression(int d, int m, double q, double v, double eta,
                              const std::vector<double>& rates) {
  double r = std::log2(static_cast<double>(d) / (d - 1)) -
             (m - 1) * (1.0 - q) * std::log2(eta * (d - 1));
  for (double qi : rates) r += (1.0 - qi) * std::log2(q - qi - v * eta);
  return r;
}

AsymptoticSolution make_pattern(const ErrorRateSet& observed, double q,
                                double v, double eta) {
  const int d = observed.dim;
  const int m = observed.num_bases;
  AsymptoticSolution sol;
  sol.dim = d;
  sol.num_bases = m;
  sol.q = q;
  sol.v = v;
  sol.eta = eta;
  const double slope = static_cast<double>(d - (m - 1)) / (m - 1);
  sol.lambdaZ = (q - observed.rates[0]) / (d - 1) - slope * eta;
  sol.lambdaK.resize(m - 1);
  for (int k = 0; k + 1 < m; ++k)
    sol.lambdaK[k] = (q - observed.rates[k + 1]) / (d - 1) - slope * eta;
  sol.lambda00 = 1.0 - q + v * eta;
  return sol;
}

bool pattern_feasible(const AsymptoticSolution& s) {
  if (s.eta < -1e-12 || s.lambda00 < -1e-12 || s.lambdaZ < -1e-12) return false;
  for (double lk : s.lambdaK)
    if (lk < -1e-12) return false;
  return true;
}

bool pattern_interior(const AsymptoticSolution& s) {
  if (!(s.eta > 0.0 && s.lambda00 > 0.0 && s.lambdaZ > 0.0)) return false;
  for (double lk : s.lambdaK)
    if (!(lk > 0.0)) return false;
  return true;
}

double pattern_rate(const AsymptoticSolution& s,
                    const std::vector<double>& rates) {
  if (s.num_bases < s.dim + 1 && pattern_interior(s))
    return rate_closed_expression(s.dim, s.num_bases, s.q, s.v, s.eta, rates);
  // Boundary patterns (some coefficient exactly zero) take the 0 log 0 = 0
  // limit of the same expression.
  return std::log2(static_cast<double>(s.dim)) -
         entropy_of_pattern(s.dim, s.num_bases, s.lambda00, s.lambdaZ,
                            s.lambdaK, s.eta);
}

}  // namespace

double shannon_binary(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("shannon_binary: argument must lie in [0, 1]");
  return entropy_term(q) + entropy_term(1.0 - q);
}

double rate_two_mubs(int d, double qx, double qz) {
  require_dimension(d);
  if (!(qx >= 0.0 && qx <= 1.0 && qz >= 0.0 && qz <= 1.0))
    throw std::invalid_argument("error rates must lie in [0, 1]");
  return std::log2(static_cast<double>(d)) - shannon_binary(qx) -
         shannon_binary(qz) - (qx + qz) * std::log2(static_cast<double>(d - 1));
}

double rate_max_mubs(int d, const std::vector<double>& rates) {
  require_dimension(d);
  if (static_cast<int>(rates.size()) != d + 1)
    throw std::invalid_argument("rate_max_mubs expects exactly d+1 rates");
  const double q = std::accumulate(rates.begin(), rates.end(), 0.0) / d;
  if (q > 1.0 + 1e-14)
    throw infeasible_error("averaged error rate q exceeds 1");
  for (double qi : rates) {
    if (!(qi >= 0.0 && qi <= 1.0))
      throw std::invalid_argument("error rates must lie in [0, 1]");
    if (q - qi < -1e-14)
      throw infeasible_error("q - Q_i < 0: no nonnegative lambda pattern matches these rates");
  }
  double r = std::log2(static_cast<double>(d)) + xlog2x(1.0 - q) -
             q * std::log2(static_cast<double>(d - 1));
  for (double qi : rates) r += xlog2x(std::max(0.0, q - qi));
  return r;
}

double rate_max_mubs_symmetric(int d, double q) {
  require_dimension(d);
  if (!(q >= 0.0 && q <= static_cast<double>(d) / (d + 1)))
    throw std::invalid_argument("symmetric rate must lie in [0, d/(d+1)]");
  const double avg = (d + 1) * q / d;
  return std::log2(static_cast<double>(d)) - shannon_binary(avg) -
         avg * std::log2(static_cast<double>(d) * d - 1.0);
}

namespace {

AsymptoticSolution solve_eta_impl(const ErrorRateSet& observed,
                                  bool allow_nonprime, int scan_samples);

}  // namespace

AsymptoticSolution solve_eta(const ErrorRateSet& observed, bool allow_nonprime) {
  return solve_eta_impl(observed, allow_nonprime, 2048);
}

namespace {

AsymptoticSolution solve_eta_impl(const ErrorRateSet& observed,
                                  bool allow_nonprime, int scan_samples) {
  observed.validate();
  const int d = observed.dim;
  const int m = observed.num_bases;
  gate_nonprime(d, m, allow_nonprime);
  const std::vector<double>& rates = observed.rates;

  const double sum_q = std::accumulate(rates.begin(), rates.end(), 0.0);
  const double q = sum_q / (m - 1);
  const double v = static_cast<double>(d - 1) * (d - (m - 1)) / (m - 1);

  if (q > 1.0 + 1e-14) throw infeasible_error("averaged error rate q exceeds 1");
  for (double qi : rates)
    if (q - qi < -1e-14)
      throw infeasible_error("q - Q_i < 0: no nonnegative lambda pattern matches these rates");

  if (m == d + 1) {
    // Every coefficient appears in exactly one constraint; nothing is free.
    AsymptoticSolution sol = make_pattern(observed, q, 0.0, 0.0);
    sol.rate = pattern_rate(sol, rates);
    return sol;
  }

  if (sum_q == 0.0) {
    AsymptoticSolution sol = make_pattern(observed, 0.0, v, 0.0);
    sol.rate = std::log2(static_cast<double>(d));
    return sol;
  }

  // lambda_k >= 0 caps eta; within (0, eta_upper) every pattern entry is
  // positive, so the polynomial condition can be compared in log domain.
  double eta_upper = std::numeric_limits<double>::infinity();
  const double slope = static_cast<double>(d - 1) * (d - (m - 1));
  for (double qi : rates)
    eta_upper = std::min(eta_upper, (m - 1) * (q - qi) / slope);

  if (!(eta_upper > 0.0)) {
    // Some rate equals q exactly: the free coefficient is pinned to zero.
    AsymptoticSolution sol = make_pattern(observed, q, v, 0.0);
    sol.rate = pattern_rate(sol, rates);
    return sol;
  }

  // Residual of the degree-m condition in log form,
  //   g(eta) = ln[(d-1)^m (1-q+v eta) eta^{m-1}] - sum_i ln(q - Q_i - v eta),
  // which is strictly increasing on (0, eta_upper) since v > 0 for m < d+1.
  const auto residual = [&](double eta) {
    const double lead = 1.0 - q + v * eta;
    if (!(lead > 0.0)) return -std::numeric_limits<double>::infinity();
    double g = std::log(lead) + (m - 1) * std::log(eta) +
               m * std::log(static_cast<double>(d - 1));
    for (double qi : rates) {
      const double factor = q - qi - v * eta;
      if (!(factor > 0.0)) return std::numeric_limits<double>::infinity();
      g -= std::log(factor);
    }
    return g;
  };
  const auto residual_slope = [&](double eta) {
    double g = v / (1.0 - q + v * eta) + (m - 1) / eta;
    for (double qi : rates) g += v / (q - qi - v * eta);
    return g;
  };

  // Bisect between an end with negative residual and one with nonnegative
  // residual (in either order), then polish with safeguarded Newton steps.
  const auto refine_root = [&](double neg_end, double pos_end) {
    for (int it = 0; it < 200 && std::abs(pos_end - neg_end) > 1e-16 * eta_upper; ++it) {
      const double mid = 0.5 * (neg_end + pos_end);
      if (residual(mid) < 0.0)
        neg_end = mid;
      else
        pos_end = mid;
    }
    const double lo = std::min(neg_end, pos_end);
    const double hi = std::max(neg_end, pos_end);
    double eta = 0.5 * (lo + hi);
    for (int it = 0; it < 12; ++it) {
      const double g = residual(eta);
      if (!std::isfinite(g)) break;
      const double step = g / residual_slope(eta);
      const double next = eta - step;
      if (!(next >= lo && next <= hi)) break;
      eta = next;
      if (std::abs(step) < 1e-18 * eta_upper) break;
    }
    return eta;
  };

  // Scan the feasible interval, bracket every sign change, refine each.
  // The endpoints behave as g(0+) = -inf and g(eta_upper-) = +inf, so at
  // least one root is always bracketed. (g is in fact strictly increasing
  // here since v > 0 for m < d+1, so the scan finds exactly one bracket;
  // it stays as a cheap safety net against multiple roots.)
  std::vector<double> roots;
  double prev_eta = std::numeric_limits<double>::min();
  double prev_g = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= scan_samples + 1; ++i) {
    double eta_i, g_i;
    if (i == scan_samples + 1) {
      eta_i = eta_upper;
      g_i = std::numeric_limits<double>::infinity();
    } else {
      eta_i = eta_upper * i / (scan_samples + 1);
      g_i = residual(eta_i);
    }
    if ((prev_g < 0.0) && (g_i >= 0.0)) roots.push_back(refine_root(prev_eta, eta_i));
    if ((prev_g >= 0.0) && (g_i < 0.0)) roots.push_back(refine_root(eta_i, prev_eta));
    prev_eta = eta_i;
    prev_g = g_i;
  }

  AsymptoticSolution best;
  bool have_best = false;
  for (double eta : roots) {
    AsymptoticSolution cand = make_pattern(observed, q, v, eta);
    if (!pattern_feasible(cand)) continue;
    cand.rate = pattern_rate(cand, rates);
    if (!have_best || cand.rate < best.rate) {
      best = cand;
      have_best = true;
    }
  }
  if (!have_best)
    throw infeasible_error("no feasible root of the eta condition was found");
  return best;
}

}  // namespace

double rate_general(const ErrorRateSet& observed, bool allow_nonprime) {
  return solve_eta(observed, allow_nonprime).rate;
}

double rate_general_symmetric(int d, int m, double q, bool allow_nonprime) {
  // Hot path of the finite-key optimizer. The eta residual is strictly
  // monotone, so a single bracket replaces the full scan; tests pin this
  // against the scanning route.
  return solve_eta_impl(ErrorRateSet::symmetric(d, m, q), allow_nonprime, 1).rate;
}

double max_tolerable_q(int d, int m, bool allow_nonprime) {
  require_dimension(d);
  if (m < 2 || m > d + 1)
    throw std::invalid_argument("number of measured bases must satisfy 2 <= m <= d+1");
  gate_nonprime(d, m, allow_nonprime);

  // q = m Q / (m-1) must stay below 1, so Q < (m-1)/m.
  const double q_domain = (static_cast<double>(m - 1) / m) * (1.0 - 1e-12);
  const auto rate_at = [&](double q) {
    return rate_general_symmetric(d, m, q, allow_nonprime);
  };

  constexpr int kBracketSteps = 512;
  double lo = 0.0;
  double hi = q_domain;
  bool bracketed = false;
  for (int i = 1; i <= kBracketSteps; ++i) {
    const double q = q_domain * i / kBracketSteps;
    if (rate_at(q) <= 0.0) {
      hi = q;
      bracketed = true;
      break;
    }
    lo = q;
  }
  if (!bracketed)
    throw convergence_error("rate does not reach zero inside the symmetric-rate domain");

  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

BellDiagonalState lambda_grid_from_solution(const AsymptoticSolution& sol) {
  const int d = sol.dim;
  const int m = sol.num_bases;
  require_dimension(d);
  Eigen::MatrixXd grid =
      Eigen::MatrixXd::Constant(d, d, std::max(0.0, sol.eta));
  Eigen::MatrixXi owner = Eigen::MatrixXi::Constant(d, d, -1);

  grid(0, 0) = std::max(0.0, sol.lambda00);
  owner(0, 0) = 0;
  for (int beta = 1; beta < d; ++beta) {
    grid(0, beta) = std::max(0.0, sol.lambdaZ);
    owner(0, beta) = 1;
  }
  for (int k = 0; k + 1 < m; ++k)
    for (int alpha = 1; alpha < d; ++alpha) {
      const int beta = mod_reduce(static_cast<long long>(k) * alpha, d);
      if (owner(alpha, beta) != -1)
        throw std::invalid_argument(
            "constraint cell sets collide; the lambda pattern is not "
            "well-defined for this (d, m)");
      grid(alpha, beta) = std::max(0.0, sol.lambdaK[k]);
      owner(alpha, beta) = 2 + k;
    }
  return BellDiagonalState(d, std::move(grid));
}

}  // namespace hdqkd
