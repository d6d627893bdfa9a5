#include "hdqkd/finite.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hdqkd {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln 2

double log2_sum(double a, double b) {
  // log2(2^a + 2^b) without leaving the log domain.
  if (a < b) std::swap(a, b);
  return a + std::log2(1.0 + std::exp2(b - a));
}

}  // namespace

std::string to_string(BoundType b) {
  return b == BoundType::eur ? "eur" : "aep";
}
std::string to_string(AttackModel a) {
  return a == AttackModel::collective ? "collective" : "coherent";
}
std::string to_string(EpsMode e) { return e == EpsMode::derive ? "derive" : "fixed"; }

SecuritySplit SecuritySplit::from_linear(double eps, double eps_ec,
                                         double eps_pa, double eps_tot) {
  if (!(eps > 0 && eps_ec > 0 && eps_pa > 0 && eps_tot > 0))
    throw std::invalid_argument("security parameters must be strictly positive");
  SecuritySplit s;
  s.log2_eps = std::log2(eps);
  s.log2_eps_ec = std::log2(eps_ec);
  s.log2_eps_pa = std::log2(eps_pa);
  s.log2_eps_tot = std::log2(eps_tot);
  s.validate();
  return s;
}

SecuritySplit SecuritySplit::from_weights(double log2_eps_tot, double w_eps,
                                          double w_ec, double floor) {
  const double w_pa = 1.0 - w_eps - w_ec;
  if (!(w_eps >= floor * (1 - 1e-9) && w_ec >= floor * (1 - 1e-9) &&
        w_pa >= floor * (1 - 1e-9)))
    throw std::invalid_argument("split weights must respect the floor");
  SecuritySplit s;
  s.log2_eps = log2_eps_tot + std::log2(w_eps);
  s.log2_eps_ec = log2_eps_tot + std::log2(w_ec);
  s.log2_eps_pa = log2_eps_tot + std::log2(w_pa);
  s.log2_eps_tot = log2_eps_tot;
  return s;
}

void SecuritySplit::validate() const {
  if (!std::isfinite(log2_eps) || !std::isfinite(log2_eps_ec) ||
      !std::isfinite(log2_eps_pa) || !std::isfinite(log2_eps_tot))
    throw std::invalid_argument("security parameters must be strictly positive and finite");
  const double total = log2_sum(log2_sum(log2_eps, log2_eps_ec), log2_eps_pa);
  if (total > log2_eps_tot + 1e-9)
    throw std::invalid_argument("security split exceeds the total budget");
}

void FiniteScenario::validate() const {
  require_dimension(dim);
  if (num_bases < 2 || num_bases > dim + 1)
    throw std::invalid_argument("number of measured bases must satisfy 2 <= m <= d+1");
  if (!(total_rounds > 0) || !(test_rounds > 0) || !(test_rounds < total_rounds))
    throw std::invalid_argument("rounds must satisfy 0 < k < N");
  if (!(q_tol >= 0 && q_tol < 1))
    throw std::invalid_argument("tolerated error must lie in [0, 1)");
  const double c = incompatibility_bits();
  if (!(c > 0 && c <= std::log2(static_cast<double>(dim)) + 1e-12))
    throw std::invalid_argument("incompatibility must lie in (0, log2 d]");
  if (!(ec_efficiency >= 1.0))
    throw std::invalid_argument("error-correction factor f must be >= 1");
  if (!(pass_probability > 0 && pass_probability <= 1))
    throw std::invalid_argument("pass probability must lie in (0, 1]");
}

double mu_correction(double total_rounds, double test_rounds, double key_rounds,
                     int num_bases, double log2_eps_prime) {
  if (num_bases < 1) throw std::invalid_argument("number of bases must be positive");
  if (!(total_rounds > 0) || !(test_rounds > 0) || !(key_rounds > 0))
    throw std::invalid_argument("round counts must be positive");
  if (test_rounds < num_bases)
    throw std::invalid_argument("need at least one test round per basis (k >= m)");
  if (!(log2_eps_prime <= 0))
    throw std::invalid_argument("eps' must lie in (0, 1]");
  const double k_per_basis = test_rounds / num_bases;
  const double ln_inv_eps = -log2_eps_prime / kInvLn2;
  return std::sqrt(total_rounds * (k_per_basis + 1.0) * ln_inv_eps /
                   (key_rounds * k_per_basis * k_per_basis));
}

double leak_ec(double q, int d, double f) {
  require_dimension(d);
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("error rate must lie in [0, 1]");
  if (!(f >= 0)) throw std::invalid_argument("f must be nonnegative");
  return f * (shannon_binary(q) + q * std::log2(static_cast<double>(d - 1)));
}

double smooth_max_entropy_binomial(double n, int d, double x) {
  require_dimension(d);
  if (!(n >= 1)) throw std::invalid_argument("n must be >= 1");
  if (!(x >= 0 && x <= 1)) throw std::invalid_argument("x must lie in [0, 1]");
  const double cutoff = std::floor(n * x);
  if (cutoff > 2e7)
    throw std::invalid_argument("binomial diagnostic is limited to n*x <= 2e7 terms");
  const double log2_dm1 = std::log2(static_cast<double>(d - 1));
  double lse = 0.0;  // l = 0 term, log2 C(n,0) (d-1)^0 = 0
  for (double l = 1; l <= cutoff; ++l) {
    const double log2_binom =
        (std::lgamma(n + 1) - std::lgamma(l + 1) - std::lgamma(n - l + 1)) * kInvLn2;
    lse = log2_sum(lse, log2_binom + l * log2_dm1);
  }
  return lse;
}

RateResult eur_rate(const FiniteScenario& scenario, const SecuritySplit& split) {
  scenario.validate();
  split.validate();
  if (scenario.num_bases != 2)
    throw std::invalid_argument("the uncertainty-relation bound supports exactly two bases");

  RateResult res;
  res.bound = BoundType::eur;
  res.attack = AttackModel::collective;
  res.split = split;
  res.test_rounds = scenario.test_rounds;

  const double n = scenario.key_rounds();
  const double big_n = scenario.total_rounds;
  if (scenario.test_rounds < scenario.num_bases) return res;  // k < m: no estimate

  const double mu = mu_correction(big_n, scenario.test_rounds, n,
                                  scenario.num_bases, split.log2_eps);
  const double q_eff = scenario.q_tol + mu;
  if (q_eff > 0.5) return res;  // max-entropy bound valid only up to 1/2

  const int d = scenario.dim;
  const double hash_bits = (1.0 - split.log2_eps_ec)            // log2(2/eps_EC)
                           + (-2.0 - 2.0 * split.log2_eps_pa);  // 2 log2(1/(2 eps_PA))
  const double inner = scenario.incompatibility_bits() - shannon_binary(q_eff) -
                       q_eff * std::log2(static_cast<double>(d - 1)) -
                       leak_ec(q_eff, d, scenario.ec_efficiency) - hash_bits / n;
  const double raw = n / big_n * inner;
  if (raw > 0) {
    res.rate = raw;
    res.key_length = raw * big_n;
    res.feasible = true;
  }
  return res;
}

RateResult aep_rate(const FiniteScenario& scenario, const SecuritySplit& split) {
  scenario.validate();
  split.validate();

  RateResult res;
  res.bound = BoundType::aep;
  res.attack = AttackModel::collective;
  res.split = split;
  res.test_rounds = scenario.test_rounds;

  const double n = scenario.key_rounds();
  const double big_n = scenario.total_rounds;
  const int d = scenario.dim;
  const int m = scenario.num_bases;
  if (scenario.test_rounds < m) return res;

  const double mu =
      mu_correction(big_n, scenario.test_rounds, n, m, split.log2_eps);
  const double q_eff = scenario.q_tol + mu;
  // Symmetric rates q_eff in all m bases need the averaged rate m q/(m-1) < 1.
  if (!(q_eff < static_cast<double>(m - 1) / m)) return res;

  double r_asym;
  try {
    r_asym = rate_general_symmetric(d, m, q_eff, scenario.allow_nonprime);
  } catch (const infeasible_error&) {
    return res;
  }
  // The asymptotic optimum already accounts for leakage at f = 1; a less
  // efficient code leaks the surplus on top.
  if (scenario.ec_efficiency != 1.0)
    r_asym -= (scenario.ec_efficiency - 1.0) * leak_ec(q_eff, d, 1.0);

  const double hash_bits = -(1.0 + split.log2_eps_ec + 2.0 * split.log2_eps_pa);
  const double aep_penalty = 4.0 * std::sqrt(n) *
                             std::log2(2.0 + std::sqrt(static_cast<double>(d))) *
                             std::sqrt(1.0 - 2.0 * split.log2_eps);
  const double raw = n / big_n * r_asym - (hash_bits + aep_penalty) / big_n;
  if (raw > 0) {
    res.rate = raw;
    res.key_length = raw * big_n;
    res.feasible = true;
  }
  return res;
}

double coherent_damping(int d, double total_rounds) {
  const double dim = d;
  const double exponent = dim * dim * dim * dim - 1.0;
  return 2.0 * exponent * std::log2(total_rounds + 1.0) / total_rounds;
}

RateResult coherent_rate(const FiniteScenario& scenario,
                         const SecuritySplit& split, EpsMode mode) {
  scenario.validate();
  const double dim = scenario.dim;
  const double shift =
      (dim * dim * dim * dim - 1.0) * std::log2(scenario.total_rounds + 1.0);

  SecuritySplit collective_split = split;
  if (mode == EpsMode::derive) {
    collective_split.log2_eps -= shift;
    collective_split.log2_eps_ec -= shift;
    collective_split.log2_eps_pa -= shift;
    collective_split.log2_eps_tot -= shift;
  }

  RateResult res = aep_rate(scenario, collective_split);
  res.attack = AttackModel::coherent;
  res.log2_eps_coh = mode == EpsMode::derive ? split.log2_eps_tot
                                             : split.log2_eps_tot + shift;
  if (!res.feasible) return res;

  const double raw = res.rate - coherent_damping(scenario.dim, scenario.total_rounds);
  if (raw > 0) {
    res.rate = raw;
    res.key_length = raw * scenario.total_rounds;
  } else {
    res.rate = 0;
    res.key_length = 0;
    res.feasible = false;
  }
  return res;
}

namespace {

struct Candidate {
  double test_rounds = 0;
  double w_eps = 0;
  double w_ec = 0;
  RateResult result;
};

// rate first, then smaller k, then lexicographically smaller split.
bool better(const Candidate& a, const Candidate& b) {
  if (a.result.rate != b.result.rate) return a.result.rate > b.result.rate;
  if (a.test_rounds != b.test_rounds) return a.test_rounds < b.test_rounds;
  if (a.result.split.log2_eps != b.result.split.log2_eps)
    return a.result.split.log2_eps < b.result.split.log2_eps;
  if (a.result.split.log2_eps_ec != b.result.split.log2_eps_ec)
    return a.result.split.log2_eps_ec < b.result.split.log2_eps_ec;
  return a.result.split.log2_eps_pa < b.result.split.log2_eps_pa;
}

}  // namespace

RateResult optimize_rate(double total_rounds, int d, int m, double q_tol,
                         double log2_eps_budget, BoundType bound,
                         AttackModel attack, EpsMode mode,
                         double incompatibility, double f, bool allow_nonprime) {
  require_dimension(d);
  if (!(total_rounds >= m + 1))
    throw std::invalid_argument("total rounds must exceed the number of bases");
  if (bound == BoundType::eur && m != 2)
    throw std::invalid_argument("the uncertainty-relation bound supports exactly two bases");
  if (bound == BoundType::eur && attack == AttackModel::coherent)
    throw std::invalid_argument("the coherent-attack reduction is defined for the AEP bound");

  const auto evaluate = [&](double k, double w_eps, double w_ec) {
    FiniteScenario sc;
    sc.total_rounds = total_rounds;
    sc.test_rounds = k;
    sc.dim = d;
    sc.num_bases = m;
    sc.q_tol = q_tol;
    sc.incompatibility = incompatibility;
    sc.ec_efficiency = f;
    sc.allow_nonprime = allow_nonprime;
    const SecuritySplit sp = SecuritySplit::from_weights(log2_eps_budget, w_eps, w_ec);
    Candidate c;
    c.test_rounds = k;
    c.w_eps = w_eps;
    c.w_ec = w_ec;
    if (bound == BoundType::eur)
      c.result = eur_rate(sc, sp);
    else if (attack == AttackModel::collective)
      c.result = aep_rate(sc, sp);
    else
      c.result = coherent_rate(sc, sp, mode);
    return c;
  };

  // Stage 1: log grid on k times a log mesh of the split simplex.
  constexpr int kPointsK = 64;
  constexpr int kPointsW = 10;
  constexpr double kWeightFloor = 1e-3;
  const double k_lo = m;
  const double k_hi = total_rounds - 1;
  std::vector<double> k_grid;
  for (int i = 0; i < kPointsK; ++i) {
    const double t = kPointsK == 1 ? 0.0 : static_cast<double>(i) / (kPointsK - 1);
    const double k = std::round(std::exp(std::log(k_lo) + t * (std::log(k_hi) - std::log(k_lo))));
    if (k_grid.empty() || k != k_grid.back()) k_grid.push_back(k);
  }
  std::vector<double> w_grid;
  const double w_top = 1.0 - 2.0 * kWeightFloor;
  for (int i = 0; i < kPointsW; ++i) {
    const double t = static_cast<double>(i) / (kPointsW - 1);
    w_grid.push_back(std::exp(std::log(kWeightFloor) + t * (std::log(w_top) - std::log(kWeightFloor))));
  }

  Candidate best;
  bool have_best = false;
  const auto consider = [&](const Candidate& c) {
    if (!have_best || better(c, best)) {
      best = c;
      have_best = true;
    }
  };
  for (double k : k_grid)
    for (double w1 : w_grid)
      for (double w2 : w_grid) {
        if (1.0 - w1 - w2 < kWeightFloor) continue;
        consider(evaluate(k, w1, w2));
      }

  // Stage 2: golden-section refinement, one coordinate at a time. Every
  // evaluated point feeds the best-ever tracker, so refinement can only
  // improve on stage 1.
  const double golden = 0.6180339887498949;
  const auto refine = [&](double lo, double hi, const auto& objective) {
    if (!(hi > lo)) return;
    double a = lo, b = hi;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int i = 0; i < 28; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = objective(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = objective(x1);
      }
    }
  };

  const double k_ratio = std::pow(k_hi / k_lo, 1.0 / (kPointsK - 1));
  const double w_ratio = std::pow(w_top / kWeightFloor, 1.0 / (kPointsW - 1));
  for (int pass = 0; pass < 3 && have_best; ++pass) {
    const double k0 = best.test_rounds;
    refine(std::log(std::max(k_lo, k0 / k_ratio)),
           std::log(std::min(k_hi, k0 * k_ratio)), [&](double log_k) {
             const Candidate c = evaluate(std::round(std::exp(log_k)), best.w_eps, best.w_ec);
             consider(c);
             return c.result.rate;
           });
    const double w10 = best.w_eps;
    const double w1_cap = std::min(w_top, 1.0 - best.w_ec - kWeightFloor);
    refine(std::log(std::max(kWeightFloor, w10 / w_ratio)),
           std::log(std::min(w1_cap, w10 * w_ratio)), [&](double log_w) {
             const Candidate c = evaluate(best.test_rounds, std::exp(log_w), best.w_ec);
             consider(c);
             return c.result.rate;
           });
    const double w20 = best.w_ec;
    const double w2_cap = std::min(w_top, 1.0 - best.w_eps - kWeightFloor);
    refine(std::log(std::max(kWeightFloor, w20 / w_ratio)),
           std::log(std::min(w2_cap, w20 * w_ratio)), [&](double log_w) {
             const Candidate c = evaluate(best.test_rounds, best.w_eps, std::exp(log_w));
             consider(c);
             return c.result.rate;
           });
  }
  return best.result;
}

}  // namespace hdqkd
