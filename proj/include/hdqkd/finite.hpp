#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hdqkd/asymptotic.hpp"

namespace hdqkd {

enum class BoundType { eur, aep };
enum class AttackModel { collective, coherent };
enum class EpsMode { derive, fixed };

std::string to_string(BoundType b);
std::string to_string(AttackModel a);
std::string to_string(EpsMode e);

/// Security-parameter split (smoothing, error correction, privacy
/// amplification) against a total budget. Stored in log2 domain: the
/// coherent-attack reduction scales budgets by (N+1)^(d^4-1), far below
/// double-precision underflow in linear form.
struct SecuritySplit {
  double log2_eps = 0;      // smoothing parameter
  double log2_eps_ec = 0;   // error-correction hash failure
  double log2_eps_pa = 0;   // privacy amplification
  double log2_eps_tot = 0;  // budget

  static SecuritySplit from_linear(double eps, double eps_ec, double eps_pa,
                                   double eps_tot);
  /// eps_i = eps_tot.w_i with w_pa = 1 - w_eps - w_ec; weights must each be
  /// >= floor and sum below 1.
  static SecuritySplit from_weights(double log2_eps_tot, double w_eps,
                                    double w_ec, double floor = 1e-3);

  /// Linear values (display only; may underflow to zero).
  double eps() const { return std::exp2(log2_eps); }
  double eps_ec() const { return std::exp2(log2_eps_ec); }
  double eps_pa() const { return std::exp2(log2_eps_pa); }
  double eps_tot() const { return std::exp2(log2_eps_tot); }

  /// eps + eps_ec + eps_pa <= eps_tot, checked by log-sum-exp.
  void validate() const;
};

/// Protocol-level inputs for one finite-size evaluation.
struct FiniteScenario {
  double total_rounds = 0;  // N
  double test_rounds = 0;   // k
  int dim = 0;
  int num_bases = 0;        // m
  double q_tol = 0;         // tolerated error rate
  double incompatibility = -1.0;  // C in bits; < 0 means the ideal log2 d
  double ec_efficiency = 1.0;     // f
  double pass_probability = 1.0;  // p_pass (only 1 is exercised)
  bool allow_nonprime = false;

  double key_rounds() const { return total_rounds - test_rounds; }
  double incompatibility_bits() const {
    return incompatibility < 0.0 ? std::log2(static_cast<double>(dim))
                                 : incompatibility;
  }
  void validate() const;
};

struct RateResult {
  double rate = 0;        // secret bits per round
  double key_length = 0;  // extractable bits
  SecuritySplit split;
  double test_rounds = 0;
  BoundType bound = BoundType::aep;
  AttackModel attack = AttackModel::collective;
  bool feasible = false;
  /// Coherent results only: log2 of the coherent-attack security level.
  double log2_eps_coh = std::numeric_limits<double>::quiet_NaN();
};

/// Statistical penalty for estimating error rates from k samples without
/// replacement: sqrt(N (k~+1) ln(1/eps') / (n k~^2)) with k~ = k/m (the
/// test rounds are split across the m bases).
double mu_correction(double total_rounds, double test_rounds,
                     double key_rounds, int num_bases, double log2_eps_prime);

/// Error-correction leakage per symbol, f (h(Q) + Q log2(d-1)).
double leak_ec(double q, int d, double f);

/// Diagnostic: log2 sum_{l=0}^{floor(n x)} C(n, l) (d-1)^l, the raw
/// binomial form whose closed upper bound n [h(x) + x log2(d-1)] (x <= 1/2)
/// is what the rate formulas use.
double smooth_max_entropy_binomial(double n, int d, double x);

/// Finite rate from the entropic uncertainty relation; two bases only.
RateResult eur_rate(const FiniteScenario& scenario, const SecuritySplit& split);

/// Finite rate from the asymptotic equipartition property, symmetric
/// errors, any supported number of bases.
RateResult aep_rate(const FiniteScenario& scenario, const SecuritySplit& split);

/// Coherent-attack rate via postselection. In EpsMode::derive the split's
/// budget is the coherent target eps_coh and the collective computation
/// runs at eps_coh (N+1)^-(d^4-1); in EpsMode::fixed the split is used
/// directly and the implied (astronomically larger) eps_coh is reported.
RateResult coherent_rate(const FiniteScenario& scenario,
                         const SecuritySplit& split, EpsMode mode);

/// Postselection damping term 2 (d^4 - 1) log2(N+1) / N.
double coherent_damping(int d, double total_rounds);

/// Deterministic two-stage maximization over the test-round count and the
/// security split: a 64-point log grid on k times a 10x10 log simplex mesh
/// on the split weights, then three passes of golden-section refinement.
/// Ties break toward smaller k, then lexicographically smaller split.
RateResult optimize_rate(double total_rounds, int d, int m, double q_tol,
                         double log2_eps_budget, BoundType bound,
                         AttackModel attack, EpsMode mode = EpsMode::derive,
                         double incompatibility = -1.0, double f = 1.0,
                         bool allow_nonprime = false);

}  // namespace hdqkd
