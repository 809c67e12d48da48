#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dispersal_lab/dispersal.hpp"
#include "dispersal_lab/survivor_law.hpp"

namespace dlab {

enum class SurvivalClass { DiesOut, Survives, Indeterminate };

std::string survival_class_name(SurvivalClass c);

/// Sandwich bounds with provenance of the auxiliary process behind each side.
struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  std::string lower_source;
  std::string upper_source;
};

struct FixedPointResult {
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

/// alpha = d E[N/(N+d)], beta = (d+1) E[N/(N+d)], and the reach-bound
/// auxiliaries D = max{2, beta/(beta - P(N!=0))} and
/// B = d(d-1) E[N(N-1)/((N+d-1)(N+d-2))].
struct ProcessParams {
  double alpha = 0.0;
  double beta = 0.0;
  double big_d = 2.0;
  double big_b = 0.0;
};

ProcessParams make_process_params(const SurvivorLaw& law, int d);

/// Phase transition on the full tree: DiesOut when E[N/(N+d)] <= 1/(d+1),
/// Survives when > 1/d, Indeterminate in the gap.
SurvivalClass classify_survival(const SurvivorLaw& law, int d);

/// Bracket for the critical catastrophe-survival probability p_c(d, lambda):
/// bisection (tolerance 1e-6 in p) on the two phase-transition boundaries.
BoundsReport critical_p_bracket(double lambda, int d);

/// Smallest nonnegative root of G(s) = s, iterating from 0.
FixedPointResult smallest_fixed_point(const std::function<double(double)>& pgf);

/// [sum_r (1 - rho^r) P(Y_R = r), 1 - psi] for the full-tree process; rho from
/// the d-box Move-Forward-or-Die PGF, psi from the (d+1)-box Self-Avoiding PGF.
BoundsReport survival_prob_bounds(const SurvivorLaw& law, int d);

/// lim_{d->inf} P(V_d) = 1 - nu, nu the smallest fixed point of E[s^N].
double survival_prob_limit(const SurvivorLaw& law);

/// Bounds for P(M_d <= n), the reach CDF; requires E[N/(N+d)] < 1/(d+1).
BoundsReport reach_cdf_bounds(const SurvivorLaw& law, int d, long n);

/// P(M <= n) for an auxiliary branching process: the (n+1)-fold offspring-PGF
/// iterate at 0.
double reach_cdf_exact(Variant v, const SurvivorLaw& law, int d, long n);

/// Limit reach law: (m+1)-fold iterate of E[s^N] at 0.
double reach_limit_cdf(const SurvivorLaw& law, long m);

/// E(M) for the limit law via the tail sum sum_m (1 - P(M <= m)).
double reach_limit_mean(const SurvivorLaw& law);

/// Bounds for E(I_d), the expected number of colonies ever created.
BoundsReport expected_colonies_bounds(const SurvivorLaw& law, int d);

/// Exact E(I) for an auxiliary process (SelfAvoiding, MoveForwardOrDie,
/// Independent), valid on its own subcritical regime.
double expected_colonies_exact(Variant v, const SurvivorLaw& law, int d);

/// lim_{d->inf} E(I_d) = 1/(1 - E(N)) when E(N) < 1.
double expected_colonies_limit(const SurvivorLaw& law);

/// Mean extinction time of a subcritical auxiliary process:
/// integral_0^1 (1-s)/(G(s)-s) ds with the removable singularity at s = 1
/// patched by the analytic limit 1/(1 - G'(1)).
double extinction_time_mean(Variant v, const SurvivorLaw& law, int d);

/// Extinction-time sandwich for the full-tree process: Move-Forward-or-Die
/// with d boxes below, Self-Avoiding with d+1 boxes above.
BoundsReport extinction_time_bounds_fulltree(const SurvivorLaw& law, int d);

/// Uniform (Self-Avoiding) vs independent dispersion, side by side.
struct ComparisonReport {
  double mean_uniform = 0.0;
  double mean_independent = 0.0;
  std::optional<double> colonies_uniform;
  std::optional<double> colonies_independent;
  std::optional<double> tau_uniform;
  std::optional<double> tau_independent;
  std::optional<double> colonies_limit;  // shared d -> inf limit
  bool mean_dominance = false;           // E(Y_i) >= E(Y_u)
  bool colonies_dominance = false;       // E(I_u) <= E(I_i)
};

ComparisonReport compare_dispersal(const SurvivorLaw& law, int d);

}  // namespace dlab
