#include "dispersal_lab/analytics.hpp"

#include <cmath>

#include "dispersal_lab/errors.hpp"

namespace dlab {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double fm,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, tol, 40);
}

void require(bool condition, const std::string& hypothesis) {
  if (!condition) {
    throw PreconditionError("theorem hypothesis violated: " + hypothesis);
  }
}

}  // namespace

std::string survival_class_name(SurvivalClass c) {
  switch (c) {
    case SurvivalClass::DiesOut: return "dies-out";
    case SurvivalClass::Survives: return "survives";
    case SurvivalClass::Indeterminate: return "indeterminate";
  }
  return "?";
}

ProcessParams make_process_params(const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("make_process_params: d must be >= 1");
  ProcessParams pp;
  const double e = law.ratio_moment(d, 0);
  pp.alpha = d * e;
  pp.beta = (d + 1) * e;
  const double p_nonzero = 1.0 - law.p_zero();
  const double denom = pp.beta - p_nonzero;
  // The theorem's D has denominator beta - P(N != 0); when it is nonpositive
  // the max{2, .} guard takes over.
  pp.big_d = denom > 0.0 ? std::max(2.0, pp.beta / denom) : 2.0;
  pp.big_b =
      d >= 2 ? d * (d - 1.0) * law.factorial_ratio_moment(d, FactorialForm::U)
             : 0.0;
  return pp;
}

SurvivalClass classify_survival(const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("classify_survival: d must be >= 1");
  const double e = law.ratio_moment(d, 0);
  if (e <= 1.0 / (d + 1.0)) return SurvivalClass::DiesOut;
  if (e > 1.0 / d) return SurvivalClass::Survives;
  return SurvivalClass::Indeterminate;
}

BoundsReport critical_p_bracket(double lambda, int d) {
  if (!(lambda > 0.0) || d < 1) {
    throw DomainError("critical_p_bracket: need lambda > 0, d >= 1");
  }
  const auto boundary = [&](double target) {
    const auto excess = [&](double p) {
      return SurvivorLaw::poisson_binomial(lambda, p).ratio_moment(d, 0) - target;
    };
    if (excess(1.0) < 0.0) return 1.0;  // never crosses inside [0,1]
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-6; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  BoundsReport r;
  r.lower = boundary(1.0 / (d + 1.0));
  r.upper = boundary(1.0 / d);
  r.lower_source = "E[N/(N+d)] = 1/(d+1) boundary (dies-out criterion)";
  r.upper_source = "E[N/(N+d)] = 1/d boundary (survival criterion)";
  return r;
}

FixedPointResult smallest_fixed_point(const std::function<double(double)>& pgf) {
  double s = 0.0;
  long iterations = 0;
  constexpr long kMaxIter = 1000000;
  while (iterations < kMaxIter) {
    const double next = pgf(s);
    ++iterations;
    if (!(next >= s && next <= 1.0 + 1e-12)) {
      throw NonConvergenceError("smallest_fixed_point: input is not a PGF");
    }
    if (next - s < 1e-13) {
      return {next, iterations, std::abs(pgf(next) - next)};
    }
    s = next;
  }
  // Near-critical stall: the iteration limit is 1 unless the map crosses the
  // diagonal strictly below it, in which case bisection pins the root.
  const double probe = 1.0 - 1e-9;
  if (pgf(probe) >= probe) {
    return {1.0, iterations, std::abs(pgf(1.0) - 1.0)};
  }
  double lo = s, hi = probe;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pgf(mid) - mid > 0.0 ? lo : hi) = mid;
  }
  const double value = 0.5 * (lo + hi);
  const double residual = std::abs(pgf(value) - value);
  if (residual > 1e-9) {
    throw NonConvergenceError("smallest_fixed_point: failed to converge");
  }
  return {value, iterations, residual};
}

BoundsReport survival_prob_bounds(const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("survival_prob_bounds: d must be >= 1");
  const OffspringLaw lower_law(Variant::MoveForwardOrDie, law, d);
  const OffspringLaw upper_law(Variant::SelfAvoiding, law, d + 1);
  const OffspringLaw root_law(Variant::FullTree, law, d);
  const double rho =
      smallest_fixed_point([&](double s) { return lower_law.pgf(s); }).value;
  const double psi =
      smallest_fixed_point([&](double s) { return upper_law.pgf(s); }).value;
  BoundsReport r;
  double lower = 0.0;
  double rho_pow = 1.0;
  for (long y = 1; y <= d + 1; ++y) {
    rho_pow *= rho;
    lower += (1.0 - rho_pow) * root_law.pmf(y);
  }
  r.lower = lower;
  r.upper = 1.0 - psi;
  r.lower_source = "move-forward-or-die extinction prob applied to the root law";
  r.upper_source = "1 - psi, self-avoiding fixed point with d+1 boxes";
  return r;
}

double survival_prob_limit(const SurvivorLaw& law) {
  const double nu =
      smallest_fixed_point([&](double s) { return law.pgf(s); }).value;
  return 1.0 - nu;
}

BoundsReport reach_cdf_bounds(const SurvivorLaw& law, int d, long n) {
  if (d < 1 || n < 0) throw DomainError("reach_cdf_bounds: need d >= 1, n >= 0");
  const ProcessParams pp = make_process_params(law, d);
  require(pp.beta < 1.0, "E[N/(N+d)] < 1/(d+1) (subcritical reach regime)");
  BoundsReport r;
  r.lower_source = "reach bound via beta and D";
  r.upper_source = "reach bound via alpha and B";
  if (pp.alpha == 0.0) {
    r.lower = r.upper = 1.0;
    return r;
  }
  const double beta_pow = std::pow(pp.beta, static_cast<double>(n + 1));
  const double dd = pp.big_d * (1.0 - pp.beta);
  r.lower = (1.0 + dd) * (1.0 - beta_pow) / (1.0 + dd - beta_pow);
  const double alpha_pow = std::pow(pp.alpha, static_cast<double>(n + 1));
  if (pp.big_b > 0.0) {
    const double c = pp.alpha * (1.0 - pp.alpha) / pp.big_b;
    r.upper = (1.0 + c) * (1.0 - alpha_pow) / (1.0 + c - alpha_pow);
  } else {
    // B = 0 (at most one survivor): the bound degenerates to the chain CDF.
    r.upper = 1.0 - alpha_pow;
  }
  return r;
}

double reach_cdf_exact(Variant v, const SurvivorLaw& law, int d, long n) {
  if (v != Variant::SelfAvoiding && v != Variant::MoveForwardOrDie) {
    throw DomainError("reach_cdf_exact: variant must be an auxiliary process");
  }
  if (n < 0) throw DomainError("reach_cdf_exact: n must be >= 0");
  const OffspringLaw ol(v, law, d);
  double s = 0.0;
  for (long i = 0; i <= n; ++i) s = ol.pgf(s);
  return s;
}

double reach_limit_cdf(const SurvivorLaw& law, long m) {
  if (m < 0) throw DomainError("reach_limit_cdf: m must be >= 0");
  double s = 0.0;
  for (long i = 0; i <= m; ++i) s = law.pgf(s);
  return s;
}

double reach_limit_mean(const SurvivorLaw& law) {
  require(law.mean() < 1.0, "E(N) < 1 (subcritical limit reach)");
  double s = 0.0;
  double total = 0.0;
  for (long m = 0; m < 10000000; ++m) {
    s = law.pgf(s);
    const double tail = 1.0 - s;
    total += tail;
    if (tail < 1e-14) break;
  }
  return total;
}

BoundsReport expected_colonies_bounds(const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("expected_colonies_bounds: d must be >= 1");
  const double e = law.ratio_moment(d, 0);
  require(e < 1.0 / (d + 1.0), "E[N/(N+d)] < 1/(d+1) (subcritical colony count)");
  BoundsReport r;
  r.lower = (1.0 + e) / (1.0 - d * e);
  r.upper = 1.0 / (1.0 - (d + 1.0) * e);
  r.lower_source = "move-forward-or-die exact colony count";
  r.upper_source = "self-avoiding (d+1)-box colony count bound";
  return r;
}

double expected_colonies_exact(Variant v, const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("expected_colonies_exact: d must be >= 1");
  switch (v) {
    case Variant::SelfAvoiding: {
      const double mean_u =
          d == 1 ? 1.0 - law.p_zero() : d * law.ratio_moment(d, -1);
      require(mean_u < 1.0, "E[N/(N+d-1)] < 1/d (self-avoiding subcritical)");
      return 1.0 + (d + 1.0) * law.ratio_moment(d, 0) / (1.0 - mean_u);
    }
    case Variant::MoveForwardOrDie: {
      const double e = law.ratio_moment(d, 0);
      require(d * e < 1.0, "E[N/(N+d)] < 1/d (move-forward-or-die subcritical)");
      return (1.0 + e) / (1.0 - d * e);
    }
    case Variant::Independent: {
      const double mean_i = d * (1.0 - law.pgf((d - 1.0) / d));
      require(mean_i < 1.0, "independent-dispersion offspring mean < 1");
      const double root_mean = (d + 1.0) * (1.0 - law.pgf(d / (d + 1.0)));
      return 1.0 + root_mean / (1.0 - mean_i);
    }
    case Variant::FullTree:
      throw DomainError(
          "expected_colonies_exact: the full-tree process has no closed form; "
          "use expected_colonies_bounds");
  }
  return 0.0;
}

double expected_colonies_limit(const SurvivorLaw& law) {
  require(law.mean() < 1.0, "E(N) < 1 (subcritical colony-count limit)");
  return 1.0 / (1.0 - law.mean());
}

double extinction_time_mean(Variant v, const SurvivorLaw& law, int d) {
  const OffspringLaw ol(v, law, d);
  const double m = ol.mean();
  require(m < 1.0, "offspring mean < 1 (subcritical extinction time)");
  const auto integrand = [&](double s) {
    const double denom = ol.pgf(s) - s;
    if (denom <= 0.0) {
      throw NonConvergenceError(
          "extinction_time_mean: G(s) - s vanished in the interior");
    }
    return (1.0 - s) / denom;
  };
  constexpr double kEdge = 1e-6;
  const double body = adaptive_simpson(integrand, 0.0, 1.0 - kEdge, 1e-8);
  // Removable singularity at s = 1: integrand -> 1/(1 - G'(1)).
  const double at_edge = integrand(1.0 - kEdge);
  const double at_one = 1.0 / (1.0 - m);
  return body + 0.5 * kEdge * (at_edge + at_one);
}

BoundsReport extinction_time_bounds_fulltree(const SurvivorLaw& law, int d) {
  if (d < 1) throw DomainError("extinction_time_bounds_fulltree: d >= 1");
  const double e = law.ratio_moment(d, 0);
  require(e < 1.0 / (d + 1.0), "E[N/(N+d)] < 1/(d+1) (subcritical extinction)");
  BoundsReport r;
  r.lower = extinction_time_mean(Variant::MoveForwardOrDie, law, d);
  r.upper = extinction_time_mean(Variant::SelfAvoiding, law, d + 1);
  r.lower_source = "move-forward-or-die mean extinction time, d boxes";
  r.upper_source = "self-avoiding mean extinction time, d+1 boxes";
  return r;
}

ComparisonReport compare_dispersal(const SurvivorLaw& law, int d) {
  if (d < 2) throw DomainError("compare_dispersal: d must be >= 2");
  ComparisonReport rep;
  rep.mean_uniform = offspring_mean(Variant::SelfAvoiding, law, d);
  rep.mean_independent = offspring_mean(Variant::Independent, law, d);
  rep.mean_dominance = rep.mean_independent >= rep.mean_uniform - 1e-12;
  if (rep.mean_uniform < 1.0) {
    rep.colonies_uniform = expected_colonies_exact(Variant::SelfAvoiding, law, d);
    rep.tau_uniform = extinction_time_mean(Variant::SelfAvoiding, law, d);
  }
  if (rep.mean_independent < 1.0) {
    rep.colonies_independent =
        expected_colonies_exact(Variant::Independent, law, d);
    rep.tau_independent = extinction_time_mean(Variant::Independent, law, d);
  }
  if (rep.colonies_uniform && rep.colonies_independent) {
    rep.colonies_dominance =
        *rep.colonies_uniform <= *rep.colonies_independent + 1e-12;
  }
  if (law.mean() < 1.0) rep.colonies_limit = expected_colonies_limit(law);
  return rep;
}

}  // namespace dlab
