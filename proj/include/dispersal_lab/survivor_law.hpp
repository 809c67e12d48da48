#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dispersal_lab/rng.hpp"

namespace dlab {

/// Which factorial ratio moment E[N(N-1)/(...)] to take; the two auxiliary
/// processes use different denominators.
enum class FactorialForm { U, L };

/// Law of N, the number of individuals surviving a catastrophe before
/// dispersal. Internally a finite head table plus an optional geometric tail
/// pmf(n) = tail_scale * tail_ratio^n for n >= head.size(); the Poisson-growth
/// Binomial-catastrophe law is exactly of this shape. Immutable after
/// construction.
class SurvivorLaw {
 public:
  /// N-law of a rate-lambda pure-birth colony thinned by Bin(p) at an Exp(1)
  /// catastrophe time: P(N=0) = (1-p)/(lambda p + 1) and
  /// P(N=n) = (lambda p/(lambda p+1))^n (lambda+1)/(lambda(lambda p+1)), n>=1.
  static SurvivorLaw poisson_binomial(double lambda, double p);

  /// Generic tabulated law with optional geometric tail starting right after
  /// the table. Total mass must be 1 within 1e-12.
  static SurvivorLaw tabulated(std::vector<double> probs,
                               double tail_ratio = 0.0,
                               double tail_scale = 0.0);

  static SurvivorLaw point_mass(long n);

  double pmf(long n) const;
  double pgf(double s) const;  // E[s^N], s in [0,1]
  double mean() const;         // E(N)
  double p_zero() const { return pmf(0); }

  /// E[N/(N+d+shift)], shift in {-1, 0}; certified truncated series.
  double ratio_moment(long d, int shift = 0) const;

  /// E[N(N-1)/((N+d-1)(N+d-2))] (U) or E[N(N-1)/((N+d-1)(N+d))] (L).
  double factorial_ratio_moment(long d, FactorialForm form) const;

  /// Smallest n such that the pmf mass beyond n is below eps.
  long truncation_index(double eps = 1e-14) const;

  /// Exact inverse-transform sample.
  long sample(Xoshiro256& rng) const;

  bool is_poisson_binomial() const { return lambda_.has_value(); }
  double lambda() const { return *lambda_; }
  double p() const { return *p_; }

  nlohmann::ordered_json to_json() const;
  static SurvivorLaw from_json(const nlohmann::json& j);

 private:
  SurvivorLaw() = default;

  // Generic moment kernel: E[f(N)] for f given as a callable, summed over the
  // head and the truncated tail with the certified tail rule.
  template <class F>
  double truncated_moment(F&& f) const;

  std::vector<double> head_;
  double tail_ratio_ = 0.0;
  double tail_scale_ = 0.0;
  std::optional<double> lambda_;
  std::optional<double> p_;
};

/// Independent oracle for the closed-form law: simulate the colony mechanism
/// (Exp(1) lifetime, Poisson(lambda * lifetime) growth on top of the founder,
/// then binomial thinning with p).
long sample_n_mechanistic(double lambda, double p, Xoshiro256& rng);

}  // namespace dlab
