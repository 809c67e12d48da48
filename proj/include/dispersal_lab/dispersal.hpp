#pragma once

#include <string>
#include <vector>

#include "dispersal_lab/rng.hpp"
#include "dispersal_lab/survivor_law.hpp"

namespace dlab {

/// Dispersal scheme of the survivors of a catastrophe. The parameter d is
/// always the forward-neighbor count; SelfAvoiding and Independent spread over
/// d boxes, MoveForwardOrDie over d+1 (one lethal), FullTree exposes the root
/// law over d+1 boxes.
enum class Variant { SelfAvoiding, MoveForwardOrDie, FullTree, Independent };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Total number of boxes survivors are composed into.
int box_count(Variant v, int d);

/// P(exactly y of d boxes nonempty) when r survivors form a uniform weak
/// composition over the d boxes: C(r-1,y-1) C(d,y) / C(d+r-1,r).
double uniform_success_pmf(long r, long d, long y);

/// P(Y = y | N = n) for the given variant: the number of new colonies founded
/// by n survivors.
double offspring_cond_pmf(Variant v, int d, long n, long y);

/// Offspring law Y of a colony under the given variant, marginalized over the
/// survivor law. pmf indexed 0..box_count; pgf/mean/factorial2 use the
/// closed-moment routes.
class OffspringLaw {
 public:
  OffspringLaw(Variant v, const SurvivorLaw& law, int d);

  const std::vector<double>& pmf() const { return pmf_; }
  double pmf(long y) const;
  double pgf(double s) const;
  double mean() const { return mean_; }
  double factorial2() const { return factorial2_; }  // E[Y(Y-1)]
  int boxes() const { return static_cast<int>(pmf_.size()) - 1; }

 private:
  Variant kind_;
  int d_;
  SurvivorLaw law_;
  std::vector<double> pmf_;
  double mean_ = 0.0;
  double factorial2_ = 0.0;
};

double offspring_pmf(Variant v, const SurvivorLaw& law, int d, long y);
double offspring_pgf(Variant v, const SurvivorLaw& law, int d, double s);
double offspring_mean(Variant v, const SurvivorLaw& law, int d);
double offspring_factorial2(Variant v, const SurvivorLaw& law, int d);

/// Uniform weak composition of n into k boxes (stars and bars: k-1 distinct
/// bar positions among n+k-1 slots).
std::vector<long> sample_composition(long n, int k, Xoshiro256& rng);

}  // namespace dlab
