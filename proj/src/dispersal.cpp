#include "dispersal_lab/dispersal.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dispersal_lab/errors.hpp"
#include "dispersal_lab/special_fn.hpp"

namespace dlab {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::SelfAvoiding: return "self-avoiding";
    case Variant::MoveForwardOrDie: return "move-forward-or-die";
    case Variant::FullTree: return "full-tree";
    case Variant::Independent: return "independent";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "self-avoiding") return Variant::SelfAvoiding;
  if (name == "move-forward-or-die") return Variant::MoveForwardOrDie;
  if (name == "full-tree") return Variant::FullTree;
  if (name == "independent") return Variant::Independent;
  throw DomainError("unknown dispersal variant '" + name + "'");
}

int box_count(Variant v, int d) {
  if (d < 1) throw DomainError("box_count: d must be >= 1");
  switch (v) {
    case Variant::SelfAvoiding:
    case Variant::Independent:
      return d;
    case Variant::MoveForwardOrDie:
    case Variant::FullTree:
      return d + 1;
  }
  return d;
}

double uniform_success_pmf(long r, long d, long y) {
  if (r < 1 || d < 1) throw DomainError("uniform_success_pmf: need r >= 1, d >= 1");
  if (y < 0 || y > std::min(r, d)) {
    throw DomainError("uniform_success_pmf: y must lie in [0, min(r,d)]");
  }
  if (y == 0) return 0.0;
  return std::exp(log_binom(r - 1, y - 1) + log_binom(d, y) -
                  log_binom(d + r - 1, r));
}

double offspring_cond_pmf(Variant v, int d, long n, long y) {
  const long k = box_count(v, d);
  if (n < 0 || y < 0) throw DomainError("offspring_cond_pmf: negative argument");
  if (y > k) return 0.0;
  switch (v) {
    case Variant::SelfAvoiding:
    case Variant::FullTree: {
      // Uniform composition of n into k fresh boxes; y nonempty boxes succeed.
      if (n == 0) return y == 0 ? 1.0 : 0.0;
      if (y == 0 || y > std::min<long>(n, k)) return 0.0;
      return std::exp(log_binom(k, y) + log_binom(n - 1, y - 1) -
                      log_binom(n + k - 1, k - 1));
    }
    case Variant::MoveForwardOrDie: {
      // k = d+1 boxes, one lethal; Y counts nonempty among the d forward ones.
      if (y > std::min<long>(n, d)) return 0.0;
      return std::exp(log_binom(d, y) + log_binom(n, y) - log_binom(n + d, d));
    }
    case Variant::Independent: {
      if (y > std::min<long>(n, d)) return 0.0;
      if (n == 0) return y == 0 ? 1.0 : 0.0;
      if (n <= 50) {
        const double t = static_cast<double>(surjections(n, y));
        return std::exp(log_binom(d, y) + std::log(t) -
                        static_cast<double>(n) * std::log(static_cast<double>(d)));
      }
      // Inclusion-exclusion over the y target boxes.
      double sum = 0.0;
      for (long i = 0; i < y; ++i) {
        const double term =
            std::exp(log_binom(y, i) + static_cast<double>(n) *
                                           std::log(static_cast<double>(y - i) /
                                                    static_cast<double>(d)));
        sum += (i % 2 == 0) ? term : -term;
      }
      return std::exp(log_binom(d, y)) * std::max(sum, 0.0);
    }
  }
  return 0.0;
}

OffspringLaw::OffspringLaw(Variant v, const SurvivorLaw& law, int d)
    : kind_(v), d_(d), law_(law) {
  const int k = box_count(v, d);
  pmf_.assign(static_cast<std::size_t>(k) + 1, 0.0);

  if (v == Variant::Independent) {
    // Marginal through the N-PGF: P(Y=y) = C(d,y) sum_i (-1)^i C(y,i) g((y-i)/d).
    for (long y = 0; y <= k; ++y) {
      double sum = 0.0;
      for (long i = 0; i <= y; ++i) {
        const double g = law_.pgf(static_cast<double>(y - i) / d);
        const double c = std::exp(log_binom(y, i));
        sum += (i % 2 == 0) ? c * g : -c * g;
      }
      pmf_[static_cast<std::size_t>(y)] =
          std::max(0.0, std::exp(log_binom(d, y)) * sum);
    }
  } else {
    const long n_star = law_.truncation_index(1e-15);
    for (long n = 0; n <= n_star; ++n) {
      const double pn = law_.pmf(n);
      if (pn == 0.0) continue;
      const long y_max = std::min<long>(n, k);
      for (long y = 0; y <= y_max; ++y) {
        pmf_[static_cast<std::size_t>(y)] += pn * offspring_cond_pmf(v, d, n, y);
      }
    }
  }

  switch (v) {
    case Variant::SelfAvoiding:
      mean_ = d == 1 ? 1.0 - law_.p_zero() : d * law_.ratio_moment(d, -1);
      factorial2_ =
          d >= 2 ? d * (d - 1.0) * law_.factorial_ratio_moment(d, FactorialForm::U)
                 : 0.0;
      break;
    case Variant::MoveForwardOrDie:
      mean_ = d * law_.ratio_moment(d, 0);
      factorial2_ =
          d >= 2 ? d * (d - 1.0) * law_.factorial_ratio_moment(d, FactorialForm::L)
                 : 0.0;
      break;
    case Variant::FullTree:
      mean_ = (d + 1.0) * law_.ratio_moment(d, 0);
      factorial2_ =
          (d + 1.0) * d * law_.factorial_ratio_moment(d, FactorialForm::L);
      break;
    case Variant::Independent:
      mean_ = d * (1.0 - law_.pgf((d - 1.0) / d));
      factorial2_ = d >= 2 ? d * (d - 1.0) *
                                 (1.0 - 2.0 * law_.pgf((d - 1.0) / d) +
                                  law_.pgf((d - 2.0) / d))
                           : 0.0;
      break;
  }
}

double OffspringLaw::pmf(long y) const {
  if (y < 0) throw DomainError("OffspringLaw::pmf: y must be nonnegative");
  if (y >= static_cast<long>(pmf_.size())) return 0.0;
  return pmf_[static_cast<std::size_t>(y)];
}

double OffspringLaw::pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("OffspringLaw::pgf: s in [0,1]");
  if (kind_ == Variant::Independent) {
    if (s == 0.0) return pmf_[0];
    if (s == 1.0) return 1.0;
    // sum_j C(d,j) s^{d-j} (1-s)^j g((d-j)/d); stable for any d.
    double sum = 0.0;
    for (long j = 0; j <= d_; ++j) {
      const double w = std::exp(log_binom(d_, j) + (d_ - j) * std::log(s) +
                                j * std::log1p(-s));
      sum += w * law_.pgf(static_cast<double>(d_ - j) / d_);
    }
    return sum;
  }
  double acc = 0.0;
  for (auto it = pmf_.rbegin(); it != pmf_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double offspring_pmf(Variant v, const SurvivorLaw& law, int d, long y) {
  return OffspringLaw(v, law, d).pmf(y);
}

double offspring_pgf(Variant v, const SurvivorLaw& law, int d, double s) {
  return OffspringLaw(v, law, d).pgf(s);
}

double offspring_mean(Variant v, const SurvivorLaw& law, int d) {
  return OffspringLaw(v, law, d).mean();
}

double offspring_factorial2(Variant v, const SurvivorLaw& law, int d) {
  return OffspringLaw(v, law, d).factorial2();
}

std::vector<long> sample_composition(long n, int k, Xoshiro256& rng) {
  if (n < 0 || k < 1) throw DomainError("sample_composition: need n >= 0, k >= 1");
  if (k == 1) return {n};
  std::vector<long> parts(static_cast<std::size_t>(k), 0);
  if (n == 0) return parts;

  // Floyd's algorithm: k-1 distinct bar positions among n+k-1 slots.
  const long total = n + k - 1;
  const long m = k - 1;
  std::vector<long> bars;
  bars.reserve(static_cast<std::size_t>(m));
  for (long t = total - m; t < total; ++t) {
    std::uniform_int_distribution<long> pick(0, t);
    const long r = pick(rng);
    if (std::find(bars.begin(), bars.end(), r) != bars.end()) {
      bars.push_back(t);
    } else {
      bars.push_back(r);
    }
  }
  std::sort(bars.begin(), bars.end());

  long prev = -1;
  for (long i = 0; i < m; ++i) {
    parts[static_cast<std::size_t>(i)] = bars[static_cast<std::size_t>(i)] - prev - 1;
    prev = bars[static_cast<std::size_t>(i)];
  }
  parts[static_cast<std::size_t>(m)] = total - 1 - prev;
  return parts;
}

}  // namespace dlab
