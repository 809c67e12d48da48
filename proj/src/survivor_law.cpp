#include "dispersal_lab/survivor_law.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "dispersal_lab/errors.hpp"

namespace dlab {

SurvivorLaw SurvivorLaw::poisson_binomial(double lambda, double p) {
  if (!(lambda > 0.0)) throw DomainError("poisson_binomial: lambda must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("poisson_binomial: p must be in [0,1]");
  SurvivorLaw law;
  const double lp = lambda * p;
  law.head_ = {(1.0 - p) / (lp + 1.0)};
  if (p > 0.0) {
    law.tail_ratio_ = lp / (lp + 1.0);
    law.tail_scale_ = (lambda + 1.0) / (lambda * (lp + 1.0));
  }
  law.lambda_ = lambda;
  law.p_ = p;
  return law;
}

SurvivorLaw SurvivorLaw::tabulated(std::vector<double> probs, double tail_ratio,
                                   double tail_scale) {
  if (probs.empty()) throw DomainError("tabulated: probs must be nonempty");
  for (double q : probs) {
    if (!(q >= 0.0)) throw DomainError("tabulated: negative probability");
  }
  if (!(tail_ratio >= 0.0 && tail_ratio < 1.0)) {
    throw DomainError("tabulated: tail ratio must lie in [0,1)");
  }
  if (tail_scale < 0.0) throw DomainError("tabulated: negative tail scale");
  double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (tail_scale > 0.0) {
    const auto n0 = static_cast<double>(probs.size());
    mass += tail_scale * std::pow(tail_ratio, n0) / (1.0 - tail_ratio);
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    throw DomainError("tabulated: total mass differs from 1 by more than 1e-12");
  }
  SurvivorLaw law;
  law.head_ = std::move(probs);
  law.tail_ratio_ = tail_scale > 0.0 ? tail_ratio : 0.0;
  law.tail_scale_ = tail_scale;
  return law;
}

SurvivorLaw SurvivorLaw::point_mass(long n) {
  std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
  probs.back() = 1.0;
  return tabulated(std::move(probs));
}

double SurvivorLaw::pmf(long n) const {
  if (n < 0) throw DomainError("pmf: n must be nonnegative");
  if (n < static_cast<long>(head_.size())) return head_[static_cast<std::size_t>(n)];
  if (tail_scale_ == 0.0) return 0.0;
  return tail_scale_ * std::pow(tail_ratio_, static_cast<double>(n));
}

double SurvivorLaw::pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("pgf: s must lie in [0,1]");
  if (is_poisson_binomial()) {
    const double q = 1.0 - s;
    return (1.0 - *p_ * q) / (1.0 + *lambda_ * *p_ * q);
  }
  double sum = 0.0;
  double sn = 1.0;
  for (double q : head_) {
    sum += q * sn;
    sn *= s;
  }
  if (tail_scale_ > 0.0) {
    const double zs = tail_ratio_ * s;
    const auto n0 = static_cast<double>(head_.size());
    sum += tail_scale_ * std::pow(zs, n0) / (1.0 - zs);
  }
  return sum;
}

double SurvivorLaw::mean() const {
  if (is_poisson_binomial()) return (*lambda_ + 1.0) * *p_;
  double sum = 0.0;
  for (std::size_t n = 1; n < head_.size(); ++n) {
    sum += static_cast<double>(n) * head_[n];
  }
  if (tail_scale_ > 0.0) {
    const double z = tail_ratio_;
    const auto n0 = static_cast<double>(head_.size());
    // sum_{n>=n0} n z^n = z^{n0} (n0 + (1 - n0) z) / (1 - z)^2
    sum += tail_scale_ * std::pow(z, n0) * (n0 + (1.0 - n0) * z) /
           ((1.0 - z) * (1.0 - z));
  }
  return sum;
}

long SurvivorLaw::truncation_index(double eps) const {
  long n_star = static_cast<long>(head_.size()) - 1;
  if (tail_scale_ == 0.0) return n_star;
  const double z = tail_ratio_;
  // Mass beyond m is tail_scale * z^{m+1} / (1 - z) for m >= head size - 1.
  double tail_mass =
      tail_scale_ * std::pow(z, static_cast<double>(n_star + 1)) / (1.0 - z);
  while (tail_mass >= eps && n_star < 100000000L) {
    tail_mass *= z;
    ++n_star;
  }
  return n_star;
}

template <class F>
double SurvivorLaw::truncated_moment(F&& f) const {
  const long n_star = truncation_index(1e-14);
  double sum = 0.0;
  for (long n = n_star; n >= 1; --n) {  // small terms first
    sum += f(n) * pmf(n);
  }
  return sum;
}

double SurvivorLaw::ratio_moment(long d, int shift) const {
  if (d < 1) throw DomainError("ratio_moment: d must be >= 1");
  if (shift != 0 && shift != -1) throw DomainError("ratio_moment: shift must be 0 or -1");
  const long a = d + shift;
  if (a < 1) throw DomainError("ratio_moment: d + shift must be >= 1");
  return truncated_moment([a](long n) {
    return static_cast<double>(n) / static_cast<double>(n + a);
  });
}

double SurvivorLaw::factorial_ratio_moment(long d, FactorialForm form) const {
  if (form == FactorialForm::U && d < 2) {
    throw DomainError("factorial_ratio_moment: U form needs d >= 2");
  }
  if (d < 1) throw DomainError("factorial_ratio_moment: d must be >= 1");
  const long second = form == FactorialForm::U ? d - 2 : d;
  return truncated_moment([d, second](long n) {
    const double num = static_cast<double>(n) * static_cast<double>(n - 1);
    const double den =
        static_cast<double>(n + d - 1) * static_cast<double>(n + second);
    return num / den;
  });
}

long SurvivorLaw::sample(Xoshiro256& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t n = 0; n < head_.size(); ++n) {
    cum += head_[n];
    if (u < cum) return static_cast<long>(n);
  }
  if (tail_scale_ == 0.0) return static_cast<long>(head_.size()) - 1;
  long n = static_cast<long>(head_.size());
  double q = tail_scale_ * std::pow(tail_ratio_, static_cast<double>(n));
  while (n < 100000000L) {
    cum += q;
    if (u < cum) return n;
    q *= tail_ratio_;
    ++n;
  }
  return n;
}

nlohmann::ordered_json SurvivorLaw::to_json() const {
  nlohmann::ordered_json j;
  if (is_poisson_binomial()) {
    j["kind"] = "poisson_binomial";
    j["lambda"] = *lambda_;
    j["p"] = *p_;
  } else {
    j["kind"] = "tabulated";
    j["probs"] = head_;
    j["tail_ratio"] = tail_ratio_;
    j["tail_scale"] = tail_scale_;
  }
  return j;
}

SurvivorLaw SurvivorLaw::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "poisson_binomial") {
    return poisson_binomial(j.at("lambda").get<double>(), j.at("p").get<double>());
  }
  if (kind == "tabulated") {
    return tabulated(j.at("probs").get<std::vector<double>>(),
                     j.value("tail_ratio", 0.0), j.value("tail_scale", 0.0));
  }
  throw DomainError("SurvivorLaw::from_json: unknown kind '" + kind + "'");
}

long sample_n_mechanistic(double lambda, double p, Xoshiro256& rng) {
  if (!(lambda > 0.0)) throw DomainError("sample_n_mechanistic: lambda must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_n_mechanistic: p in [0,1]");
  const double lifetime = rng.exponential();
  std::poisson_distribution<long> growth(lambda * lifetime);
  const long size = 1 + growth(rng);
  if (p == 0.0) return 0;
  if (p == 1.0) return size;
  std::binomial_distribution<long> thinning(size, p);
  return thinning(rng);
}

}  // namespace dlab
