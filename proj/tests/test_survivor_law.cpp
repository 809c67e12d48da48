#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dispersal_lab/errors.hpp"
#include "dispersal_lab/rng.hpp"
#include "dispersal_lab/special_fn.hpp"
#include "dispersal_lab/survivor_law.hpp"

using namespace dlab;

namespace {

// Chi-square goodness-of-fit p-value for observed counts against expected
// probabilities; the last bucket absorbs the tail.
double chi_square_pvalue(const std::vector<long>& observed,
                         const std::vector<double>& expected_probs, long total) {
  double stat = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expct = expected_probs[i] * static_cast<double>(total);
    if (expct < 5.0) continue;  // standard validity rule
    const double diff = static_cast<double>(observed[i]) - expct;
    stat += diff * diff / expct;
    ++dof;
  }
  REQUIRE(dof > 1);
  boost::math::chi_squared dist(dof - 1);
  return 1.0 - boost::math::cdf(dist, stat);
}

}  // namespace

TEST_CASE("poisson_binomial pmf matches the closed form") {
  // lambda=5, p=3/5: P(N=0) = 1/10, P(N=n) = (3/10)(3/4)^n.
  const auto law = SurvivorLaw::poisson_binomial(5.0, 0.6);
  CHECK(law.pmf(0) == doctest::Approx(0.1).epsilon(1e-14));
  double expect = 0.3;
  for (long n = 1; n <= 30; ++n) {
    expect *= (n == 1) ? 0.75 : 1.0;
    CHECK(law.pmf(n) ==
          doctest::Approx(0.3 * std::pow(0.75, static_cast<double>(n)))
              .epsilon(1e-13));
  }
  CHECK_THROWS_AS(law.pmf(-1), DomainError);
  CHECK_THROWS_AS(SurvivorLaw::poisson_binomial(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(SurvivorLaw::poisson_binomial(1.0, 1.5), DomainError);
}

TEST_CASE("pmf mass sums to one for both law kinds") {
  const auto pb = SurvivorLaw::poisson_binomial(2.5, 0.3);
  const long n_star = pb.truncation_index(1e-16);
  double mass = 0.0;
  for (long n = n_star; n >= 0; --n) mass += pb.pmf(n);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // pmf(n) = tail_scale * tail_ratio^n beyond the head, so the tail holds
  // 1.0 * 0.5^2 / (1 - 0.5) = 0.5 of the mass.
  const auto tab = SurvivorLaw::tabulated({0.25, 0.25}, 0.5, 1.0);
  double tmass = 0.0;
  for (long n = tab.truncation_index(1e-16); n >= 0; --n) tmass += tab.pmf(n);
  CHECK(tmass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pgf closed form equals the direct series") {
  const auto law = SurvivorLaw::poisson_binomial(1.7, 0.45);
  const long n_star = law.truncation_index(1e-16);
  for (double s : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    double series = 0.0;
    for (long n = n_star; n >= 0; --n) {
      series += law.pmf(n) * std::pow(s, static_cast<double>(n));
    }
    CHECK(law.pgf(s) == doctest::Approx(series).epsilon(1e-12));
  }
  CHECK(law.pgf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(law.pgf(0.0) == doctest::Approx(law.pmf(0)).epsilon(1e-14));
  CHECK_THROWS_AS(law.pgf(1.5), DomainError);
}

TEST_CASE("mean equals (lambda+1) p and the tabulated sum") {
  CHECK(SurvivorLaw::poisson_binomial(5.0, 0.6).mean() ==
        doctest::Approx(3.6).epsilon(1e-14));
  CHECK(SurvivorLaw::poisson_binomial(9.0, 0.099).mean() ==
        doctest::Approx(0.99).epsilon(1e-14));
  const auto tab = SurvivorLaw::tabulated({0.5, 0.2, 0.3});
  CHECK(tab.mean() == doctest::Approx(0.8).epsilon(1e-14));
  const auto geo = SurvivorLaw::tabulated({0.25}, 0.75, 0.25);
  // mean of P(n) = 0.25 * 0.75^n over n >= 0 is 3.
  CHECK(geo.mean() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ratio moments match 40-digit reference sums") {
  struct Case {
    double lambda, p;
    long d;
    double rm_d, rm_dm1;
  };
  const Case cases[] = {
      {5.0, 0.6, 10, 0.226816672548805862, 0.243101253970443954},
      {1.0, 0.5, 3, 0.209768324318246746, 0.268837405404054833},
      {9.0, 0.099, 800, 0.00123321793309403722, 0.00123475604543300039},
      {0.5, 0.5, 2, 0.222773842294829308, 0.322277384229482931},
  };
  for (const auto& c : cases) {
    CAPTURE(c.lambda);
    CAPTURE(c.d);
    const auto law = SurvivorLaw::poisson_binomial(c.lambda, c.p);
    CHECK(law.ratio_moment(c.d, 0) == doctest::Approx(c.rm_d).epsilon(1e-12));
    CHECK(law.ratio_moment(c.d, -1) == doctest::Approx(c.rm_dm1).epsilon(1e-12));
  }
}

TEST_CASE("ratio moment agrees with the Lerch closed form") {
  // E[N/(N+d)] = p(lambda+1)/(lambda p+1)^2 [lambda p + 1 - d Phi(z,1,d+1)].
  for (double lambda : {0.5, 1.0, 5.0, 10.0}) {
    for (double p : {0.1, 0.5, 0.9}) {
      for (long d : {1L, 2L, 10L, 100L}) {
        CAPTURE(lambda);
        CAPTURE(p);
        CAPTURE(d);
        const auto law = SurvivorLaw::poisson_binomial(lambda, p);
        const double lp = lambda * p;
        const double z = lp / (lp + 1.0);
        const double phi = lerch_phi1(z, d + 1).value;
        const double closed = p * (lambda + 1.0) / ((lp + 1.0) * (lp + 1.0)) *
                              (lp + 1.0 - static_cast<double>(d) * phi);
        CHECK(law.ratio_moment(d, 0) == doctest::Approx(closed).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("factorial ratio moments match reference sums and trivial laws") {
  const auto a = SurvivorLaw::poisson_binomial(1.0, 0.5);
  CHECK(a.factorial_ratio_moment(3, FactorialForm::U) ==
        doctest::Approx(0.0502330810774795534).epsilon(1e-12));
  CHECK(a.factorial_ratio_moment(3, FactorialForm::L) ==
        doctest::Approx(0.0325610810608224879).epsilon(1e-12));
  const auto b = SurvivorLaw::poisson_binomial(5.0, 0.6);
  CHECK(b.factorial_ratio_moment(10, FactorialForm::U) ==
        doctest::Approx(0.0724050158817758393).epsilon(1e-12));
  CHECK(b.factorial_ratio_moment(10, FactorialForm::L) ==
        doctest::Approx(0.0639708583324249345).epsilon(1e-12));
  // N(N-1) vanishes when N <= 1.
  CHECK(SurvivorLaw::point_mass(1).factorial_ratio_moment(5, FactorialForm::U) ==
        0.0);
  CHECK_THROWS_AS(a.factorial_ratio_moment(1, FactorialForm::U), DomainError);
}

TEST_CASE("truncation index certifies the remaining mass") {
  const auto law = SurvivorLaw::poisson_binomial(5.0, 0.6);
  for (double eps : {1e-6, 1e-10, 1e-14}) {
    const long n_star = law.truncation_index(eps);
    // Geometric tail mass beyond n_star.
    const double z = law.pmf(n_star + 1) / law.pmf(n_star);
    const double tail = law.pmf(n_star + 1) / (1.0 - z);
    CHECK(tail < eps);
    CHECK(law.pmf(n_star) / (1.0 - z) >= eps);  // n_star is minimal
  }
  CHECK(SurvivorLaw::point_mass(3).truncation_index() == 3);
}

TEST_CASE("point mass behaves as a degenerate law") {
  const auto law = SurvivorLaw::point_mass(3);
  CHECK(law.pmf(3) == 1.0);
  CHECK(law.pmf(2) == 0.0);
  CHECK(law.mean() == doctest::Approx(3.0));
  CHECK(law.pgf(0.5) == doctest::Approx(0.125));
  Xoshiro256 rng(7);
  for (int i = 0; i < 50; ++i) CHECK(law.sample(rng) == 3);
}

TEST_CASE("tabulated validation rejects malformed inputs") {
  CHECK_THROWS_AS(SurvivorLaw::tabulated({}), DomainError);
  CHECK_THROWS_AS(SurvivorLaw::tabulated({0.5, 0.4}), DomainError);
  CHECK_THROWS_AS(SurvivorLaw::tabulated({0.5, -0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(SurvivorLaw::tabulated({0.5}, 1.0, 0.5), DomainError);
  CHECK_NOTHROW(SurvivorLaw::tabulated({0.4, 0.6}));
}

TEST_CASE("json serialization round-trips both kinds") {
  const auto pb = SurvivorLaw::poisson_binomial(2.0, 0.25);
  const auto pb2 = SurvivorLaw::from_json(pb.to_json());
  CHECK(pb2.is_poisson_binomial());
  CHECK(pb2.lambda() == 2.0);
  CHECK(pb2.p() == 0.25);
  CHECK(pb2.pmf(5) == pb.pmf(5));

  const auto tab = SurvivorLaw::tabulated({0.25, 0.25}, 0.5, 1.0);
  const auto tab2 = SurvivorLaw::from_json(tab.to_json());
  CHECK_FALSE(tab2.is_poisson_binomial());
  for (long n = 0; n <= 20; ++n) CHECK(tab2.pmf(n) == tab.pmf(n));

  const auto j = pb.to_json();
  CHECK(j.at("kind") == "poisson_binomial");
  nlohmann::json bad = {{"kind", "mystery"}};
  CHECK_THROWS_AS(SurvivorLaw::from_json(bad), DomainError);
}

TEST_CASE("inverse-transform sampling matches the pmf") {
  const auto law = SurvivorLaw::poisson_binomial(1.7, 0.4);
  Xoshiro256 rng(1234);
  const long total = 200000;
  const int buckets = 12;
  std::vector<long> observed(buckets, 0);
  for (long i = 0; i < total; ++i) {
    const long n = law.sample(rng);
    observed[static_cast<std::size_t>(std::min<long>(n, buckets - 1))]++;
  }
  std::vector<double> probs(buckets, 0.0);
  double head = 0.0;
  for (int n = 0; n < buckets - 1; ++n) {
    probs[static_cast<std::size_t>(n)] = law.pmf(n);
    head += law.pmf(n);
  }
  probs[buckets - 1] = 1.0 - head;
  CHECK(chi_square_pvalue(observed, probs, total) > 1e-6);
}

TEST_CASE("mechanistic colony simulation reproduces the closed-form law") {
  const double lambda = 1.7, p = 0.4;
  const auto law = SurvivorLaw::poisson_binomial(lambda, p);
  Xoshiro256 rng(99);
  const long total = 200000;
  const int buckets = 12;
  std::vector<long> observed(buckets, 0);
  for (long i = 0; i < total; ++i) {
    const long n = sample_n_mechanistic(lambda, p, rng);
    observed[static_cast<std::size_t>(std::min<long>(n, buckets - 1))]++;
  }
  std::vector<double> probs(buckets, 0.0);
  double head = 0.0;
  for (int n = 0; n < buckets - 1; ++n) {
    probs[static_cast<std::size_t>(n)] = law.pmf(n);
    head += law.pmf(n);
  }
  probs[buckets - 1] = 1.0 - head;
  CHECK(chi_square_pvalue(observed, probs, total) > 1e-6);

  Xoshiro256 rng2(5);
  CHECK(sample_n_mechanistic(2.0, 0.0, rng2) == 0);
  CHECK(sample_n_mechanistic(2.0, 1.0, rng2) >= 1);
}
