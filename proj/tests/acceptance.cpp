// Acceptance gate: one check per release criterion, each printed as a single
// PASS/FAIL line with its runtime. Exits nonzero if any criterion fails.
// argv[1] must be the path to the command-line binary (used by the
// determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "dispersal_lab/analytics.hpp"
#include "dispersal_lab/dispersal.hpp"
#include "dispersal_lab/simulator.hpp"
#include "dispersal_lab/survivor_law.hpp"

using namespace dlab;
using Rational = boost::rational<long long>;

namespace {

int g_failures = 0;

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::vector<std::string> problems;
  std::chrono::steady_clock::time_point start;

  Criterion(int n, std::string nm, double budget)
      : number(n), name(std::move(nm)), budget_seconds(budget),
        start(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) problems.push_back(detail);
  }

  void expect_close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: got %.10g, want %.10g (tol %g)",
                    what.c_str(), got, want, tol);
      problems.push_back(buf);
    }
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > budget_seconds) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "runtime %.1f s exceeds budget %.0f s",
                    elapsed, budget_seconds);
      problems.push_back(buf);
    }
    if (problems.empty()) {
      std::printf("PASS criterion %d: %s (%.2f s)\n", number, name.c_str(),
                  elapsed);
    } else {
      ++g_failures;
      std::printf("FAIL criterion %d: %s (%.2f s)\n", number, name.c_str(),
                  elapsed);
      for (const auto& p : problems) std::printf("      %s\n", p.c_str());
    }
  }
};

long long int_binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

void for_each_composition(long n, int k,
                          const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> parts(static_cast<std::size_t>(k), 0);
  std::function<void(long, int)> rec = [&](long rest, int box) {
    if (box == k - 1) {
      parts[static_cast<std::size_t>(box)] = rest;
      fn(parts);
      return;
    }
    for (long v = 0; v <= rest; ++v) {
      parts[static_cast<std::size_t>(box)] = v;
      rec(rest - v, box + 1);
    }
  };
  rec(n, 0);
}

std::vector<Rational> enumerated_pmf(Variant v, int d, long n) {
  const int k = box_count(v, d);
  std::vector<Rational> pmf(static_cast<std::size_t>(k) + 1, Rational(0));
  if (v == Variant::Independent) {
    if (n == 0) {
      pmf[0] = Rational(1);
      return pmf;
    }
    long long total = 1;
    for (long i = 0; i < n; ++i) total *= d;
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    std::function<void(long)> rec = [&](long idx) {
      if (idx == n) {
        std::vector<bool> hit(static_cast<std::size_t>(d), false);
        for (long i = 0; i < n; ++i) hit[static_cast<std::size_t>(pick[i])] = true;
        long y = 0;
        for (bool h : hit) y += h ? 1 : 0;
        pmf[static_cast<std::size_t>(y)] += Rational(1, total);
        return;
      }
      for (int b = 0; b < d; ++b) {
        pick[static_cast<std::size_t>(idx)] = b;
        rec(idx + 1);
      }
    };
    rec(0);
    return pmf;
  }
  const long long denom = int_binom(n + k - 1, k - 1);
  for_each_composition(n, k, [&](const std::vector<long>& parts) {
    long y = 0;
    const int counted = v == Variant::MoveForwardOrDie ? d : k;
    for (int b = 0; b < counted; ++b) {
      y += parts[static_cast<std::size_t>(b)] > 0 ? 1 : 0;
    }
    pmf[static_cast<std::size_t>(y)] += Rational(1, denom);
  });
  return pmf;
}

std::string run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
  pclose(pipe);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  {  // 1. Fixed points psi and rho at (lambda=5, p=3/5, d=10).
    Criterion c(1, "auxiliary fixed points psi and rho", 1.0);
    const auto law = SurvivorLaw::poisson_binomial(5.0, 0.6);
    const int d = 10;
    const OffspringLaw upper(Variant::SelfAvoiding, law, d + 1);
    const OffspringLaw lower(Variant::MoveForwardOrDie, law, d);
    const double psi =
        smallest_fixed_point([&](double s) { return upper.pgf(s); }).value;
    const double rho =
        smallest_fixed_point([&](double s) { return lower.pgf(s); }).value;
    c.expect_close(psi, 0.141484, 1e-5, "psi");
    c.expect_close(rho, 0.162176, 1e-5, "rho");
    c.finish();
  }

  {  // 2. Survival probability bounds at the same parameters.
    Criterion c(2, "survival probability bounds", 1.0);
    const auto law = SurvivorLaw::poisson_binomial(5.0, 0.6);
    const auto b = survival_prob_bounds(law, 10);
    c.expect_close(b.lower, 0.85153, 1e-4, "lower bound");
    c.expect_close(b.upper, 0.858516, 1e-4, "upper bound");
    c.finish();
  }

  {  // 3. Critical-p bracket at (lambda=10, d=30).
    Criterion c(3, "critical catastrophe-survival bracket", 5.0);
    const auto b = critical_p_bracket(10.0, 30);
    c.expect_close(b.lower, 0.0962, 1e-4, "bracket lower");
    c.expect_close(b.upper, 0.0996, 1e-4, "bracket upper");
    c.finish();
  }

  {  // 4. Colony counts at (lambda=9, p=0.099, d=800) and the limit.
    Criterion c(4, "expected colony counts and limit", 10.0);
    const auto law = SurvivorLaw::poisson_binomial(9.0, 0.099);
    const auto b = expected_colonies_bounds(law, 800);
    c.expect_close(b.lower, 74.5761, 1e-3, "colonies lower");
    c.expect_close(b.upper, 82.0181, 1e-3, "colonies upper");
    c.expect_close(expected_colonies_limit(law), 100.0, 1e-9, "limit");
    c.finish();
  }

  {  // 5. Mean extinction times, lambda=1, p=1/2, d=2..6, both schemes.
    Criterion c(5, "extinction-time table by quadrature", 10.0);
    const auto law = SurvivorLaw::poisson_binomial(1.0, 0.5);
    const double tau_u[] = {3.494, 3.862, 4.159, 4.408, 4.623};
    const double tau_i[] = {3.831, 4.372, 4.779, 5.108, 5.384};
    for (int d = 2; d <= 6; ++d) {
      c.expect_close(extinction_time_mean(Variant::SelfAvoiding, law, d),
                     tau_u[d - 2], 1e-3, "tau_u d=" + std::to_string(d));
      c.expect_close(extinction_time_mean(Variant::Independent, law, d),
                     tau_i[d - 2], 1e-3, "tau_i d=" + std::to_string(d));
    }
    c.finish();
  }

  {  // 6. Monte Carlo vs analytics, Self-Avoiding, lambda=1, p=1/2, d=3.
    Criterion c(6, "Monte Carlo agreement for the self-avoiding process", 60.0);
    SimConfig config;
    config.variant = Variant::SelfAvoiding;
    config.law = SurvivorLaw::poisson_binomial(1.0, 0.5);
    config.d = 3;
    config.master_seed = 20260823;
    const long replicas = 100000;
    const auto outcomes = run_replicas(config, replicas);
    const auto s = aggregate(outcomes);
    c.expect(s.censored == 0, "subcritical run produced censored replicas");

    const double tau_gap = std::abs(s.mean_extinction_time - 3.862);
    c.expect(tau_gap <= 3.0 * s.se_extinction_time,
             "mean extinction time " + std::to_string(s.mean_extinction_time) +
                 " not within 3 SE of 3.862");

    // Total progeny of the simulated branching process (every colony has d
    // forward boxes): E(I) = 1/(1 - E(Y)).
    const double mean_y = offspring_mean(Variant::SelfAvoiding, config.law, 3);
    const double exact_i = 1.0 / (1.0 - mean_y);
    const double colony_gap = std::abs(s.mean_colonies - exact_i);
    c.expect(colony_gap <= 3.0 * s.se_colonies,
             "mean colonies " + std::to_string(s.mean_colonies) +
                 " not within 3 SE of " + std::to_string(exact_i));

    for (long n = 0; n <= 10; ++n) {
      long hits = 0;
      for (const auto& o : outcomes) hits += o.reach <= n ? 1 : 0;
      const double empirical =
          static_cast<double>(hits) / static_cast<double>(replicas);
      const double exact =
          reach_cdf_exact(Variant::SelfAvoiding, config.law, 3, n);
      const double sigma =
          std::sqrt(exact * (1.0 - exact) / static_cast<double>(replicas));
      c.expect(std::abs(empirical - exact) <= 3.0 * sigma + 1e-12,
               "reach CDF at n=" + std::to_string(n) + " off by more than 3 sigma");
    }
    c.finish();
  }

  {  // 7. Full-tree survival frequency inside the analytic sandwich.
    Criterion c(7, "full-tree survival sandwich", 120.0);
    SimConfig config;
    config.variant = Variant::FullTree;
    config.law = SurvivorLaw::poisson_binomial(5.0, 0.6);
    config.d = 10;
    config.master_seed = 7;
    // A replica that reaches 300 live colonies survives except with
    // probability below rho^300; counting cap hits as survival is exact to
    // far beyond Monte Carlo noise.
    config.caps.max_colonies = 300;
    config.caps.max_events = 100000;
    const long replicas = 100000;
    const auto s = aggregate(run_replicas(config, replicas));
    const auto b = survival_prob_bounds(config.law, 10);
    const double sigma = std::sqrt(s.survival_prop * (1.0 - s.survival_prop) /
                                   static_cast<double>(replicas));
    c.expect(s.survival_prop >= b.lower - 3.0 * sigma,
             "survival frequency " + std::to_string(s.survival_prop) +
                 " below widened lower bound " + std::to_string(b.lower));
    c.expect(s.survival_prop <= b.upper + 3.0 * sigma,
             "survival frequency " + std::to_string(s.survival_prop) +
                 " above widened upper bound " + std::to_string(b.upper));
    c.finish();
  }

  {  // 8. Conditional offspring pmfs vs exhaustive rational enumeration.
    Criterion c(8, "combinatorial enumeration oracle", 5.0);
    for (Variant v : {Variant::SelfAvoiding, Variant::MoveForwardOrDie,
                      Variant::FullTree, Variant::Independent}) {
      for (int d = 1; d <= 4; ++d) {
        for (long n = 0; n <= 6; ++n) {
          const auto exact = enumerated_pmf(v, d, n);
          for (long y = 0; y < static_cast<long>(exact.size()); ++y) {
            const double want = boost::rational_cast<double>(
                exact[static_cast<std::size_t>(y)]);
            const double got = offspring_cond_pmf(v, d, n, y);
            if (std::abs(got - want) > 1e-12) {
              c.expect(false, variant_name(v) + " d=" + std::to_string(d) +
                                  " n=" + std::to_string(n) +
                                  " y=" + std::to_string(y) + " mismatch");
            }
          }
        }
      }
    }
    c.finish();
  }

  {  // 9. Uniform vs independent dominance across the grid.
    Criterion c(9, "dispersal dominance suite", 30.0);
    struct Point {
      double lambda, p;
    };
    const Point grid[] = {{0.5, 0.5}, {1.0, 0.4}, {5.0, 0.15}};
    for (const auto& pt : grid) {
      const auto law = SurvivorLaw::poisson_binomial(pt.lambda, pt.p);
      for (int d = 2; d <= 6; ++d) {
        const std::string tag = " at lambda=" + std::to_string(pt.lambda) +
                                " p=" + std::to_string(pt.p) +
                                " d=" + std::to_string(d);
        const auto rep = compare_dispersal(law, d);
        c.expect(rep.mean_independent >= rep.mean_uniform - 1e-12,
                 "offspring mean dominance violated" + tag);
        if (rep.colonies_uniform && rep.colonies_independent) {
          c.expect(*rep.colonies_uniform <= *rep.colonies_independent + 1e-12,
                   "colony count dominance violated" + tag);
        } else {
          c.expect(false, "colony counts undefined" + tag);
        }
        if (rep.tau_uniform && rep.tau_independent) {
          c.expect(*rep.tau_uniform <= *rep.tau_independent + 1e-9,
                   "extinction time dominance violated" + tag);
        } else {
          c.expect(false, "extinction times undefined" + tag);
        }
      }
    }
    c.finish();
  }

  {  // 10. Byte-identical CLI summaries across runs and thread counts.
    Criterion c(10, "deterministic summary output", 120.0);
    if (cli.empty()) {
      c.expect(false, "path to the CLI binary was not supplied");
    } else {
      const std::string base =
          "simulate --variant full-tree --lambda 1 --p 0.4 --d 3 "
          "--replicas 20000 --seed 4242";
      run_cli(cli, base + " --threads 1 --output acceptance_run_a.json");
      run_cli(cli, base + " --threads 1 --output acceptance_run_b.json");
      run_cli(cli, base + " --threads 8 --output acceptance_run_c.json");
      const std::string a = slurp("acceptance_run_a.json");
      const std::string b = slurp("acceptance_run_b.json");
      const std::string d = slurp("acceptance_run_c.json");
      c.expect(!a.empty(), "first run produced no output");
      c.expect(a == b, "repeated runs differ byte-for-byte");
      c.expect(a == d, "thread counts 1 and 8 differ byte-for-byte");
      std::remove("acceptance_run_a.json");
      std::remove("acceptance_run_b.json");
      std::remove("acceptance_run_c.json");
    }
    c.finish();
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
