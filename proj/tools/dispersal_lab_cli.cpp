// Command-line front end: closed-form analytics, Monte Carlo estimation, and
// reproduction of the reference tables, as CSV or JSON.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dispersal_lab/analytics.hpp"
#include "dispersal_lab/dispersal.hpp"
#include "dispersal_lab/errors.hpp"
#include "dispersal_lab/simulator.hpp"
#include "dispersal_lab/survivor_law.hpp"

namespace {

using nlohmann::ordered_json;

struct LawFlags {
  double lambda = 1.0;
  double p = 0.5;
  std::string law_file;
  bool lambda_set = false;
  bool p_set = false;
};

struct OutputFlags {
  std::string path;       // empty means stdout
  std::string format;     // "csv", "json", or empty for the per-command default
  std::string precision;  // "6" (significant digits) or "full"
};

void add_law_flags(CLI::App* cmd, LawFlags* law) {
  auto* l = cmd->add_option("--lambda", law->lambda, "Colony growth rate");
  auto* p = cmd->add_option("--p", law->p, "Per-individual survival probability");
  auto* f = cmd->add_option("--law-file", law->law_file,
                            "JSON survivor-law file (excludes --lambda/--p)");
  f->excludes(l)->excludes(p);
  l->each([law](const std::string&) { law->lambda_set = true; });
  p->each([law](const std::string&) { law->p_set = true; });
}

void add_output_flags(CLI::App* cmd, OutputFlags* out) {
  cmd->add_option("--output", out->path, "Write to this file instead of stdout");
  cmd->add_option("--format", out->format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--precision", out->precision,
                  "Significant digits, or 'full' for round-trip doubles");
}

dlab::SurvivorLaw make_law(const LawFlags& law) {
  if (!law.law_file.empty()) {
    std::ifstream in(law.law_file);
    if (!in) throw dlab::DomainError("cannot open law file '" + law.law_file + "'");
    nlohmann::json j;
    in >> j;
    return dlab::SurvivorLaw::from_json(j);
  }
  return dlab::SurvivorLaw::poisson_binomial(law.lambda, law.p);
}

int parse_precision(const OutputFlags& out) {
  if (out.precision.empty()) return 6;
  if (out.precision == "full") return 17;
  const int digits = std::atoi(out.precision.c_str());
  if (digits < 1 || digits > 17) {
    throw dlab::DomainError("--precision must be 1..17 or 'full'");
  }
  return digits;
}

/// Round to the printed precision so that JSON and CSV agree exactly.
double round_sig(double v, int digits) {
  if (!std::isfinite(v) || digits >= 17) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

void emit(const std::string& text, const OutputFlags& out) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) throw dlab::DomainError("cannot open output file '" + out.path + "'");
  file << text;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

/// Flat JSON record to a two-line CSV (header + row), null as empty field.
std::string json_record_to_csv(const ordered_json& j) {
  std::string header, row;
  bool first = true;
  for (const auto& [key, value] : j.items()) {
    if (!first) {
      header += ',';
      row += ',';
    }
    first = false;
    header += csv_field(key);
    if (value.is_null()) {
      // empty field
    } else if (value.is_string()) {
      row += csv_field(value.get<std::string>());
    } else {
      row += csv_field(value.dump());
    }
  }
  return header + "\r\n" + row + "\r\n";
}

void emit_record(const ordered_json& j, const OutputFlags& out) {
  if (out.format == "csv") {
    emit(json_record_to_csv(j), out);
  } else {
    emit(dump_json(j), out);
  }
}

ordered_json law_params(const LawFlags& law, const dlab::SurvivorLaw& made) {
  ordered_json params;
  if (!law.law_file.empty()) {
    params["law"] = made.to_json();
  } else {
    params["lambda"] = law.lambda;
    params["p"] = law.p;
  }
  return params;
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeFlags {
  LawFlags law;
  int d = 2;
  std::string quantity;
  long n = 10;  // reach CDF argument
  std::string variant = "full-tree";
  OutputFlags out;
};

int cmd_analyze(const AnalyzeFlags& flags) {
  const int digits = parse_precision(flags.out);
  const auto sig = [&](double v) { return round_sig(v, digits); };

  ordered_json rec;
  rec["quantity"] = flags.quantity;

  if (flags.quantity == "critical-p") {
    if (!flags.law.law_file.empty()) {
      throw dlab::DomainError("critical-p needs --lambda, not a tabulated law");
    }
    const auto bracket = dlab::critical_p_bracket(flags.law.lambda, flags.d);
    rec["params"] = {{"lambda", flags.law.lambda}, {"d", flags.d}};
    rec["lower"] = sig(bracket.lower);
    rec["upper"] = sig(bracket.upper);
    rec["method"] = "bisection on the phase-transition boundaries";
    emit_record(rec, flags.out);
    return 0;
  }

  const dlab::SurvivorLaw law = make_law(flags.law);
  ordered_json params = law_params(flags.law, law);
  params["d"] = flags.d;

  if (flags.quantity == "survival") {
    const auto bounds = dlab::survival_prob_bounds(law, flags.d);
    rec["params"] = params;
    rec["lower"] = sig(bounds.lower);
    rec["upper"] = sig(bounds.upper);
    rec["class"] = dlab::survival_class_name(dlab::classify_survival(law, flags.d));
    rec["method"] = bounds.lower_source + " / " + bounds.upper_source;
  } else if (flags.quantity == "reach") {
    const auto bounds = dlab::reach_cdf_bounds(law, flags.d, flags.n);
    params["n"] = flags.n;
    rec["params"] = params;
    rec["lower"] = sig(bounds.lower);
    rec["upper"] = sig(bounds.upper);
    rec["method"] = bounds.lower_source + " / " + bounds.upper_source;
  } else if (flags.quantity == "colonies") {
    const auto bounds = dlab::expected_colonies_bounds(law, flags.d);
    rec["params"] = params;
    rec["lower"] = sig(bounds.lower);
    rec["upper"] = sig(bounds.upper);
    if (std::abs(bounds.upper - bounds.lower) <= 1e-12 * (1.0 + bounds.upper)) {
      rec["exact"] = sig(bounds.lower);
    }
    rec["method"] = bounds.lower_source + " / " + bounds.upper_source;
  } else if (flags.quantity == "extinction-time") {
    const dlab::Variant v = dlab::variant_from_name(flags.variant);
    params["variant"] = flags.variant;
    rec["params"] = params;
    if (v == dlab::Variant::FullTree) {
      const auto bounds = dlab::extinction_time_bounds_fulltree(law, flags.d);
      rec["lower"] = sig(bounds.lower);
      rec["upper"] = sig(bounds.upper);
      rec["method"] = bounds.lower_source + " / " + bounds.upper_source;
    } else {
      rec["exact"] = sig(dlab::extinction_time_mean(v, law, flags.d));
      rec["method"] = "quadrature of (1-s)/(G(s)-s)";
    }
  } else if (flags.quantity == "limits") {
    rec["params"] = params;
    const double nu = 1.0 - dlab::survival_prob_limit(law);
    rec["nu"] = sig(nu);
    rec["survival_limit"] = sig(1.0 - nu);
    if (law.mean() < 1.0) {
      rec["colonies_limit"] = sig(dlab::expected_colonies_limit(law));
      rec["reach_limit_mean"] = sig(dlab::reach_limit_mean(law));
    } else {
      rec["colonies_limit"] = nullptr;
      rec["reach_limit_mean"] = nullptr;
    }
    rec["method"] = "d -> infinity limit laws";
  } else {
    throw dlab::DomainError("unknown quantity '" + flags.quantity + "'");
  }
  emit_record(rec, flags.out);
  return 0;
}

// --------------------------------------------------------------- simulate --

struct SimulateFlags {
  LawFlags law;
  std::string variant = "self-avoiding";
  int d = 2;
  long replicas = 10000;
  std::uint64_t seed = 0;
  long max_colonies = 10000;
  long max_events = 1000000;
  double max_time = 0.0;  // 0 means unbounded
  int threads = 0;
  std::string raw_path;
  OutputFlags out;
};

int cmd_simulate(const SimulateFlags& flags) {
  const dlab::SurvivorLaw law = make_law(flags.law);
  dlab::SimConfig config;
  config.variant = dlab::variant_from_name(flags.variant);
  config.law = law;
  config.d = flags.d;
  config.caps.max_colonies = flags.max_colonies;
  config.caps.max_events = flags.max_events;
  if (flags.max_time > 0.0) config.caps.max_time = flags.max_time;
  config.master_seed = flags.seed;

  const auto outcomes = dlab::run_replicas(config, flags.replicas, flags.threads);
  const dlab::Summary s = dlab::aggregate(outcomes);

  if (!flags.raw_path.empty()) {
    std::ofstream raw(flags.raw_path, std::ios::binary);
    if (!raw) {
      throw dlab::DomainError("cannot open raw output '" + flags.raw_path + "'");
    }
    raw << "replica_index,status,extinction_time,reach,colonies_created\r\n";
    char buf[64];
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      const bool extinct = o.status == dlab::SimStatus::Extinct;
      std::snprintf(buf, sizeof(buf), "%.17g", o.extinction_time);
      raw << i << ',' << (extinct ? "extinct" : "censored_survival") << ','
          << (extinct ? buf : "") << ',' << o.reach << ',' << o.colonies_created
          << "\r\n";
    }
  }

  ordered_json params = law_params(flags.law, law);
  params["variant"] = flags.variant;
  params["d"] = flags.d;
  params["replicas"] = flags.replicas;
  params["seed"] = flags.seed;
  params["max_colonies"] = flags.max_colonies;
  params["max_events"] = flags.max_events;
  if (flags.max_time > 0.0) params["max_time"] = flags.max_time;

  ordered_json rec;
  rec["command"] = "simulate";
  rec["params"] = params;
  rec["replicas"] = s.replicas;
  rec["extinct"] = s.extinct;
  rec["censored"] = s.censored;
  rec["survival_prop"] = s.survival_prop;
  rec["survival_ci_low"] = s.survival_ci_low;
  rec["survival_ci_high"] = s.survival_ci_high;
  rec["mean_extinction_time"] = s.mean_extinction_time;
  rec["se_extinction_time"] = s.se_extinction_time;
  rec["mean_reach"] = s.mean_reach;
  rec["se_reach"] = s.se_reach;
  rec["mean_colonies"] = s.mean_colonies;
  rec["se_colonies"] = s.se_colonies;
  emit_record(rec, flags.out);
  return 0;
}

// ---------------------------------------------------------------- compare --

struct CompareFlags {
  LawFlags law;
  int d = 2;
  OutputFlags out;
};

int cmd_compare(const CompareFlags& flags) {
  const int digits = parse_precision(flags.out);
  const auto sig = [&](double v) { return round_sig(v, digits); };
  const dlab::SurvivorLaw law = make_law(flags.law);
  const dlab::ComparisonReport report = dlab::compare_dispersal(law, flags.d);

  ordered_json params = law_params(flags.law, law);
  params["d"] = flags.d;

  const auto opt = [&](const std::optional<double>& v) {
    return v ? ordered_json(sig(*v)) : ordered_json(nullptr);
  };
  ordered_json rec;
  rec["command"] = "compare";
  rec["params"] = params;
  rec["mean_uniform"] = sig(report.mean_uniform);
  rec["mean_independent"] = sig(report.mean_independent);
  rec["colonies_uniform"] = opt(report.colonies_uniform);
  rec["colonies_independent"] = opt(report.colonies_independent);
  rec["tau_uniform"] = opt(report.tau_uniform);
  rec["tau_independent"] = opt(report.tau_independent);
  rec["colonies_limit"] = opt(report.colonies_limit);
  rec["mean_dominance"] = report.mean_dominance;
  rec["colonies_dominance"] = report.colonies_dominance;
  emit_record(rec, flags.out);
  return 0;
}

// -------------------------------------------------------------- reproduce --

struct ReproduceFlags {
  std::string target;
  bool with_mc = false;
  long replicas = 20000;
  std::uint64_t seed = 1;
  OutputFlags out;
};

dlab::Summary mc_summary(dlab::Variant v, double lambda, double p, int d,
                         long replicas, std::uint64_t seed, long max_colonies) {
  dlab::SimConfig config;
  config.variant = v;
  config.law = dlab::SurvivorLaw::poisson_binomial(lambda, p);
  config.d = d;
  config.caps.max_colonies = max_colonies;
  config.master_seed = seed;
  return dlab::aggregate(dlab::run_replicas(config, replicas));
}

int cmd_reproduce(const ReproduceFlags& flags) {
  const int digits = parse_precision(flags.out);
  const auto sig = [&](double v) { return round_sig(v, digits); };

  if (flags.target == "table1") {
    // Mean extinction times, lambda = 1, p = 1/2, d = 2..6.
    const auto law = dlab::SurvivorLaw::poisson_binomial(1.0, 0.5);
    std::ostringstream csv;
    csv << "d,tau_uniform,tau_independent";
    if (flags.with_mc) csv << ",mc_tau_uniform,mc_tau_independent";
    csv << "\r\n";
    char buf[64];
    for (int d = 2; d <= 6; ++d) {
      const double tu =
          dlab::extinction_time_mean(dlab::Variant::SelfAvoiding, law, d);
      const double ti =
          dlab::extinction_time_mean(dlab::Variant::Independent, law, d);
      std::snprintf(buf, sizeof(buf), "%d,%.3f,%.3f", d, tu, ti);
      csv << buf;
      if (flags.with_mc) {
        const auto su = mc_summary(dlab::Variant::SelfAvoiding, 1.0, 0.5, d,
                                   flags.replicas, flags.seed, 10000);
        const auto si = mc_summary(dlab::Variant::Independent, 1.0, 0.5, d,
                                   flags.replicas, flags.seed, 10000);
        std::snprintf(buf, sizeof(buf), ",%.3f,%.3f", su.mean_extinction_time,
                      si.mean_extinction_time);
        csv << buf;
      }
      csv << "\r\n";
    }
    OutputFlags out = flags.out;
    if (out.format.empty()) out.format = "csv";
    if (out.format != "csv") {
      throw dlab::DomainError("table1 is a table; use --format csv");
    }
    emit(csv.str(), out);
    return 0;
  }

  ordered_json rec;
  rec["target"] = flags.target;
  if (flags.target == "example-pc") {
    const auto bracket = dlab::critical_p_bracket(10.0, 30);
    rec["params"] = {{"lambda", 10.0}, {"d", 30}};
    rec["lower"] = sig(bracket.lower);
    rec["upper"] = sig(bracket.upper);
  } else if (flags.target == "example-survival") {
    const auto law = dlab::SurvivorLaw::poisson_binomial(5.0, 0.6);
    const int d = 10;
    const auto bounds = dlab::survival_prob_bounds(law, d);
    const double psi = dlab::smallest_fixed_point([&](double s) {
      return dlab::offspring_pgf(dlab::Variant::SelfAvoiding, law, d + 1, s);
    }).value;
    const double rho = dlab::smallest_fixed_point([&](double s) {
      return dlab::offspring_pgf(dlab::Variant::MoveForwardOrDie, law, d, s);
    }).value;
    rec["params"] = {{"lambda", 5.0}, {"p", 0.6}, {"d", d}};
    rec["psi"] = sig(psi);
    rec["rho"] = sig(rho);
    rec["lower"] = sig(bounds.lower);
    rec["upper"] = sig(bounds.upper);
    if (flags.with_mc) {
      const auto s = mc_summary(dlab::Variant::FullTree, 5.0, 0.6, d,
                                flags.replicas, flags.seed, 300);
      rec["mc_survival_prop"] = s.survival_prop;
      rec["mc_ci_low"] = s.survival_ci_low;
      rec["mc_ci_high"] = s.survival_ci_high;
    }
  } else if (flags.target == "example-colonies") {
    const auto law = dlab::SurvivorLaw::poisson_binomial(9.0, 0.099);
    const auto bounds = dlab::expected_colonies_bounds(law, 800);
    rec["params"] = {{"lambda", 9.0}, {"p", 0.099}, {"d", 800}};
    rec["lower"] = sig(bounds.lower);
    rec["upper"] = sig(bounds.upper);
    rec["limit"] = sig(dlab::expected_colonies_limit(law));
  } else if (flags.target == "example-limits") {
    const auto law = dlab::SurvivorLaw::poisson_binomial(5.0, 0.6);
    const double limit = dlab::survival_prob_limit(law);
    const double lambda = 5.0, p = 0.6;
    const double closed = std::max(0.0, (p * (lambda + 1.0) - 1.0) / (lambda * p));
    rec["params"] = {{"lambda", lambda}, {"p", p}};
    rec["survival_limit"] = sig(limit);
    rec["survival_limit_closed_form"] = sig(closed);
  } else {
    throw dlab::DomainError("unknown target '" + flags.target + "'");
  }
  emit_record(rec, flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Catastrophe-and-dispersal population models on homogeneous trees"};
  app.require_subcommand(1);

  AnalyzeFlags analyze;
  auto* a = app.add_subcommand("analyze", "Closed-form bounds and exact values");
  add_law_flags(a, &analyze.law);
  a->add_option("--d", analyze.d, "Forward-neighbor count")->check(CLI::PositiveNumber);
  a->add_option("--quantity", analyze.quantity, "What to compute")
      ->required()
      ->check(CLI::IsMember({"survival", "critical-p", "reach", "colonies",
                             "extinction-time", "limits"}));
  a->add_option("--n", analyze.n, "Reach CDF argument P(M <= n)");
  a->add_option("--variant", analyze.variant,
                "Process for extinction-time (default full-tree bounds)");
  add_output_flags(a, &analyze.out);

  SimulateFlags simulate;
  auto* s = app.add_subcommand("simulate", "Event-driven Monte Carlo");
  add_law_flags(s, &simulate.law);
  s->add_option("--variant", simulate.variant, "Dispersal variant");
  s->add_option("--d", simulate.d, "Forward-neighbor count")->check(CLI::PositiveNumber);
  s->add_option("--replicas", simulate.replicas, "Replica count")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", simulate.seed, "Master seed");
  s->add_option("--max-colonies", simulate.max_colonies, "Live-colony cap");
  s->add_option("--max-events", simulate.max_events, "Catastrophe cap");
  s->add_option("--max-time", simulate.max_time, "Time horizon (0 = none)");
  s->add_option("--threads", simulate.threads,
                "Worker count (0 = DISPERSAL_LAB_THREADS or hardware)");
  s->add_option("--raw", simulate.raw_path, "Per-replica outcome CSV path");
  add_output_flags(s, &simulate.out);

  CompareFlags compare;
  auto* c = app.add_subcommand("compare", "Uniform vs independent dispersion");
  add_law_flags(c, &compare.law);
  c->add_option("--d", compare.d, "Forward-neighbor count")->check(CLI::PositiveNumber);
  add_output_flags(c, &compare.out);

  ReproduceFlags reproduce;
  auto* r = app.add_subcommand("reproduce", "Reference tables and examples");
  r->add_option("--target", reproduce.target, "Which artifact")->required();
  r->add_flag("--with-mc", reproduce.with_mc, "Add Monte Carlo cross-checks");
  r->add_option("--replicas", reproduce.replicas, "MC replicas for --with-mc");
  r->add_option("--seed", reproduce.seed, "MC seed for --with-mc");
  add_output_flags(r, &reproduce.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze);
    if (s->parsed()) return cmd_simulate(simulate);
    if (c->parsed()) return cmd_compare(compare);
    if (r->parsed()) return cmd_reproduce(reproduce);
  } catch (const dlab::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dlab::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dlab::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
