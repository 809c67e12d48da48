#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dispersal_lab/dispersal.hpp"
#include "dispersal_lab/rng.hpp"
#include "dispersal_lab/survivor_law.hpp"

namespace dlab {

/// Censoring thresholds. A replica that hits any cap is reported as
/// CensoredSurvival, never folded into extinction statistics.
struct Caps {
  long max_colonies = 10000;   // live colonies
  long max_events = 1000000;   // catastrophes processed
  double max_time = std::numeric_limits<double>::infinity();
};

struct SimConfig {
  Variant variant = Variant::SelfAvoiding;
  SurvivorLaw law = SurvivorLaw::poisson_binomial(1.0, 0.5);
  int d = 2;
  Caps caps;
  std::uint64_t master_seed = 0;
};

enum class SimStatus { Extinct, CensoredSurvival };

struct SimOutcome {
  SimStatus status = SimStatus::Extinct;
  double extinction_time = 0.0;  // defined only when Extinct
  long reach = 0;                // farthest colonized distance from the origin
  long colonies_created = 1;     // counts the initial colony
};

/// Per-colony genealogy record, for test-side verification of replica
/// bookkeeping.
struct ColonyRecord {
  long parent = -1;  // index into the genealogy, -1 for the initial colony
  double birth = 0.0;
  double death = 0.0;
  long depth = 0;
};

/// One event-driven replica, keyed by catastrophe times; deterministic given
/// (master_seed, replica_index).
SimOutcome run_replica(const SimConfig& config, std::uint64_t replica_index,
                       std::vector<ColonyRecord>* genealogy = nullptr);

/// Serial reference loop over replicas.
std::vector<SimOutcome> run_replicas_serial(const SimConfig& config,
                                            long replicas);

/// OpenMP loop over replicas; outcomes are identical to the serial reference
/// for every thread count because each replica owns its RNG stream and slot.
std::vector<SimOutcome> run_replicas(const SimConfig& config, long replicas,
                                     int threads = 0);

struct Summary {
  long replicas = 0;
  long extinct = 0;
  long censored = 0;
  double survival_prop = 0.0;
  double survival_ci_low = 0.0;   // Wilson score interval, 95%
  double survival_ci_high = 0.0;
  double mean_extinction_time = 0.0;  // over Extinct replicas
  double se_extinction_time = 0.0;
  double mean_reach = 0.0;
  double se_reach = 0.0;
  double mean_colonies = 0.0;
  double se_colonies = 0.0;
};

/// Deterministic reduction in replica order.
Summary aggregate(const std::vector<SimOutcome>& outcomes);

Summary estimate(const SimConfig& config, long replicas, int threads = 0);

/// Requested worker count, falling back to DISPERSAL_LAB_THREADS and then to
/// the available parallelism.
int resolve_threads(int requested);

}  // namespace dlab
