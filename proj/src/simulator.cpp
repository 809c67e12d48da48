#include "dispersal_lab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dispersal_lab/errors.hpp"

namespace dlab {

namespace {

struct Event {
  double time;
  long seq;     // creation order breaks floating-point ties
  long colony;  // index into the per-replica colony table
  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct Colony {
  long vertex;  // full-tree vertex index, or -1 for the auxiliary processes
  long depth;
  long gene;    // genealogy slot, -1 when not recording
};

// Lazily grown full-tree vertex table. Vertex 0 is the origin with d+1
// child directions; every other vertex has d forward children plus a parent.
class VertexTable {
 public:
  explicit VertexTable(int d) : d_(d) { add(-1, 0); }

  long child(long v, int slot) {
    if (children_[static_cast<std::size_t>(v)][static_cast<std::size_t>(slot)] < 0) {
      // add() grows children_, so index again instead of holding a reference.
      const long idx = add(v, depth_[static_cast<std::size_t>(v)] + 1);
      children_[static_cast<std::size_t>(v)][static_cast<std::size_t>(slot)] = idx;
    }
    return children_[static_cast<std::size_t>(v)][static_cast<std::size_t>(slot)];
  }

  long parent(long v) const { return parent_[static_cast<std::size_t>(v)]; }
  long depth(long v) const { return depth_[static_cast<std::size_t>(v)]; }
  bool occupied(long v) const { return occupied_[static_cast<std::size_t>(v)]; }
  void set_occupied(long v, bool b) { occupied_[static_cast<std::size_t>(v)] = b; }

 private:
  long add(long parent, long depth) {
    parent_.push_back(parent);
    depth_.push_back(depth);
    occupied_.push_back(false);
    children_.emplace_back(static_cast<std::size_t>(d_) + 1, -1L);
    return static_cast<long>(parent_.size()) - 1;
  }

  int d_;
  std::vector<long> parent_;
  std::vector<long> depth_;
  std::vector<char> occupied_;
  std::vector<std::vector<long>> children_;
};

}  // namespace

SimOutcome run_replica(const SimConfig& config, std::uint64_t replica_index,
                       std::vector<ColonyRecord>* genealogy) {
  if (config.caps.max_colonies < 1 || config.caps.max_events < 1 ||
      !(config.caps.max_time > 0.0)) {
    throw DomainError("run_replica: caps must be positive");
  }
  const int d = config.d;
  if (d < 1) throw DomainError("run_replica: d must be >= 1");
  const bool full_tree = config.variant == Variant::FullTree;

  Xoshiro256 rng(derive_replica_seed(config.master_seed, replica_index));

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;
  std::vector<Colony> colonies;
  VertexTable vertices(d);
  if (genealogy) genealogy->clear();

  const auto spawn = [&](long vertex, long depth, long parent_gene, double now) {
    const double death = now + rng.exponential();
    long gene = -1;
    if (genealogy) {
      gene = static_cast<long>(genealogy->size());
      genealogy->push_back({parent_gene, now, death, depth});
    }
    colonies.push_back({vertex, depth, gene});
    queue.push({death, static_cast<long>(colonies.size()) - 1,
                static_cast<long>(colonies.size()) - 1});
    if (full_tree) vertices.set_occupied(vertex, true);
  };

  spawn(full_tree ? 0 : -1, 0, -1, 0.0);

  SimOutcome out;
  long live = 1;
  long events = 0;
  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.time > config.caps.max_time) {
      out.status = SimStatus::CensoredSurvival;
      break;
    }
    queue.pop();
    --live;
    ++events;
    const Colony& dying = colonies[static_cast<std::size_t>(ev.colony)];
    const long depth = dying.depth;
    const long vertex = dying.vertex;
    const long gene = dying.gene;
    if (full_tree) vertices.set_occupied(vertex, false);

    const long survivors = config.law.sample(rng);
    if (survivors > 0) {
      const int boxes = full_tree ? d + 1 : box_count(config.variant, d);
      const std::vector<long> comp = sample_composition(survivors, boxes, rng);
      for (int slot = 0; slot < boxes; ++slot) {
        if (comp[static_cast<std::size_t>(slot)] == 0) continue;
        if (config.variant == Variant::SelfAvoiding) {
          spawn(-1, depth + 1, gene, ev.time);
        } else if (config.variant == Variant::MoveForwardOrDie) {
          if (slot < d) spawn(-1, depth + 1, gene, ev.time);
          // slot d points back toward the origin: the group dies
        } else {  // FullTree
          long target;
          if (vertex == 0) {
            target = vertices.child(0, slot);  // all d+1 directions are fresh
          } else if (slot < d) {
            target = vertices.child(vertex, slot);
          } else {
            target = vertices.parent(vertex);
          }
          if (!vertices.occupied(target)) {
            spawn(target, vertices.depth(target), gene, ev.time);
          }
        }
      }
    }
    live = static_cast<long>(queue.size());

    if (live == 0) {
      out.status = SimStatus::Extinct;
      out.extinction_time = ev.time;
      break;
    }
    if (live > config.caps.max_colonies || events >= config.caps.max_events) {
      out.status = SimStatus::CensoredSurvival;
      break;
    }
  }

  out.colonies_created = static_cast<long>(colonies.size());
  long reach = 0;
  for (const auto& c : colonies) reach = std::max(reach, c.depth);
  out.reach = reach;
  return out;
}

std::vector<SimOutcome> run_replicas_serial(const SimConfig& config,
                                            long replicas) {
  std::vector<SimOutcome> outcomes(static_cast<std::size_t>(replicas));
  for (long i = 0; i < replicas; ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_replica(config, static_cast<std::uint64_t>(i));
  }
  return outcomes;
}

std::vector<SimOutcome> run_replicas(const SimConfig& config, long replicas,
                                     int threads) {
  const int workers = resolve_threads(threads);
  std::vector<SimOutcome> outcomes(static_cast<std::size_t>(replicas));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
  for (long i = 0; i < replicas; ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_replica(config, static_cast<std::uint64_t>(i));
  }
#else
  (void)workers;
  for (long i = 0; i < replicas; ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_replica(config, static_cast<std::uint64_t>(i));
  }
#endif
  return outcomes;
}

Summary aggregate(const std::vector<SimOutcome>& outcomes) {
  Summary s;
  s.replicas = static_cast<long>(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.status == SimStatus::Extinct) {
      ++s.extinct;
    } else {
      ++s.censored;
    }
  }
  const double n = static_cast<double>(s.replicas);
  const double survived = static_cast<double>(s.censored);
  s.survival_prop = s.replicas > 0 ? survived / n : 0.0;
  if (s.replicas > 0) {
    constexpr double z = 1.959963984540054;  // 95% Wilson score interval
    const double phat = s.survival_prop;
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    s.survival_ci_low = std::max(0.0, center - half);
    s.survival_ci_high = std::min(1.0, center + half);
  }

  // Means over extinct replicas only; summation in replica order keeps the
  // reduction bit-reproducible.
  const auto mean_se = [&](auto&& value, double& mean, double& se) {
    if (s.extinct == 0) return;
    double sum = 0.0;
    for (const auto& o : outcomes) {
      if (o.status == SimStatus::Extinct) sum += value(o);
    }
    mean = sum / static_cast<double>(s.extinct);
    double sq = 0.0;
    for (const auto& o : outcomes) {
      if (o.status == SimStatus::Extinct) {
        const double dlt = value(o) - mean;
        sq += dlt * dlt;
      }
    }
    const double m = static_cast<double>(s.extinct);
    se = m > 1 ? std::sqrt(sq / (m - 1.0) / m) : 0.0;
  };
  mean_se([](const SimOutcome& o) { return o.extinction_time; },
          s.mean_extinction_time, s.se_extinction_time);
  mean_se([](const SimOutcome& o) { return static_cast<double>(o.reach); },
          s.mean_reach, s.se_reach);
  mean_se(
      [](const SimOutcome& o) { return static_cast<double>(o.colonies_created); },
      s.mean_colonies, s.se_colonies);
  return s;
}

Summary estimate(const SimConfig& config, long replicas, int threads) {
  if (replicas < 1) throw DomainError("estimate: replicas must be >= 1");
  return aggregate(run_replicas(config, replicas, threads));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DISPERSAL_LAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace dlab
