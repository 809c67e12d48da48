// Times the parallel replica loop against the serial reference and checks
// that both produce identical outcomes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "dispersal_lab/simulator.hpp"

namespace {

template <class F>
double timed(F&& f, std::vector<dlab::SimOutcome>* out) {
  const auto start = std::chrono::steady_clock::now();
  *out = f();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

bool same(const std::vector<dlab::SimOutcome>& a,
          const std::vector<dlab::SimOutcome>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].status != b[i].status || a[i].extinction_time != b[i].extinction_time ||
        a[i].reach != b[i].reach || a[i].colonies_created != b[i].colonies_created) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  long replicas = 200000;
  int threads = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--replicas") == 0) replicas = std::atol(argv[i + 1]);
    if (std::strcmp(argv[i], "--threads") == 0) threads = std::atoi(argv[i + 1]);
  }

  dlab::SimConfig config;
  config.variant = dlab::Variant::SelfAvoiding;
  config.law = dlab::SurvivorLaw::poisson_binomial(1.0, 0.5);
  config.d = 3;
  config.master_seed = 42;

  std::vector<dlab::SimOutcome> serial, parallel;
  const double t_serial =
      timed([&] { return dlab::run_replicas_serial(config, replicas); }, &serial);
  const int workers = dlab::resolve_threads(threads);
  const double t_parallel =
      timed([&] { return dlab::run_replicas(config, replicas, threads); }, &parallel);

  std::printf("replicas            %ld\n", replicas);
  std::printf("serial reference    %.3f s  (%.0f replicas/s)\n", t_serial,
              replicas / t_serial);
  std::printf("parallel (%2d thr)   %.3f s  (%.0f replicas/s)\n", workers,
              t_parallel, replicas / t_parallel);
  std::printf("speedup             %.2fx\n", t_serial / t_parallel);

  if (!same(serial, parallel)) {
    std::printf("MISMATCH: parallel outcomes differ from the serial reference\n");
    return 1;
  }
  std::printf("outcomes identical  yes\n");
  return 0;
}
