// Times the OpenMP trial kernel against the serial reference on the two
// pipeline experiments, for both physics engines, and verifies the results
// are bit-identical.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "telesim/experiments.hpp"

using namespace telesim;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const char* engine_label(EngineKind k) {
  return k == EngineKind::StandardQM ? "qm" : "es";
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t pulses = argc > 1 ? std::strtoull(argv[1], nullptr, 10)
                                        : 2000000;
  const int threads = argc > 2 ? std::atoi(argv[2]) : 8;

  experiments::PhysicsConfig physics;
  physics.p_pair = 0.2;
  physics.epsilon = 0.05;

  std::printf("%-22s %-4s %12s %12s %9s\n", "experiment", "eng", "serial[s]",
              "omp[s]", "speedup");

  int mismatches = 0;
  for (auto engine : {EngineKind::StandardQM, EngineKind::ElementaryState}) {
    {
      auto t0 = Clock::now();
      const auto serial = experiments::run_fig3(45.0, 0.0, engine, physics,
                                                pulses, 7, 0);
      const double ts = seconds_since(t0);
      t0 = Clock::now();
      const auto parallel = experiments::run_fig3(45.0, 0.0, engine, physics,
                                                  pulses, 7, threads);
      const double tp = seconds_since(t0);
      if (serial.n_minus != parallel.n_minus ||
          serial.n_plus != parallel.n_plus ||
          serial.n_triples != parallel.n_triples) {
        std::printf("MISMATCH between serial and parallel fig3 results\n");
        ++mismatches;
      }
      std::printf("%-22s %-4s %12.3f %12.3f %8.2fx\n", "fig3 (coder 45)",
                  engine_label(engine), ts, tp, ts / tp);
    }
    {
      auto t0 = Clock::now();
      const auto serial =
          experiments::run_swap(0.0, 0.0, engine, physics, pulses, 11, 0);
      const double ts = seconds_since(t0);
      t0 = Clock::now();
      const auto parallel =
          experiments::run_swap(0.0, 0.0, engine, physics, pulses, 11, threads);
      const double tp = seconds_since(t0);
      if (serial.cells != parallel.cells ||
          serial.n_gated != parallel.n_gated) {
        std::printf("MISMATCH between serial and parallel swap results\n");
        ++mismatches;
      }
      std::printf("%-22s %-4s %12.3f %12.3f %8.2fx\n", "swap (aligned)",
                  engine_label(engine), ts, tp, ts / tp);
    }
  }
  return mismatches;
}
