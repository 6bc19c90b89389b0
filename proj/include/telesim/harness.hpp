#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "telesim/rng.hpp"

namespace telesim::harness {

// Trials are processed in fixed blocks, each with its own stream seeded from
// (master_seed, block_index), and block results merge in block order. The
// decomposition is independent of the worker count, so a run is
// bit-reproducible for any number of threads. `finalize` runs once per block
// after its trials (event-stream matching happens there).
inline constexpr std::uint64_t kTrialBlock = 4096;

// OpenMP kernel. workers <= 0 falls back to the serial reference below.
template <class Acc, class TrialFn, class FinalizeFn>
Acc run_trials(std::uint64_t n, std::uint64_t master_seed, int workers,
               TrialFn&& trial, FinalizeFn&& finalize);

// Serial reference: same block decomposition and streams, plain loop. Kept
// for tests and the benchmark; must produce bit-identical results.
template <class Acc, class TrialFn, class FinalizeFn>
Acc run_trials_serial(std::uint64_t n, std::uint64_t master_seed,
                      TrialFn&& trial, FinalizeFn&& finalize) {
  const std::uint64_t nblocks = (n + kTrialBlock - 1) / kTrialBlock;
  Acc total{};
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    Rng rng(mix_seed(master_seed, b));
    Acc part{};
    const std::uint64_t first = b * kTrialBlock;
    const std::uint64_t last = std::min(n, first + kTrialBlock);
    for (std::uint64_t i = first; i < last; ++i) trial(i, rng, part);
    finalize(part, rng);
    total.merge(part);
  }
  return total;
}

template <class Acc, class TrialFn, class FinalizeFn>
Acc run_trials(std::uint64_t n, std::uint64_t master_seed, int workers,
               TrialFn&& trial, FinalizeFn&& finalize) {
  if (workers <= 0)
    return run_trials_serial<Acc>(n, master_seed, std::forward<TrialFn>(trial),
                                  std::forward<FinalizeFn>(finalize));
  const std::uint64_t nblocks = (n + kTrialBlock - 1) / kTrialBlock;
  std::vector<Acc> parts(nblocks);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (std::int64_t b = 0; b < std::int64_t(nblocks); ++b) {
    Rng rng(mix_seed(master_seed, std::uint64_t(b)));
    const std::uint64_t first = std::uint64_t(b) * kTrialBlock;
    const std::uint64_t last = std::min(n, first + kTrialBlock);
    for (std::uint64_t i = first; i < last; ++i) trial(i, rng, parts[b]);
    finalize(parts[b], rng);
  }
  Acc total{};
  for (Acc& part : parts) total.merge(part);
  return total;
}

}  // namespace telesim::harness
