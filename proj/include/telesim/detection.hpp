#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "telesim/rng.hpp"

namespace telesim::detection {

enum class DetectorId { D0, DPlus0, DMinus0, D1, D2, DPlus3, DMinus3 };

const char* detector_name(DetectorId id);

struct DetectorConfig {
  DetectorId id = DetectorId::D0;
  double efficiency = 1.0;
  double dark_rate = 0.0;          // expected dark counts per pulse slot
  bool number_resolving = false;   // diagnostics only; threshold by default
};

// One or more photons reaching a detector face at the same instant.
struct Arrival {
  DetectorId detector = DetectorId::D0;
  double time = 0.0;
  int photon_count = 1;
};

struct DetectionEvent {
  DetectorId detector = DetectorId::D0;
  double time = 0.0;
  bool true_hit = true;  // diagnostic only; matching never reads it
};

// Threshold detection: the detector fires if at least one photon of the
// arrival registers, so a two-photon hit is indistinguishable from a
// one-photon hit. With number_resolving set, each photon registers
// separately (diagnostics).
std::optional<DetectionEvent> detect(const Arrival& arrival,
                                     const DetectorConfig& cfg, Rng& rng);

std::vector<DetectionEvent> detect_counting(const Arrival& arrival,
                                            const DetectorConfig& cfg,
                                            Rng& rng);

// Poisson-distributed spurious events, uniform over the n_slots pulse slots
// (one time unit per slot).
std::vector<DetectionEvent> dark_counts(const DetectorConfig& cfg,
                                        std::uint64_t n_slots, Rng& rng);

struct CoincidenceRecord {
  std::vector<DetectorId> pattern;
  std::uint64_t pulse_id = 0;  // nearest slot of the earliest member
  std::vector<double> times;   // raw event times, pattern order
};

// Greedy chronological matching: walk events in delay-adjusted time order,
// emitting a record whenever every pattern detector has an unconsumed event
// within `window` of the earliest pending one; each event feeds at most one
// record. Per-detector delays are added to event times before comparison.
std::vector<CoincidenceRecord> match_coincidences(
    std::vector<DetectionEvent> events, const std::vector<DetectorId>& pattern,
    double window, const std::map<DetectorId, double>& delays = {});

}  // namespace telesim::detection
