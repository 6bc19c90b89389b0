#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "telesim/detection.hpp"
#include "telesim/photon.hpp"
#include "telesim/qcore.hpp"

namespace telesim::experiments {

// Device parameters shared by the pipeline experiments. The defaults are the
// idealized values the analytic checks assume; jitter and coherence_time
// give the small imperfection level used by the dip and rho runs.
struct PhysicsConfig {
  double p_pair = 0.05;         // pair emission probability per pump pass
  double jitter = 0.1;          // emission-time spread, time units
  double coherence_time = 1.0;  // overlap scale of the interference dip
  double epsilon = 0.0;         // P(S^2 = 0) for unprearranged pairs
  double efficiency = 1.0;      // all detectors
  double dark_rate = 0.0;       // dark counts per detector per slot
  double window = 0.5;          // coincidence window, time units
  std::map<detection::DetectorId, double> delays;  // coincidence-circuit
};

struct TeleportStats {
  std::array<std::uint64_t, 4> branch_counts{};  // indexed by BellKind order
  double fidelity_sum = 0.0;
  double fidelity_min = 1.0;
  std::uint64_t n_trials = 0;

  void merge(const TeleportStats& other);
  double post_correction_fidelity() const {
    return n_trials ? fidelity_sum / double(n_trials) : 0.0;
  }
};

// Idealized protocol: per trial, prepare photon 1 in (alpha, beta) and the
// resource pair 2-3, run a complete Bell measurement on photons 1-2, send
// the outcome tag over the classical channel, correct photon 3 with the tag
// alone, and score fidelity against the input. Hidden-variable trials
// require a linear-polarization input.
TeleportStats run_teleport_ideal(qcore::Complex alpha, qcore::Complex beta,
                                 std::uint64_t n, EngineKind engine,
                                 std::uint64_t seed, int workers = 1);

struct Fig3Stats {
  std::uint64_t n_minus = 0;      // D0-D1-D2-D-3 (no matching +3 in slot)
  std::uint64_t n_plus = 0;       // D0-D1-D2-D+3 (no matching -3 in slot)
  std::uint64_t n_triples = 0;    // D0-D1-D2 gates (the normalization)
  std::uint64_t n_candidate = 0;  // pulses with both pairs emitted
  std::uint64_t n_pulses = 0;
  double mirror_delay = 0.0;
  double coder_angle = 0.0;

  void merge(const Fig3Stats& other);
};

// The teleportation pipeline: double-pass source, coder on photon 1,
// photons 1-2 into the beam splitter with visibility set by the mirror
// delay, photon 3 through the splitter oriented along the coder angle
// (transmit = the coded polarization = detector D+3), photon 0 straight to
// D0, then detection and coincidence matching.
Fig3Stats run_fig3(double coder_angle, double mirror_delay, EngineKind engine,
                   const PhysicsConfig& physics, std::uint64_t n_pulses,
                   std::uint64_t seed, int workers = 1);

struct DipPoint {
  double delay = 0.0;
  double rate_minus = 0.0;  // per accepted D0-D1-D2 gate
  double rate_plus = 0.0;
  Fig3Stats stats;
};

std::vector<DipPoint> scan_dip(double coder_angle,
                               const std::vector<double>& delays,
                               EngineKind engine, const PhysicsConfig& physics,
                               std::uint64_t n_pulses_per_point,
                               std::uint64_t seed, int workers = 1);

struct RhoResult {
  double rho = 0.0;
  double std_error = 0.0;
  bool undefined = false;  // the 90-degree arm saw no minus counts
  Fig3Stats arm45;
  Fig3Stats arm90;
};

// The discriminator: N-(45)/N-(90) with the 90-degree counts rescaled so
// both arms have equal totals N- + N+.
RhoResult compute_rho(const Fig3Stats& stats45, const Fig3Stats& stats90);

struct SwapStats {
  // Fourfold cells gated on D1-D2, indexed [photon0 branch][photon3 branch]
  // with 0 = transmit (+), 1 = reflect (-).
  std::array<std::array<std::uint64_t, 2>, 2> cells{};
  std::uint64_t n_gated = 0;      // D1-D2 coincidences
  std::uint64_t n_candidate = 0;  // pulses with both pairs
  std::uint64_t n_pulses = 0;
  double theta0 = 0.0;
  double theta3 = 0.0;

  void merge(const SwapStats& other);
  std::uint64_t cell_total() const;
};

// Entanglement swapping: two pairs, photons 1-2 into the beam splitter, the
// D1-D2 coincidence gates the trial, photons 0 and 3 analyzed at theta0 and
// theta3.
SwapStats run_swap(double theta0, double theta3, EngineKind engine,
                   const PhysicsConfig& physics, std::uint64_t n_pulses,
                   std::uint64_t seed, int workers = 1);

struct RotationPoint {
  double angle = 0.0;
  SwapStats stats;
  double min_cell_rate = 0.0;
  double max_cell_rate = 0.0;
  double contrast() const { return max_cell_rate - min_cell_rate; }
};

// run_swap with both analyzers rotated together; reports per-angle extrema
// so an engine's angle dependence (or lack of it) shows in one table.
std::vector<RotationPoint> rotation_scan(const std::vector<double>& angles,
                                         EngineKind engine,
                                         const PhysicsConfig& physics,
                                         std::uint64_t n_pulses_per_angle,
                                         std::uint64_t seed, int workers = 1);

}  // namespace telesim::experiments
