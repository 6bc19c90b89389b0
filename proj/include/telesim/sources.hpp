#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "telesim/photon.hpp"
#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"

namespace telesim::sources {

struct PumpPulse {
  std::uint64_t pulse_id = 0;
  double time = 0.0;  // one time unit per pulse slot
};

// One down-conversion pair. Under the state-vector engine `qm_pair` holds
// the PsiMinus state of the two photons (labels = photon ids) for the caller
// to fold into the trial state; under the hidden-variable engine the photon
// records carry linked elementary states instead.
struct EmissionEvent {
  int pass_index = 1;  // 1 = forward pass, 2 = after the retro mirror
  std::array<PhotonRecord, 2> pair;
  double emission_time = 0.0;
  std::optional<qcore::StateVector> qm_pair;
};

// Probabilistic pair emission from one pump pass: with probability p_pair a
// PsiMinus-correlated pair at pulse time + Gaussian jitter, else nothing.
std::optional<EmissionEvent> spdc_emit(const PumpPulse& pulse, double p_pair,
                                       double jitter, EngineKind engine,
                                       int photon_id_a, int photon_id_b,
                                       Rng& rng);

// The double-pass geometry: the pulse may emit pair {0,1} on the forward
// pass and pair {2,3} after reflecting from the mirror, `mirror_delay` later
// (the scan knob; 0 means the interferometer paths are exactly balanced).
// The two draws are independent, so both pairs appear with probability
// p_pair^2.
std::pair<std::optional<EmissionEvent>, std::optional<EmissionEvent>>
double_pass_emit(const PumpPulse& pulse, double p_pair, double mirror_delay,
                 double jitter, EngineKind engine, Rng& rng);

}  // namespace telesim::sources
