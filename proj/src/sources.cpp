#include "telesim/sources.hpp"

#include <stdexcept>

namespace telesim::sources {

std::optional<EmissionEvent> spdc_emit(const PumpPulse& pulse, double p_pair,
                                       double jitter, EngineKind engine,
                                       int photon_id_a, int photon_id_b,
                                       Rng& rng) {
  if (p_pair < 0.0 || p_pair > 1.0)
    throw std::invalid_argument("spdc_emit: p_pair outside [0, 1]");
  if (!rng.bernoulli(p_pair)) return std::nullopt;

  EmissionEvent ev;
  ev.emission_time =
      pulse.time + (jitter > 0.0 ? rng.normal(0.0, jitter) : 0.0);
  ev.pair[0] = {photon_id_a, PathTag::AtSource, ev.emission_time, nullptr};
  ev.pair[1] = {photon_id_b, PathTag::AtSource, ev.emission_time, nullptr};
  if (engine == EngineKind::StandardQM) {
    ev.qm_pair =
        qcore::bell_state(qcore::BellKind::PsiMinus, photon_id_a, photon_id_b);
  } else {
    auto [a, b] = elementary::ElementaryState::prepare_epr_pair();
    ev.pair[0].es = a;
    ev.pair[1].es = b;
  }
  return ev;
}

std::pair<std::optional<EmissionEvent>, std::optional<EmissionEvent>>
double_pass_emit(const PumpPulse& pulse, double p_pair, double mirror_delay,
                 double jitter, EngineKind engine, Rng& rng) {
  auto first = spdc_emit(pulse, p_pair, jitter, engine, 0, 1, rng);
  if (first) first->pass_index = 1;
  PumpPulse second_pass{pulse.pulse_id, pulse.time + mirror_delay};
  auto second = spdc_emit(second_pass, p_pair, jitter, engine, 2, 3, rng);
  if (second) second->pass_index = 2;
  return {std::move(first), std::move(second)};
}

}  // namespace telesim::sources
