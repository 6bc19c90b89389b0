#include "telesim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "telesim/harness.hpp"
#include "telesim/optics.hpp"
#include "telesim/sources.hpp"

namespace telesim::experiments {

using detection::Arrival;
using detection::DetectionEvent;
using detection::DetectorId;
using optics::PortLabel;
using qcore::BellKind;
using qcore::Complex;
using qcore::Qubit;
using qcore::StateVector;

namespace {

std::size_t kind_index(BellKind k) { return static_cast<std::size_t>(k); }

// Deterministic repolarization: project the photon in the coder basis, then
// rotate the orthogonal outcome onto the coder axis so the photon leaves
// with exactly the coded polarization.
StateVector repolarize(const StateVector& state, int label, double angle_deg,
                       Rng& rng) {
  auto m = qcore::measure_projective(state, label, angle_deg, rng);
  if (m.outcome > 0) return std::move(m.collapsed);
  const double r = qcore::deg_to_rad(angle_deg);
  const double c2 = std::cos(2.0 * r), s2 = std::sin(2.0 * r);
  // reflection swapping the two basis rays of the rotated basis
  return qcore::apply_one_qubit(m.collapsed, label, {-s2, c2, c2, s2});
}

Qubit qubit_of(const StateVector& single) {
  return {single.amplitudes()[0], single.amplitudes()[1]};
}

// Linear-polarization angle of (alpha, beta) if the state is linear up to a
// global phase; throws otherwise (the hidden-variable engine has no
// representation for elliptic polarization).
double linear_angle_of(Complex alpha, Complex beta) {
  const double cross = std::abs(std::imag(std::conj(alpha) * beta));
  if (cross > 1e-9)
    throw std::invalid_argument(
        "hidden-variable engine requires a linear-polarization input "
        "(relative phase 0 or 180 degrees)");
  const double phase =
      std::abs(alpha) >= std::abs(beta) ? std::arg(alpha) : std::arg(beta);
  const Complex rot = std::polar(1.0, -phase);
  const double a = std::real(alpha * rot), b = std::real(beta * rot);
  return std::atan2(b, a) * 180.0 / 3.14159265358979323846;
}

double id_map(double d) { return d; }
double negate_map(double d) { return -d; }
double swap_map(double d) { return 90.0 - d; }
double swap_negate_map(double d) { return d + 90.0; }

double residual_angle(BellKind kind, double theta_in) {
  switch (kind) {
    case BellKind::PsiMinus: return theta_in;
    case BellKind::PsiPlus: return -theta_in;
    case BellKind::PhiMinus: return 90.0 - theta_in;
    case BellKind::PhiPlus: return 90.0 + theta_in;
  }
  return theta_in;
}

void apply_correction_es(BellKind kind, const elementary::EsPtr& es) {
  switch (kind) {
    case BellKind::PsiMinus: es->transform_directions(&id_map); break;
    case BellKind::PsiPlus: es->transform_directions(&negate_map); break;
    case BellKind::PhiMinus: es->transform_directions(&swap_map); break;
    case BellKind::PhiPlus: es->transform_directions(&swap_negate_map); break;
  }
}

}  // namespace

void TeleportStats::merge(const TeleportStats& other) {
  for (std::size_t k = 0; k < 4; ++k) branch_counts[k] += other.branch_counts[k];
  fidelity_sum += other.fidelity_sum;
  fidelity_min = std::min(fidelity_min, other.fidelity_min);
  n_trials += other.n_trials;
}

TeleportStats run_teleport_ideal(Complex alpha, Complex beta, std::uint64_t n,
                                 EngineKind engine, std::uint64_t seed,
                                 int workers) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
    throw std::invalid_argument("run_teleport_ideal: input not normalized");
  const Qubit input{alpha, beta};
  double theta_in = 0.0;
  if (engine == EngineKind::ElementaryState)
    theta_in = linear_angle_of(alpha, beta);

  auto trial = [&](std::uint64_t, Rng& rng, TeleportStats& acc) {
    BellKind kind;
    double fid;
    if (engine == EngineKind::StandardQM) {
      StateVector state = qcore::tensor(
          qcore::qubit_state(1, input),
          qcore::bell_state(BellKind::PsiMinus, 2, 3));
      auto bm = qcore::measure_bell_pair(state, 1, 2, rng);
      kind = bm.kind;
      // Only the tag crosses the classical channel.
      const Qubit corrected = qcore::apply_correction(kind, qubit_of(bm.remainder));
      fid = qcore::fidelity(corrected, input);
    } else {
      auto [e2, e3] = elementary::ElementaryState::prepare_epr_pair();
      // The analyzer splits the subensemble along the input direction; the
      // remaining Bell bit is not resolved by that response.
      const bool psi_sector = e2->respond(theta_in, rng) < 0;
      const bool first_of_sector = rng.bernoulli(0.5);
      kind = psi_sector
                 ? (first_of_sector ? BellKind::PsiMinus : BellKind::PsiPlus)
                 : (first_of_sector ? BellKind::PhiMinus : BellKind::PhiPlus);
      elementary::EsPtr photon3 = elementary::ElementaryState::prepare_single(
          residual_angle(kind, theta_in));
      apply_correction_es(kind, photon3);
      fid = photon3->respond(theta_in, rng) > 0 ? 1.0 : 0.0;
    }
    acc.branch_counts[kind_index(kind)] += 1;
    acc.fidelity_sum += fid;
    acc.fidelity_min = std::min(acc.fidelity_min, fid);
    acc.n_trials += 1;
  };
  auto finalize = [](TeleportStats&, Rng&) {};
  return harness::run_trials<TeleportStats>(n, seed, workers, trial, finalize);
}

void Fig3Stats::merge(const Fig3Stats& other) {
  n_minus += other.n_minus;
  n_plus += other.n_plus;
  n_triples += other.n_triples;
  n_candidate += other.n_candidate;
  n_pulses += other.n_pulses;
}

namespace {

struct Fig3Acc {
  Fig3Stats stats;
  std::vector<DetectionEvent> events;
  void merge(const Fig3Acc& other) { stats.merge(other.stats); }
};

struct SwapAcc {
  SwapStats stats;
  std::vector<DetectionEvent> events;
  void merge(const SwapAcc& other) { stats.merge(other.stats); }
};

void add_detection(std::vector<DetectionEvent>& events, DetectorId id,
                   double time, int count, const PhysicsConfig& physics,
                   Rng& rng) {
  detection::DetectorConfig cfg{id, physics.efficiency, physics.dark_rate,
                                false};
  if (auto ev = detection::detect({id, time, count}, cfg, rng))
    events.push_back(*ev);
}

void add_darks(std::vector<DetectionEvent>& events,
               std::initializer_list<DetectorId> detectors, double slot_time,
               const PhysicsConfig& physics, Rng& rng) {
  if (physics.dark_rate <= 0.0) return;
  for (DetectorId id : detectors) {
    const std::uint64_t k = rng.poisson(physics.dark_rate);
    for (std::uint64_t i = 0; i < k; ++i)
      events.push_back({id, slot_time + rng.uniform(), false});
  }
}

void add_port_arrivals(std::vector<DetectionEvent>& events,
                       const optics::BeamSplitterOutcome& ports, double t1,
                       double t2, const PhysicsConfig& physics, Rng& rng) {
  if (ports.same_side) {
    const DetectorId id =
        ports.port_first == PortLabel::Up ? DetectorId::D1 : DetectorId::D2;
    add_detection(events, id, std::min(t1, t2), 2, physics, rng);
  } else {
    const DetectorId first =
        ports.port_first == PortLabel::Up ? DetectorId::D1 : DetectorId::D2;
    const DetectorId second =
        ports.port_second == PortLabel::Up ? DetectorId::D1 : DetectorId::D2;
    add_detection(events, first, t1, 1, physics, rng);
    add_detection(events, second, t2, 1, physics, rng);
  }
}

// Counts of records per slot that are unaccompanied by a record of the rival
// pattern in the same slot.
std::pair<std::uint64_t, std::uint64_t> exclusive_slot_counts(
    const std::vector<detection::CoincidenceRecord>& a,
    const std::vector<detection::CoincidenceRecord>& b) {
  std::map<std::uint64_t, std::pair<int, int>> slots;
  for (const auto& rec : a) slots[rec.pulse_id].first += 1;
  for (const auto& rec : b) slots[rec.pulse_id].second += 1;
  std::uint64_t only_a = 0, only_b = 0;
  for (const auto& [slot, counts] : slots) {
    if (counts.second == 0) only_a += counts.first;
    if (counts.first == 0) only_b += counts.second;
  }
  return {only_a, only_b};
}

}  // namespace

Fig3Stats run_fig3(double coder_angle, double mirror_delay, EngineKind engine,
                   const PhysicsConfig& physics, std::uint64_t n_pulses,
                   std::uint64_t seed, int workers) {
  const double pbs_angle = coder_angle;  // transmit = the coded polarization

  auto trial = [&](std::uint64_t pulse_index, Rng& rng, Fig3Acc& acc) {
    const sources::PumpPulse pulse{pulse_index, double(pulse_index)};
    auto [em01, em23] = sources::double_pass_emit(
        pulse, physics.p_pair, mirror_delay, physics.jitter, engine, rng);
    if (!em01 && !em23) return;

    // Detector timing is calibrated against the mirror scan: the recorded
    // times track emission jitter only, while the scan offset controls the
    // photon overlap at the plate.
    const double t01 = em01 ? em01->emission_time : 0.0;
    const double t23 = em23 ? em23->emission_time - mirror_delay : 0.0;

    if (em01)
      add_detection(acc.events, DetectorId::D0, t01, 1, physics, rng);

    if (em01 && em23) {
      acc.stats.n_candidate += 1;
      const double overlap_dt = em23->emission_time - em01->emission_time;
      const bool coherent = rng.bernoulli(
          optics::indistinguishability(overlap_dt, physics.coherence_time));
      optics::BeamSplitterOutcome ports{};
      int pbs_outcome;
      if (engine == EngineKind::StandardQM) {
        StateVector state = qcore::tensor(*em01->qm_pair, *em23->qm_pair);
        state = repolarize(state, 1, coder_angle, rng);
        if (coherent) {
          auto bm = qcore::measure_bell_pair(state, 1, 2, rng);
          ports = optics::ports_for_bell(bm.kind, rng);
          state = std::move(bm.remainder);
        } else {
          ports = optics::ports_independent(rng);
        }
        pbs_outcome =
            qcore::measure_projective(state, 3, pbs_angle, rng).outcome;
      } else {
        elementary::EsPtr coded =
            elementary::ElementaryState::prepare_single(coder_angle);
        ports = optics::bs_pair_es_resolved(coded, em23->pair[0].es, coherent,
                                            physics.epsilon, rng);
        pbs_outcome = optics::pbs_route_es(em23->pair[1].es, {pbs_angle}, rng) ==
                              optics::PbsBranch::TransmitH
                          ? +1
                          : -1;
      }
      add_port_arrivals(acc.events, ports, t01, t23, physics, rng);
      add_detection(acc.events,
                    pbs_outcome > 0 ? DetectorId::DPlus3 : DetectorId::DMinus3,
                    t23, 1, physics, rng);
    } else if (em01) {
      // photon 1 alone scatters independently at the plate
      add_detection(acc.events,
                    rng.bernoulli(0.5) ? DetectorId::D1 : DetectorId::D2, t01,
                    1, physics, rng);
    } else {
      add_detection(acc.events,
                    rng.bernoulli(0.5) ? DetectorId::D1 : DetectorId::D2, t23,
                    1, physics, rng);
      int pbs_outcome;
      if (engine == EngineKind::StandardQM) {
        pbs_outcome =
            qcore::measure_projective(*em23->qm_pair, 3, pbs_angle, rng)
                .outcome;
      } else {
        pbs_outcome = optics::pbs_route_es(em23->pair[1].es, {pbs_angle}, rng) ==
                              optics::PbsBranch::TransmitH
                          ? +1
                          : -1;
      }
      add_detection(acc.events,
                    pbs_outcome > 0 ? DetectorId::DPlus3 : DetectorId::DMinus3,
                    t23, 1, physics, rng);
    }
    add_darks(acc.events,
              {DetectorId::D0, DetectorId::D1, DetectorId::D2,
               DetectorId::DPlus3, DetectorId::DMinus3},
              pulse.time, physics, rng);
  };

  auto finalize = [&](Fig3Acc& acc, Rng&) {
    std::sort(acc.events.begin(), acc.events.end(),
              [](const DetectionEvent& a, const DetectionEvent& b) {
                return a.time < b.time;
              });
    acc.stats.n_triples += detection::match_coincidences(
                               acc.events,
                               {DetectorId::D0, DetectorId::D1, DetectorId::D2},
                               physics.window, physics.delays)
                               .size();
    const auto plus = detection::match_coincidences(
        acc.events,
        {DetectorId::D0, DetectorId::D1, DetectorId::D2, DetectorId::DPlus3},
        physics.window, physics.delays);
    const auto minus = detection::match_coincidences(
        acc.events,
        {DetectorId::D0, DetectorId::D1, DetectorId::D2, DetectorId::DMinus3},
        physics.window, physics.delays);
    const auto [only_plus, only_minus] = exclusive_slot_counts(plus, minus);
    acc.stats.n_plus += only_plus;
    acc.stats.n_minus += only_minus;
    acc.events.clear();
  };

  Fig3Acc total =
      harness::run_trials<Fig3Acc>(n_pulses, seed, workers, trial, finalize);
  total.stats.n_pulses = n_pulses;
  total.stats.mirror_delay = mirror_delay;
  total.stats.coder_angle = coder_angle;
  return total.stats;
}

std::vector<DipPoint> scan_dip(double coder_angle,
                               const std::vector<double>& delays,
                               EngineKind engine, const PhysicsConfig& physics,
                               std::uint64_t n_pulses_per_point,
                               std::uint64_t seed, int workers) {
  if (delays.empty())
    throw std::invalid_argument("scan_dip: need at least one delay");
  std::vector<DipPoint> points;
  points.reserve(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    DipPoint p;
    p.delay = delays[i];
    p.stats = run_fig3(coder_angle, delays[i], engine, physics,
                       n_pulses_per_point, mix_seed(seed, 0xD1D0ull + i),
                       workers);
    const double gates = double(p.stats.n_triples);
    p.rate_minus = gates > 0.0 ? double(p.stats.n_minus) / gates : 0.0;
    p.rate_plus = gates > 0.0 ? double(p.stats.n_plus) / gates : 0.0;
    points.push_back(p);
  }
  return points;
}

RhoResult compute_rho(const Fig3Stats& stats45, const Fig3Stats& stats90) {
  RhoResult r;
  r.arm45 = stats45;
  r.arm90 = stats90;
  const double t45 = double(stats45.n_minus + stats45.n_plus);
  const double t90 = double(stats90.n_minus + stats90.n_plus);
  if (t45 == 0.0 || t90 == 0.0 || stats90.n_minus == 0) {
    r.undefined = true;
    return r;
  }
  // Rescale the 90-degree arm to the 45-degree arm's total, then take the
  // ratio of minus counts.
  const double scale = t45 / t90;
  r.rho = double(stats45.n_minus) / (double(stats90.n_minus) * scale);
  const double p45 = double(stats45.n_minus) / t45;
  const double p90 = double(stats90.n_minus) / t90;
  r.std_error = p45 > 0.0 ? r.rho * std::sqrt((1.0 - p45) / (p45 * t45) +
                                              (1.0 - p90) / (p90 * t90))
                          : 0.0;
  return r;
}

void SwapStats::merge(const SwapStats& other) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) cells[i][j] += other.cells[i][j];
  n_gated += other.n_gated;
  n_candidate += other.n_candidate;
  n_pulses += other.n_pulses;
}

std::uint64_t SwapStats::cell_total() const {
  return cells[0][0] + cells[0][1] + cells[1][0] + cells[1][1];
}

SwapStats run_swap(double theta0, double theta3, EngineKind engine,
                   const PhysicsConfig& physics, std::uint64_t n_pulses,
                   std::uint64_t seed, int workers) {
  auto trial = [&](std::uint64_t pulse_index, Rng& rng, SwapAcc& acc) {
    const sources::PumpPulse pulse{pulse_index, double(pulse_index)};
    auto [em01, em23] = sources::double_pass_emit(pulse, physics.p_pair, 0.0,
                                                  physics.jitter, engine, rng);
    if (!em01 && !em23) return;
    const double t01 = em01 ? em01->emission_time : 0.0;
    const double t23 = em23 ? em23->emission_time : 0.0;

    if (em01 && em23) {
      acc.stats.n_candidate += 1;
      const double overlap_dt = em23->emission_time - em01->emission_time;
      const bool coherent = rng.bernoulli(
          optics::indistinguishability(overlap_dt, physics.coherence_time));
      optics::BeamSplitterOutcome ports{};
      int out0, out3;
      if (engine == EngineKind::StandardQM) {
        StateVector state = qcore::tensor(*em01->qm_pair, *em23->qm_pair);
        if (coherent) {
          auto bm = qcore::measure_bell_pair(state, 1, 2, rng);
          ports = optics::ports_for_bell(bm.kind, rng);
          state = std::move(bm.remainder);
        } else {
          ports = optics::ports_independent(rng);
        }
        auto m0 = qcore::measure_projective(state, 0, theta0, rng);
        out0 = m0.outcome;
        out3 = qcore::measure_projective(m0.collapsed, 3, theta3, rng).outcome;
      } else {
        ports = optics::bs_pair_es_resolved(em01->pair[1].es, em23->pair[0].es,
                                            coherent, physics.epsilon, rng);
        out0 = optics::pbs_route_es(em01->pair[0].es, {theta0}, rng) ==
                       optics::PbsBranch::TransmitH
                   ? +1
                   : -1;
        out3 = optics::pbs_route_es(em23->pair[1].es, {theta3}, rng) ==
                       optics::PbsBranch::TransmitH
                   ? +1
                   : -1;
      }
      add_port_arrivals(acc.events, ports, t01, t23, physics, rng);
      add_detection(acc.events,
                    out0 > 0 ? DetectorId::DPlus0 : DetectorId::DMinus0, t01,
                    1, physics, rng);
      add_detection(acc.events,
                    out3 > 0 ? DetectorId::DPlus3 : DetectorId::DMinus3, t23,
                    1, physics, rng);
    } else if (em01) {
      add_detection(acc.events,
                    rng.bernoulli(0.5) ? DetectorId::D1 : DetectorId::D2, t01,
                    1, physics, rng);
      int out0;
      if (engine == EngineKind::StandardQM) {
        out0 = qcore::measure_projective(*em01->qm_pair, 0, theta0, rng).outcome;
      } else {
        out0 = optics::pbs_route_es(em01->pair[0].es, {theta0}, rng) ==
                       optics::PbsBranch::TransmitH
                   ? +1
                   : -1;
      }
      add_detection(acc.events,
                    out0 > 0 ? DetectorId::DPlus0 : DetectorId::DMinus0, t01,
                    1, physics, rng);
    } else {
      add_detection(acc.events,
                    rng.bernoulli(0.5) ? DetectorId::D1 : DetectorId::D2, t23,
                    1, physics, rng);
      int out3;
      if (engine == EngineKind::StandardQM) {
        out3 = qcore::measure_projective(*em23->qm_pair, 3, theta3, rng).outcome;
      } else {
        out3 = optics::pbs_route_es(em23->pair[1].es, {theta3}, rng) ==
                       optics::PbsBranch::TransmitH
                   ? +1
                   : -1;
      }
      add_detection(acc.events,
                    out3 > 0 ? DetectorId::DPlus3 : DetectorId::DMinus3, t23,
                    1, physics, rng);
    }
    add_darks(acc.events,
              {DetectorId::D1, DetectorId::D2, DetectorId::DPlus0,
               DetectorId::DMinus0, DetectorId::DPlus3, DetectorId::DMinus3},
              pulse.time, physics, rng);
  };

  auto finalize = [&](SwapAcc& acc, Rng&) {
    std::sort(acc.events.begin(), acc.events.end(),
              [](const DetectionEvent& a, const DetectionEvent& b) {
                return a.time < b.time;
              });
    acc.stats.n_gated +=
        detection::match_coincidences(acc.events,
                                      {DetectorId::D1, DetectorId::D2},
                                      physics.window, physics.delays)
            .size();
    const DetectorId d0_branch[2] = {DetectorId::DPlus0, DetectorId::DMinus0};
    const DetectorId d3_branch[2] = {DetectorId::DPlus3, DetectorId::DMinus3};
    // A slot counts for a cell only when no rival cell matched there too.
    std::array<std::array<std::vector<detection::CoincidenceRecord>, 2>, 2>
        recs;
    std::map<std::uint64_t, int> slot_hits;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        recs[i][j] = detection::match_coincidences(
            acc.events,
            {DetectorId::D1, DetectorId::D2, d0_branch[i], d3_branch[j]},
            physics.window, physics.delays);
        for (const auto& rec : recs[i][j]) slot_hits[rec.pulse_id] += 1;
      }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (const auto& rec : recs[i][j])
          if (slot_hits[rec.pulse_id] == 1) acc.stats.cells[i][j] += 1;
    acc.events.clear();
  };

  SwapAcc total =
      harness::run_trials<SwapAcc>(n_pulses, seed, workers, trial, finalize);
  total.stats.n_pulses = n_pulses;
  total.stats.theta0 = theta0;
  total.stats.theta3 = theta3;
  return total.stats;
}

std::vector<RotationPoint> rotation_scan(const std::vector<double>& angles,
                                         EngineKind engine,
                                         const PhysicsConfig& physics,
                                         std::uint64_t n_pulses_per_angle,
                                         std::uint64_t seed, int workers) {
  if (angles.empty())
    throw std::invalid_argument("rotation_scan: need at least one angle");
  std::vector<RotationPoint> points;
  points.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    RotationPoint p;
    p.angle = angles[i];
    p.stats = run_swap(angles[i], angles[i], engine, physics,
                       n_pulses_per_angle, mix_seed(seed, 0xA11Aull + i),
                       workers);
    const double gated = double(p.stats.cell_total());
    double lo = 1.0, hi = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double rate =
            gated > 0.0 ? double(p.stats.cells[a][b]) / gated : 0.0;
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
      }
    p.min_cell_rate = gated > 0.0 ? lo : 0.0;
    p.max_cell_rate = gated > 0.0 ? hi : 0.0;
    points.push_back(p);
  }
  return points;
}

}  // namespace telesim::experiments
