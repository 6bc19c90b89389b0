#pragma once

#include "telesim/elementary.hpp"
#include "telesim/photon.hpp"
#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"

namespace telesim::optics {

enum class PortLabel { Up, Down };

// Single-photon amplitudes over the two output beams. The plate transforms
// an upper input to (up + down)/sqrt(2) and a lower input to
// (up - down)/sqrt(2); polarization passes through unchanged.
struct PortState {
  qcore::Complex up;
  qcore::Complex down;
};

PortState bs_single(PortLabel in_port, const qcore::Qubit& pol);

struct BeamSplitterOutcome {
  PortLabel port_first;   // photon that entered at Up
  PortLabel port_second;  // photon that entered at Down
  bool same_side;
};

// Output-port distribution for a simultaneous photon pair (first photon at
// Up, second at Down), computed by expanding the plate transformation over
// the two-photon mode amplitudes with bosonic symmetrization. Singlet input
// always exits on different sides; the three triplet Bell states always
// exit together.
struct PairPortDistribution {
  double p_both_up;
  double p_both_down;
  double p_split;
};

PairPortDistribution bs_pair_distribution(const qcore::StateVector& joint);

// Route a simultaneous pair. `joint` is the two-photon polarization state
// (first label at Up, second at Down). Photons overlapping with
// indistinguishability `visibility` interfere; otherwise each routes
// independently with probability 1/2. The mix is a per-trial Bernoulli
// choice between the two regimes.
BeamSplitterOutcome bs_pair(const qcore::StateVector& joint, bool simultaneous,
                            double visibility, Rng& rng);

// Port assignment implied by a Bell-basis selection of the pair.
BeamSplitterOutcome ports_for_bell(qcore::BellKind kind, Rng& rng);

// Independent 50/50 routing of two non-interfering photons.
BeamSplitterOutcome ports_independent(Rng& rng);

// Hidden-variable-engine routing. Unlinked photons are compared along the
// first defined polarization reference (the original basis when neither has
// one): orthogonal responses give a genuinely undetermined total quasispin
// (0 or 2 equally, singlet routing on 0, with the selected pair linked as a
// singlet); equal responses in a shared stable basis are a prearranged
// same-polarization pair and always exit together; equal responses
// involving a contextual value were never prearranged with quasispin 2,
// and deviate with probability epsilon.
BeamSplitterOutcome bs_pair_es(const elementary::EsPtr& first,
                               const elementary::EsPtr& second,
                               bool simultaneous, double visibility,
                               double epsilon, Rng& rng);

// Same, with the coherent/incoherent choice already made by the caller.
BeamSplitterOutcome bs_pair_es_resolved(const elementary::EsPtr& first,
                                        const elementary::EsPtr& second,
                                        bool coherent, double epsilon,
                                        Rng& rng);

// Photon indistinguishability at the plate for an arrival-time difference
// dt and coherence time tau: exp(-dt^2 / (2 tau^2)).
double indistinguishability(double dt, double coherence_time);

// Polarizing beam splitter rotated by `basis_angle_deg` from the original
// basis; angles are equivalent mod 180.
struct PbsSetting {
  double basis_angle_deg = 0.0;
  double reduced() const;
};

enum class PbsBranch { TransmitH, ReflectV };

struct PbsResult {
  PbsBranch branch;
  qcore::Qubit collapsed;
};

// Born-rule routing in the rotated basis: transmit when polarized along the
// setting, reflect when orthogonal; the photon collapses onto the branch
// eigenstate.
PbsResult pbs_route(const qcore::Qubit& pol, const PbsSetting& setting,
                    Rng& rng);

// Hidden-variable variant: the response at the setting decides the branch
// and the splitter then perturbs the photon to that basis.
PbsBranch pbs_route_es(const elementary::EsPtr& photon,
                       const PbsSetting& setting, Rng& rng);

// The polarization coder: a pure linear polarization at `angle_deg` in the
// original basis (0 -> H, 90 -> V, 45 -> diagonal).
qcore::Qubit coder(double angle_deg);

// Shift a photon's arrival time; everything else is untouched.
PhotonRecord path_delay(PhotonRecord photon, double delta_t);

}  // namespace telesim::optics
