#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "telesim/qcore.hpp"
#include "telesim/rng.hpp"

namespace telesim::elementary {

// A photon's elementary state: a contextual response function assigning a
// definite +-1/2 value to every polarization direction, revealed lazily.
//
// Model rules (the sampling scheme; the formalism underdetermines it):
//  * Directions are canonicalized mod 180 degrees; a direction and its
//    180-degree opposite carry opposite signs (the S_{-n} = -S_n rule).
//  * An unrevealed direction is sampled with the Malus conditional
//    cos^2(direction - reference) where the reference is the photon's most
//    recent effective polarization (preparation angle, perturbation angle,
//    or the polarization implied by the latest revealed value). A photon
//    with no reference yet samples 50/50. Chaining reveals this way
//    reproduces the sequential-measurement statistics of the state-vector
//    engine exactly.
//  * Values propagate eagerly across correlation links. A birth link (EPR
//    partner) transmits the exact negative (or positive) copy at every
//    direction. A link created by beam-splitter selection transmits the
//    negative copy exactly at its selection basis, but at rotated
//    directions only with probability 1 - epsilon: the pair was never
//    prearranged with a definite total quasispin there, so individual
//    events may deviate while the mean is preserved.
//  * Photons also carry a stable basis: the basis in which their
//    polarization was physically prepared (the crystal basis for
//    down-conversion pairs, the preparation angle otherwise). Values
//    revealed in the stable basis are prearranged properties; values
//    revealed elsewhere are contextual. The beam-splitter routing rule
//    distinguishes the two.
class ElementaryState;
using EsPtr = std::shared_ptr<ElementaryState>;

// Canonical direction: angle reduced to [0, 180) plus the sign picked up by
// the reduction, and the quantized key used by the revealed map.
struct CanonicalDirection {
  double angle_deg;  // in [0, 180)
  int sign;          // +1 or -1
  std::int64_t key;  // angle quantized to 1e-6 degrees
};

CanonicalDirection canonicalize(double direction_deg);

// Squared total quasispin of a photon pair in units where hbar = 1: 0 or 2.
struct PairQuasispin {
  int s_squared;   // 0 or 2
  double epsilon;  // model probability of the 0 value
};

// Sample the pair observable that decides beam-splitter routing: 0 with
// probability epsilon (routes like a singlet, to different ports), else 2.
PairQuasispin pair_s2_sample(double epsilon, Rng& rng);

class ElementaryState : public std::enable_shared_from_this<ElementaryState> {
 public:
  // Photon polarized along `angle_deg`; that direction pre-reveals to +1/2.
  static EsPtr prepare_single(double angle_deg);

  // Linked pair with anticorrelated responses at every direction and total
  // quasispin 0. Nothing is pre-revealed.
  static std::pair<EsPtr, EsPtr> prepare_epr_pair();

  // Pair prearranged in a Bell state, as far as this engine can express it:
  // the original-basis correlation sign and the quasispin tag that fixes
  // beam-splitter routing. PsiMinus gives the full EPR pair.
  static std::pair<EsPtr, EsPtr> prepare_bell_pair(qcore::BellKind kind);

  // The response at `direction_deg`: +1 for +1/2, -1 for -1/2. Revealed
  // values are returned without consuming randomness; fresh directions are
  // sampled per the model rules and then fixed. Reading a value never
  // perturbs the photon.
  int respond(double direction_deg, Rng& rng);

  // Measurement back-action: every revealed direction except the measured
  // one is cleared, the preparation is replaced by the measured direction
  // with its measured sign, and all correlation links are severed. The
  // direction must have been revealed first.
  void perturb(double measured_direction_deg);

  // Record that beam-splitter selection at `basis_deg` paired this photon
  // with `other` as a singlet. Exact anticorrelation at the selection
  // basis; epsilon-fallible at rotated directions.
  static void link_singlet(const EsPtr& a, const EsPtr& b, double basis_deg,
                           double epsilon);

  // True when `direction_deg` lies in this photon's stable basis (mod 90).
  bool stable_at(double direction_deg) const;

  // Effective polarization angle, if any has been established.
  std::optional<double> polarization() const { return polarization_; }
  std::optional<double> preparation_angle() const { return preparation_; }

  // Quasispin tag shared with `other` when the two were born as one Bell
  // pair; empty otherwise.
  std::optional<qcore::BellKind> born_pair_tag(const EsPtr& other) const;

  bool has_revealed(double direction_deg) const;
  std::size_t revealed_count() const { return revealed_.size(); }

  // Relabel every stored direction through an angle map (the unitary
  // corrections act on elementary states this way).
  void transform_directions(double (*map_deg)(double));

 private:
  ElementaryState() = default;

  struct Link {
    std::weak_ptr<ElementaryState> to;
    int sign;            // +1 copy, -1 negative copy at the link basis
    bool noisy = false;  // beam-splitter link: fallible off-basis
    double basis_deg = 0.0;
    double epsilon = 0.0;
  };

  void store(const CanonicalDirection& dir, int value);
  void propagate(const CanonicalDirection& dir, int value, Rng& rng);
  void drop_links_to(const ElementaryState* target);

  std::map<std::int64_t, int> revealed_;   // canonical key -> +-1
  std::optional<double> preparation_;      // preparation angle, degrees
  std::optional<double> polarization_;     // latest effective polarization
  std::optional<double> stable_basis_;     // mod-90 basis of preparation
  std::optional<qcore::BellKind> born_tag_;
  std::weak_ptr<ElementaryState> born_partner_;
  std::vector<Link> links_;
};

}  // namespace telesim::elementary
