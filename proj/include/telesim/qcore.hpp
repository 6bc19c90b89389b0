#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "telesim/rng.hpp"

namespace telesim::qcore {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;

double deg_to_rad(double degrees);

// Single polarization qubit. alpha multiplies |+> (horizontal in the
// original basis), beta multiplies |-> (vertical).
struct Qubit {
  Complex alpha;
  Complex beta;

  double norm_squared() const { return std::norm(alpha) + std::norm(beta); }
  bool is_normalized(double tol = 1e-9) const;
};

// Linear polarization state at `angle_deg` from horizontal.
Qubit linear_qubit(double angle_deg);

// |<a|b>|^2, invariant under global phase.
double fidelity(const Qubit& a, const Qubit& b);

enum class BellKind { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PsiMinus, BellKind::PsiPlus, BellKind::PhiMinus,
    BellKind::PhiPlus};

const char* bell_name(BellKind k);

// Normalized amplitude vector over a labeled tensor product of polarization
// qubits. Basis order: |+> = bit 0, |-> = bit 1, leftmost label most
// significant.
class StateVector {
 public:
  StateVector() = default;
  StateVector(std::vector<int> labels, std::vector<Complex> amplitudes);

  const std::vector<int>& labels() const { return labels_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  std::size_t qubit_count() const { return labels_.size(); }

  // Position of `label` in the label list; throws if absent.
  std::size_t position_of(int label) const;
  bool has_label(int label) const;

  double norm_squared() const;

  // Amplitudes permuted to a new label order (same label set).
  StateVector reordered(const std::vector<int>& new_labels) const;

 private:
  std::vector<int> labels_;
  std::vector<Complex> amps_;
};

// Single-photon state |q> carried by `label`.
StateVector qubit_state(int label, const Qubit& q);

// Two-photon Bell state over (label_a, label_b).
StateVector bell_state(BellKind kind, int label_a = 1, int label_b = 2);

// Kronecker product with concatenated labels; label sets must be disjoint.
StateVector tensor(const StateVector& a, const StateVector& b);

// <a|b> for states over the same label set (b is reordered to a's labels).
Complex inner_product(const StateVector& a, const StateVector& b);

// |<a|b>|^2.
double overlap(const StateVector& a, const StateVector& b);

// One branch of the three-photon decomposition over the Bell basis of the
// first two photons: coefficient * |kind> (x) |residual>.
struct BellBranch {
  BellKind kind;
  Complex coefficient;
  Qubit residual;
};

// Decompose |input>_1 (x) |pair>_23 over the Bell basis of photons 1,2.
// `pair23` must be a PsiMinus state. All four coefficients come out 1/2 with
// the residuals carrying the signs; summing coefficient * bell (x) residual
// reconstructs the input product state exactly.
std::array<BellBranch, 4> bell_decompose_12(const Qubit& input,
                                            const StateVector& pair23);

struct SwapBranch {
  BellKind kind_12;
  BellKind kind_03;
  Complex coefficient;  // +-1/2, real
};

// Decompose |pair01> (x) |pair23> over Bell(1,2) (x) Bell(0,3). Both inputs
// must be PsiMinus states; the expansion is diagonal, pairing each 1-2 tag
// with the same 0-3 tag.
std::array<SwapBranch, 4> bell_decompose_swap(const StateVector& pair01,
                                              const StateVector& pair23);

struct MeasureResult {
  int outcome;  // +1 for +1/2 (polarized along the angle), -1 for -1/2
  StateVector collapsed;
  double probability;
};

// Born-rule projective measurement of `label` in the basis rotated by
// `angle_deg` (+1/2 eigenstate at angle_deg, -1/2 at angle_deg + 90).
MeasureResult measure_projective(const StateVector& state, int label,
                                 double angle_deg, Rng& rng);

struct BellMeasureResult {
  BellKind kind;
  StateVector remainder;  // the unmeasured photons, renormalized
  double probability;
};

// Complete Bell measurement of the pair (label_a, label_b) inside a larger
// state. The measured photons leave the state; the remainder is their
// conditional partner state.
BellMeasureResult measure_bell_pair(const StateVector& state, int label_a,
                                    int label_b, Rng& rng);

// Apply a 2x2 unitary to one photon of the state.
StateVector apply_one_qubit(const StateVector& state, int label,
                            const std::array<Complex, 4>& m);  // row-major

// The receiving-side correction for each Bell outcome. Applied to the
// matching decomposition residual it restores the input (alpha, beta) up to
// global phase; PsiMinus is the do-nothing branch.
Qubit apply_correction(BellKind kind, const Qubit& q);

}  // namespace telesim::qcore
