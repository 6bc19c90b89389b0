#include "telesim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace telesim::qcore {

double deg_to_rad(double degrees) {
  return degrees * std::numbers::pi / 180.0;
}

bool Qubit::is_normalized(double tol) const {
  return std::abs(norm_squared() - 1.0) <= tol;
}

Qubit linear_qubit(double angle_deg) {
  const double r = deg_to_rad(angle_deg);
  return {std::cos(r), std::sin(r)};
}

double fidelity(const Qubit& a, const Qubit& b) {
  return std::norm(std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta);
}

const char* bell_name(BellKind k) {
  switch (k) {
    case BellKind::PsiMinus: return "psi_minus";
    case BellKind::PsiPlus: return "psi_plus";
    case BellKind::PhiMinus: return "phi_minus";
    case BellKind::PhiPlus: return "phi_plus";
  }
  return "?";
}

StateVector::StateVector(std::vector<int> labels, std::vector<Complex> amps)
    : labels_(std::move(labels)), amps_(std::move(amps)) {
  if (amps_.size() != (std::size_t{1} << labels_.size()))
    throw std::invalid_argument("state vector: amplitude count must be 2^n");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    for (std::size_t j = i + 1; j < labels_.size(); ++j)
      if (labels_[i] == labels_[j])
        throw std::invalid_argument("state vector: duplicate photon label");
  if (std::abs(norm_squared() - 1.0) > 1e-9)
    throw std::invalid_argument("state vector: not normalized");
}

std::size_t StateVector::position_of(int label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw std::invalid_argument("state vector: unknown photon label " +
                              std::to_string(label));
}

bool StateVector::has_label(int label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return s;
}

StateVector StateVector::reordered(const std::vector<int>& new_labels) const {
  if (new_labels.size() != labels_.size())
    throw std::invalid_argument("reorder: label count mismatch");
  const std::size_t n = labels_.size();
  std::vector<std::size_t> source_pos(n);
  for (std::size_t k = 0; k < n; ++k)
    source_pos[k] = position_of(new_labels[k]);
  std::vector<Complex> out(amps_.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t src = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t bit = (idx >> (n - 1 - k)) & 1u;
      src |= bit << (n - 1 - source_pos[k]);
    }
    out[idx] = amps_[src];
  }
  StateVector r;
  r.labels_ = new_labels;
  r.amps_ = std::move(out);
  return r;
}

StateVector qubit_state(int label, const Qubit& q) {
  if (!q.is_normalized())
    throw std::invalid_argument("qubit state: not normalized");
  return StateVector({label}, {q.alpha, q.beta});
}

StateVector bell_state(BellKind kind, int label_a, int label_b) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Complex> amps(4, 0.0);  // basis (++, +-, -+, --)
  switch (kind) {
    case BellKind::PsiMinus: amps[1] = s; amps[2] = -s; break;
    case BellKind::PsiPlus: amps[1] = s; amps[2] = s; break;
    case BellKind::PhiMinus: amps[0] = s; amps[3] = -s; break;
    case BellKind::PhiPlus: amps[0] = s; amps[3] = s; break;
  }
  return StateVector({label_a, label_b}, std::move(amps));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<int> labels = a.labels();
  for (int l : b.labels()) {
    if (a.has_label(l))
      throw std::invalid_argument("tensor: duplicate photon label " +
                                  std::to_string(l));
    labels.push_back(l);
  }
  const auto& xa = a.amplitudes();
  const auto& xb = b.amplitudes();
  std::vector<Complex> amps(xa.size() * xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j)
      amps[i * xb.size() + j] = xa[i] * xb[j];
  return StateVector(std::move(labels), std::move(amps));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  const StateVector br = b.reordered(a.labels());
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i)
    s += std::conj(a.amplitudes()[i]) * br.amplitudes()[i];
  return s;
}

double overlap(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

namespace {

bool is_psi_minus(const StateVector& pair) {
  if (pair.qubit_count() != 2) return false;
  const StateVector ref =
      bell_state(BellKind::PsiMinus, pair.labels()[0], pair.labels()[1]);
  return std::abs(overlap(ref, pair) - 1.0) <= 1e-9;
}

// Eq-style closed forms for the three-photon decomposition residuals; used
// to build branches whose signs follow the standard expansion literally.
Qubit residual_for(BellKind kind, const Qubit& in) {
  switch (kind) {
    case BellKind::PsiMinus: return {-in.alpha, -in.beta};
    case BellKind::PsiPlus: return {-in.alpha, in.beta};
    case BellKind::PhiMinus: return {in.beta, in.alpha};
    case BellKind::PhiPlus: return {-in.beta, in.alpha};
  }
  return in;
}

}  // namespace

std::array<BellBranch, 4> bell_decompose_12(const Qubit& input,
                                            const StateVector& pair23) {
  if (!input.is_normalized())
    throw std::invalid_argument("bell_decompose_12: input not normalized");
  if (!is_psi_minus(pair23))
    throw std::invalid_argument(
        "bell_decompose_12: resource pair must be a PsiMinus state");
  std::array<BellBranch, 4> out;
  for (std::size_t k = 0; k < 4; ++k)
    out[k] = {kAllBellKinds[k], Complex{0.5, 0.0},
              residual_for(kAllBellKinds[k], input)};
  return out;
}

std::array<SwapBranch, 4> bell_decompose_swap(const StateVector& pair01,
                                              const StateVector& pair23) {
  if (!is_psi_minus(pair01) || !is_psi_minus(pair23))
    throw std::invalid_argument(
        "bell_decompose_swap: both pairs must be PsiMinus states");
  const int l0 = pair01.labels()[0], l1 = pair01.labels()[1];
  const int l2 = pair23.labels()[0], l3 = pair23.labels()[1];
  const StateVector full = tensor(pair01, pair23);
  std::array<SwapBranch, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    const BellKind kind = kAllBellKinds[k];
    const StateVector term =
        tensor(bell_state(kind, l1, l2), bell_state(kind, l0, l3));
    out[k] = {kind, kind, inner_product(term, full)};
  }
  return out;
}

MeasureResult measure_projective(const StateVector& state, int label,
                                 double angle_deg, Rng& rng) {
  const std::size_t pos = state.position_of(label);
  const std::size_t n = state.qubit_count();
  const std::size_t stride = std::size_t{1} << (n - 1 - pos);
  const double r = deg_to_rad(angle_deg);
  // +1/2 eigenvector (cos, sin), -1/2 eigenvector (-sin, cos).
  const Complex eigen[2][2] = {{std::cos(r), std::sin(r)},
                               {-std::sin(r), std::cos(r)}};
  const auto& amps = state.amplitudes();

  double p_plus = 0.0;
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    if (idx & stride) continue;  // visit each (plus, minus) pair once
    const Complex c =
        std::conj(eigen[0][0]) * amps[idx] + std::conj(eigen[0][1]) * amps[idx | stride];
    p_plus += std::norm(c);
  }
  const bool plus = rng.bernoulli(p_plus);
  const int which = plus ? 0 : 1;
  const double prob = plus ? p_plus : 1.0 - p_plus;
  if (prob <= 0.0)
    throw std::runtime_error("measure_projective: zero-probability branch");

  std::vector<Complex> out(amps.size());
  const double inv = 1.0 / std::sqrt(prob);
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    if (idx & stride) continue;
    const Complex c = std::conj(eigen[which][0]) * amps[idx] +
                      std::conj(eigen[which][1]) * amps[idx | stride];
    out[idx] = eigen[which][0] * c * inv;
    out[idx | stride] = eigen[which][1] * c * inv;
  }
  return {plus ? +1 : -1, StateVector(state.labels(), std::move(out)), prob};
}

BellMeasureResult measure_bell_pair(const StateVector& state, int label_a,
                                    int label_b, Rng& rng) {
  const std::size_t pa = state.position_of(label_a);
  const std::size_t pb = state.position_of(label_b);
  const std::size_t n = state.qubit_count();
  if (n < 2) throw std::invalid_argument("measure_bell_pair: need two photons");
  const std::size_t sa = std::size_t{1} << (n - 1 - pa);
  const std::size_t sb = std::size_t{1} << (n - 1 - pb);
  const auto& amps = state.amplitudes();
  const std::size_t rest_size = amps.size() >> 2;

  // Bell bras over (bit_a, bit_b) in the (++, +-, -+, --) order.
  const double s = 1.0 / std::sqrt(2.0);
  const double bell[4][4] = {{0, s, -s, 0}, {0, s, s, 0}, {s, 0, 0, -s},
                             {s, 0, 0, s}};

  std::vector<int> rest_labels;
  std::vector<std::size_t> rest_strides;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == pa || k == pb) continue;
    rest_labels.push_back(state.labels()[k]);
    rest_strides.push_back(std::size_t{1} << (n - 1 - k));
  }

  auto base_index = [&](std::size_t rest) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < rest_strides.size(); ++k)
      if (rest & (std::size_t{1} << (rest_strides.size() - 1 - k)))
        idx |= rest_strides[k];
    return idx;
  };

  std::array<std::vector<Complex>, 4> projected;
  std::array<double, 4> weight{};
  for (int k = 0; k < 4; ++k) projected[k].resize(rest_size);
  for (std::size_t rest = 0; rest < rest_size; ++rest) {
    const std::size_t base = base_index(rest);
    const Complex v[4] = {amps[base], amps[base | sb], amps[base | sa],
                          amps[base | sa | sb]};
    for (int k = 0; k < 4; ++k) {
      Complex c = 0.0;
      for (int j = 0; j < 4; ++j) c += bell[k][j] * v[j];
      projected[k][rest] = c;
      weight[k] += std::norm(c);
    }
  }

  const double u = rng.uniform();
  int kind = 3;
  double cum = 0.0;
  for (int k = 0; k < 4; ++k) {
    cum += weight[k];
    if (u < cum) {
      kind = k;
      break;
    }
  }
  if (weight[kind] <= 0.0) {
    // numerically impossible draw; fall back to the heaviest branch
    kind = int(std::max_element(weight.begin(), weight.end()) - weight.begin());
  }

  const double inv = 1.0 / std::sqrt(weight[kind]);
  std::vector<Complex> rest_amps(rest_size);
  for (std::size_t rest = 0; rest < rest_size; ++rest)
    rest_amps[rest] = projected[kind][rest] * inv;
  return {kAllBellKinds[kind],
          StateVector(std::move(rest_labels), std::move(rest_amps)),
          weight[kind]};
}

StateVector apply_one_qubit(const StateVector& state, int label,
                            const std::array<Complex, 4>& m) {
  const std::size_t pos = state.position_of(label);
  const std::size_t n = state.qubit_count();
  const std::size_t stride = std::size_t{1} << (n - 1 - pos);
  std::vector<Complex> out(state.amplitudes().size());
  const auto& amps = state.amplitudes();
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    if (idx & stride) continue;
    const Complex a = amps[idx], b = amps[idx | stride];
    out[idx] = m[0] * a + m[1] * b;
    out[idx | stride] = m[2] * a + m[3] * b;
  }
  return StateVector(state.labels(), std::move(out));
}

Qubit apply_correction(BellKind kind, const Qubit& q) {
  switch (kind) {
    case BellKind::PsiMinus: return q;                    // do nothing
    case BellKind::PsiPlus: return {-q.alpha, q.beta};    // flip |+> sign
    case BellKind::PhiMinus: return {q.beta, q.alpha};    // swap
    case BellKind::PhiPlus: return {q.beta, -q.alpha};    // swap + sign flip
  }
  return q;
}

}  // namespace telesim::qcore
