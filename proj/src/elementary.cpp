#include "telesim/elementary.hpp"

#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace telesim::elementary {

namespace {

constexpr double kKeyScale = 1e6;  // directions quantized to 1e-6 degrees
constexpr double kDetTol = 1e-12;  // Malus probabilities this close to 0/1
                                   // are treated as deterministic

double wrap_180(double a) {
  double r = std::fmod(a, 180.0);
  if (r < 0.0) r += 180.0;
  return r;
}

double malus_plus_probability(double direction_deg, double reference_deg) {
  const double c = std::cos(qcore::deg_to_rad(direction_deg - reference_deg));
  return c * c;
}

}  // namespace

CanonicalDirection canonicalize(double direction_deg) {
  double r = std::fmod(direction_deg, 360.0);
  if (r < 0.0) r += 360.0;
  int sign = +1;
  if (r >= 180.0) {
    r -= 180.0;
    sign = -1;
  }
  std::int64_t key = std::llround(r * kKeyScale);
  if (key >= std::llround(180.0 * kKeyScale)) {  // rounding hit the seam
    key = 0;
    sign = -sign;
  }
  return {static_cast<double>(key) / kKeyScale, sign, key};
}

PairQuasispin pair_s2_sample(double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("pair_s2_sample: epsilon outside [0, 1]");
  return {rng.bernoulli(epsilon) ? 0 : 2, epsilon};
}

EsPtr ElementaryState::prepare_single(double angle_deg) {
  // Preparation fixes a polarization ray; the canonical representative in
  // [0, 180) pre-reveals to +1/2.
  EsPtr es(new ElementaryState);
  const double ray = wrap_180(angle_deg);
  std::int64_t key = std::llround(ray * kKeyScale);
  if (key >= std::llround(180.0 * kKeyScale)) key = 0;
  es->preparation_ = ray;
  es->polarization_ = ray;
  es->stable_basis_ = std::fmod(ray, 90.0);
  es->revealed_[key] = +1;
  return es;
}

std::pair<EsPtr, EsPtr> ElementaryState::prepare_epr_pair() {
  EsPtr a(new ElementaryState);
  EsPtr b(new ElementaryState);
  // Type-II down-conversion emits the pair polarized in the crystal's own
  // H/V basis; that basis is stable even though no value is revealed yet.
  a->stable_basis_ = 0.0;
  b->stable_basis_ = 0.0;
  a->born_tag_ = qcore::BellKind::PsiMinus;
  b->born_tag_ = qcore::BellKind::PsiMinus;
  a->born_partner_ = b;
  b->born_partner_ = a;
  a->links_.push_back({b, -1, false, 0.0, 0.0});
  b->links_.push_back({a, -1, false, 0.0, 0.0});
  return {a, b};
}

std::pair<EsPtr, EsPtr> ElementaryState::prepare_bell_pair(
    qcore::BellKind kind) {
  if (kind == qcore::BellKind::PsiMinus) return prepare_epr_pair();
  auto pair = prepare_epr_pair();
  const int sign =
      (kind == qcore::BellKind::PsiPlus) ? -1 : +1;  // original-basis relation
  pair.first->born_tag_ = kind;
  pair.second->born_tag_ = kind;
  pair.first->links_[0].sign = sign;
  pair.second->links_[0].sign = sign;
  return pair;
}

bool ElementaryState::stable_at(double direction_deg) const {
  if (!stable_basis_) return false;
  const double rel = wrap_180(direction_deg - *stable_basis_);
  const double off = std::fmod(rel, 90.0);
  return std::min(off, 90.0 - off) <= 1e-6;
}

std::optional<qcore::BellKind> ElementaryState::born_pair_tag(
    const EsPtr& other) const {
  if (born_tag_ && born_partner_.lock() == other) return born_tag_;
  return std::nullopt;
}

bool ElementaryState::has_revealed(double direction_deg) const {
  return revealed_.count(canonicalize(direction_deg).key) > 0;
}

void ElementaryState::store(const CanonicalDirection& dir, int value) {
  revealed_[dir.key] = value;
  polarization_ = (value > 0) ? dir.angle_deg : wrap_180(dir.angle_deg + 90.0);
}

void ElementaryState::propagate(const CanonicalDirection& dir, int value,
                                Rng& rng) {
  // Breadth-first over the correlation graph; each node takes one value per
  // direction, so cycles are harmless.
  std::deque<ElementaryState*> queue{this};
  std::set<const ElementaryState*> visited{this};
  std::map<const ElementaryState*, int> assigned{{this, value}};
  while (!queue.empty()) {
    ElementaryState* node = queue.front();
    queue.pop_front();
    const int v = assigned[node];
    for (const Link& link : node->links_) {
      EsPtr next = link.to.lock();
      if (!next || visited.count(next.get())) continue;
      int nv = link.sign * v;
      if (link.noisy) {
        // Selection links certify the correlation only in their own basis;
        // elsewhere it holds on average, deviating per event.
        const double rel = wrap_180(dir.angle_deg - link.basis_deg);
        const double off = std::fmod(rel, 90.0);
        const bool in_basis = std::min(off, 90.0 - off) <= 1e-6;
        if (!in_basis && rng.bernoulli(link.epsilon)) nv = -nv;
      }
      visited.insert(next.get());
      if (auto it = next->revealed_.find(dir.key); it != next->revealed_.end())
        nv = it->second;  // already fixed; keep propagating its own value
      else
        next->store(dir, nv);
      assigned[next.get()] = nv;
      queue.push_back(next.get());
    }
  }
}

int ElementaryState::respond(double direction_deg, Rng& rng) {
  const CanonicalDirection dir = canonicalize(direction_deg);
  if (auto it = revealed_.find(dir.key); it != revealed_.end())
    return dir.sign * it->second;

  double p_plus = 0.5;
  if (polarization_)
    p_plus = malus_plus_probability(dir.angle_deg, *polarization_);
  int value;
  if (p_plus >= 1.0 - kDetTol)
    value = +1;
  else if (p_plus <= kDetTol)
    value = -1;
  else
    value = rng.bernoulli(p_plus) ? +1 : -1;

  store(dir, value);
  propagate(dir, value, rng);
  return dir.sign * value;
}

void ElementaryState::perturb(double measured_direction_deg) {
  const CanonicalDirection dir = canonicalize(measured_direction_deg);
  const auto it = revealed_.find(dir.key);
  if (it == revealed_.end())
    throw std::invalid_argument(
        "perturb: direction was never measured on this photon");
  const int value = it->second;
  revealed_.clear();
  revealed_[dir.key] = value;
  preparation_ = dir.angle_deg;
  polarization_ =
      (value > 0) ? dir.angle_deg : wrap_180(dir.angle_deg + 90.0);
  stable_basis_ = std::fmod(dir.angle_deg, 90.0);
  // A perturbed photon is no longer anyone's negative copy.
  for (const Link& link : links_)
    if (EsPtr other = link.to.lock()) other->drop_links_to(this);
  links_.clear();
  if (EsPtr partner = born_partner_.lock()) {
    partner->born_partner_.reset();
    partner->born_tag_.reset();
  }
  born_tag_.reset();
  born_partner_.reset();
}

void ElementaryState::link_singlet(const EsPtr& a, const EsPtr& b,
                                   double basis_deg, double epsilon) {
  const CanonicalDirection basis = canonicalize(basis_deg);
  a->links_.push_back({b, -1, true, basis.angle_deg, epsilon});
  b->links_.push_back({a, -1, true, basis.angle_deg, epsilon});
}

void ElementaryState::drop_links_to(const ElementaryState* target) {
  std::erase_if(links_, [target](const Link& l) {
    EsPtr p = l.to.lock();
    return !p || p.get() == target;
  });
}

void ElementaryState::transform_directions(double (*map_deg)(double)) {
  // Revealed entries are relabeled through the polarization-ray map (plain
  // mod 180): the value travels with the ray, the query-side sign rule is
  // untouched.
  std::map<std::int64_t, int> moved;
  for (const auto& [key, value] : revealed_) {
    const double angle = static_cast<double>(key) / kKeyScale;
    std::int64_t new_key = std::llround(wrap_180(map_deg(angle)) * kKeyScale);
    if (new_key >= std::llround(180.0 * kKeyScale)) new_key = 0;
    moved[new_key] = value;
  }
  revealed_ = std::move(moved);
  if (preparation_) preparation_ = wrap_180(map_deg(*preparation_));
  if (polarization_) polarization_ = wrap_180(map_deg(*polarization_));
  if (stable_basis_) stable_basis_ = std::fmod(wrap_180(map_deg(*stable_basis_)), 90.0);
}

}  // namespace telesim::elementary
