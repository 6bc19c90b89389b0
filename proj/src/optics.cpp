#include "telesim/optics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace telesim::optics {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

// Plate amplitudes t[in][out] over (Up, Down).
constexpr double kPlate[2][2] = {{kInvSqrt2, kInvSqrt2},
                                 {kInvSqrt2, -kInvSqrt2}};

PortLabel coin_port(Rng& rng) {
  return rng.bernoulli(0.5) ? PortLabel::Up : PortLabel::Down;
}

BeamSplitterOutcome split_outcome(Rng& rng) {
  const PortLabel first = coin_port(rng);
  const PortLabel second =
      first == PortLabel::Up ? PortLabel::Down : PortLabel::Up;
  return {first, second, false};
}

BeamSplitterOutcome together_outcome(Rng& rng) {
  const PortLabel port = coin_port(rng);
  return {port, port, true};
}

}  // namespace

PortState bs_single(PortLabel in_port, const qcore::Qubit& pol) {
  (void)pol;  // polarization is unchanged by the plate
  const int in = in_port == PortLabel::Up ? 0 : 1;
  return {kPlate[in][0], kPlate[in][1]};
}

PairPortDistribution bs_pair_distribution(const qcore::StateVector& joint) {
  if (joint.qubit_count() != 2)
    throw std::invalid_argument("bs_pair: need exactly two photons");
  const auto& c = joint.amplitudes();  // c[2*P + Q], P pol at Up, Q pol at Down

  // Ordered amplitude for (photon-from-Up -> mode m1, photon-from-Down ->
  // mode m2), where a mode is (port, pol).
  auto ordered = [&](int port1, int pol1, int port2, int pol2) {
    return c[2 * pol1 + pol2] * kPlate[0][port1] * kPlate[1][port2];
  };

  PairPortDistribution dist{0.0, 0.0, 0.0};
  for (int port1 = 0; port1 < 2; ++port1)
    for (int pol1 = 0; pol1 < 2; ++pol1)
      for (int port2 = 0; port2 < 2; ++port2)
        for (int pol2 = 0; pol2 < 2; ++pol2) {
          const int m1 = 2 * port1 + pol1, m2 = 2 * port2 + pol2;
          if (m1 > m2) continue;  // unordered mode pairs
          double p;
          if (m1 == m2) {
            // two photons in one mode: amplitude sqrt(2) * A(m, m)
            p = 2.0 * std::norm(ordered(port1, pol1, port2, pol2));
          } else {
            p = std::norm(ordered(port1, pol1, port2, pol2) +
                          ordered(port2, pol2, port1, pol1));
          }
          if (port1 != port2)
            dist.p_split += p;
          else if (port1 == 0)
            dist.p_both_up += p;
          else
            dist.p_both_down += p;
        }
  return dist;
}

BeamSplitterOutcome bs_pair(const qcore::StateVector& joint, bool simultaneous,
                            double visibility, Rng& rng) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::invalid_argument("bs_pair: visibility outside [0, 1]");
  const bool coherent = simultaneous && rng.bernoulli(visibility);
  if (!coherent) return ports_independent(rng);

  const PairPortDistribution dist = bs_pair_distribution(joint);
  const double u = rng.uniform();
  if (u < dist.p_split) return split_outcome(rng);
  if (u < dist.p_split + dist.p_both_up)
    return {PortLabel::Up, PortLabel::Up, true};
  return {PortLabel::Down, PortLabel::Down, true};
}

BeamSplitterOutcome ports_for_bell(qcore::BellKind kind, Rng& rng) {
  if (kind == qcore::BellKind::PsiMinus) return split_outcome(rng);
  return together_outcome(rng);
}

BeamSplitterOutcome ports_independent(Rng& rng) {
  const PortLabel a = coin_port(rng);
  const PortLabel b = coin_port(rng);
  return {a, b, a == b};
}

BeamSplitterOutcome bs_pair_es(const elementary::EsPtr& first,
                               const elementary::EsPtr& second,
                               bool simultaneous, double visibility,
                               double epsilon, Rng& rng) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::invalid_argument("bs_pair_es: visibility outside [0, 1]");
  const bool coherent = simultaneous && rng.bernoulli(visibility);
  return bs_pair_es_resolved(first, second, coherent, epsilon, rng);
}

BeamSplitterOutcome bs_pair_es_resolved(const elementary::EsPtr& first,
                                        const elementary::EsPtr& second,
                                        bool coherent, double epsilon,
                                        Rng& rng) {
  if (!coherent) return ports_independent(rng);

  if (auto tag = first->born_pair_tag(second)) {
    // Prearranged Bell pair: quasispin 0 splits, quasispin 2 stays together.
    if (*tag == qcore::BellKind::PsiMinus) return split_outcome(rng);
    return together_outcome(rng);
  }

  double basis = 0.0;  // original basis when neither photon has a reference
  if (first->polarization())
    basis = *first->polarization();
  else if (second->polarization())
    basis = *second->polarization();

  const int v1 = first->respond(basis, rng);
  const int v2 = second->respond(basis, rng);

  if (v1 != v2) {
    // Mutually orthogonal along the comparison basis: the pair's squared
    // total quasispin is genuinely undetermined, 0 or 2 equally.
    if (elementary::pair_s2_sample(0.5, rng).s_squared == 0) {
      elementary::ElementaryState::link_singlet(first, second, basis, epsilon);
      return split_outcome(rng);
    }
    return together_outcome(rng);
  }

  if (first->stable_at(basis) && second->stable_at(basis)) {
    // Same polarization as a prearranged property: always together.
    return together_outcome(rng);
  }
  // Same polarization revealed contextually: nothing prearranged the pair
  // with quasispin 2, so individual events may deviate.
  if (elementary::pair_s2_sample(epsilon, rng).s_squared == 0)
    return split_outcome(rng);
  return together_outcome(rng);
}

double indistinguishability(double dt, double coherence_time) {
  if (coherence_time <= 0.0) return dt == 0.0 ? 1.0 : 0.0;
  const double x = dt / coherence_time;
  return std::exp(-0.5 * x * x);
}

double PbsSetting::reduced() const {
  double r = std::fmod(basis_angle_deg, 180.0);
  if (r < 0.0) r += 180.0;
  return r;
}

PbsResult pbs_route(const qcore::Qubit& pol, const PbsSetting& setting,
                    Rng& rng) {
  const double theta = setting.reduced();
  const qcore::Qubit h = qcore::linear_qubit(theta);
  const qcore::Qubit v = qcore::linear_qubit(theta + 90.0);
  const double p_transmit = qcore::fidelity(h, pol);
  if (rng.bernoulli(p_transmit)) return {PbsBranch::TransmitH, h};
  return {PbsBranch::ReflectV, v};
}

PbsBranch pbs_route_es(const elementary::EsPtr& photon,
                       const PbsSetting& setting, Rng& rng) {
  const double theta = setting.reduced();
  const int outcome = photon->respond(theta, rng);
  photon->perturb(theta);
  return outcome > 0 ? PbsBranch::TransmitH : PbsBranch::ReflectV;
}

qcore::Qubit coder(double angle_deg) { return qcore::linear_qubit(angle_deg); }

PhotonRecord path_delay(PhotonRecord photon, double delta_t) {
  photon.arrival_time += delta_t;
  return photon;
}

}  // namespace telesim::optics
