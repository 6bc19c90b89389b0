#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "stat_utils.hpp"
#include "telesim/experiments.hpp"

using namespace telesim;
using experiments::PhysicsConfig;
using qcore::BellKind;

namespace {

PhysicsConfig ideal() {
  PhysicsConfig p;
  p.p_pair = 0.2;  // keeps the gated statistics cheap in unit tests
  p.jitter = 0.0;
  return p;
}

}  // namespace

TEST_CASE("ideal teleportation is exact under the state-vector engine") {
  Rng rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const double re = rng.normal(0, 1), im = rng.normal(0, 1);
    const double x = rng.normal(0, 1), y = rng.normal(0, 1);
    const double norm = std::sqrt(re * re + im * im + x * x + y * y);
    const auto stats = experiments::run_teleport_ideal(
        {re / norm, im / norm}, {x / norm, y / norm}, 200,
        EngineKind::StandardQM, rep);
    CHECK(stats.fidelity_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats.n_trials == 200);
  }
}

TEST_CASE("teleport branch frequencies are even") {
  const auto stats = experiments::run_teleport_ideal(
      {0.6, 0.0}, {0.8, 0.0}, 100000, EngineKind::StandardQM, 42);
  for (auto c : stats.branch_counts)
    CHECK(within_4sigma_binomial(c, stats.n_trials, 0.25));
}

TEST_CASE("hidden-variable teleportation is exact for linear inputs") {
  for (double angle : {0.0, 25.0, 45.0, 90.0, 117.0}) {
    const auto q = qcore::linear_qubit(angle);
    const auto stats = experiments::run_teleport_ideal(
        q.alpha, q.beta, 40000, EngineKind::ElementaryState, 7);
    CHECK(stats.fidelity_min == doctest::Approx(1.0));
    for (auto c : stats.branch_counts)
      CHECK(within_4sigma_binomial(c, stats.n_trials, 0.25));
  }
}

TEST_CASE("hidden-variable engine rejects elliptic inputs") {
  CHECK_THROWS_AS(
      experiments::run_teleport_ideal({0.6, 0.0}, {0.0, 0.8}, 10,
                                      EngineKind::ElementaryState, 1),
      std::invalid_argument);
}

TEST_CASE("teleport rejects non-normalized inputs") {
  CHECK_THROWS_AS(experiments::run_teleport_ideal({0.9, 0.0}, {0.1, 0.0}, 10,
                                                  EngineKind::StandardQM, 1),
                  std::invalid_argument);
}

TEST_CASE("vertical coder: the minus coincidence is impossible when aligned") {
  for (auto engine : {EngineKind::StandardQM, EngineKind::ElementaryState}) {
    const auto stats =
        experiments::run_fig3(90.0, 0.0, engine, ideal(), 200000, 3);
    CHECK(stats.n_candidate > 5000);
    CHECK(stats.n_triples > 1000);
    CHECK(stats.n_minus == 0);
    CHECK(within_4sigma_binomial(stats.n_triples, stats.n_candidate, 0.25));
  }
}

TEST_CASE("destroyed overlap equalizes the two coincidence types") {
  for (auto engine : {EngineKind::StandardQM, EngineKind::ElementaryState}) {
    const auto stats =
        experiments::run_fig3(90.0, 12.0, engine, ideal(), 400000, 5);
    CHECK(stats.n_minus + stats.n_plus > 2000);
    CHECK(proportions_agree_4sigma(stats.n_minus,
                                   stats.n_minus + stats.n_plus,
                                   stats.n_plus,
                                   stats.n_minus + stats.n_plus));
  }
}

TEST_CASE("diagonal coder with quasispin fluctuations: hand-derived rates") {
  // per gated candidate: split-and-minus has weight eps/2, split-and-plus 1/4
  const double eps = 0.2;
  PhysicsConfig physics = ideal();
  physics.epsilon = eps;
  const auto stats = experiments::run_fig3(45.0, 0.0,
                                           EngineKind::ElementaryState,
                                           physics, 400000, 7);
  CHECK(stats.n_minus > 0);
  const double p_minus = (0.5 * eps) / (0.25 + 0.5 * eps);
  CHECK(within_4sigma_binomial(stats.n_minus, stats.n_minus + stats.n_plus,
                               p_minus));
  // the aligned arm stays clean even with fluctuations switched on
  const auto aligned = experiments::run_fig3(90.0, 0.0,
                                             EngineKind::ElementaryState,
                                             physics, 200000, 9);
  CHECK(aligned.n_minus == 0);
}

TEST_CASE("dip scan shape") {
  PhysicsConfig physics;
  physics.p_pair = 0.2;  // default jitter/coherence, faster gating
  const std::vector<double> delays = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto points = experiments::scan_dip(
      90.0, delays, EngineKind::StandardQM, physics, 300000, 11);
  REQUIRE(points.size() == 5);
  CHECK(points[2].rate_minus < points[0].rate_minus);
  CHECK(points[2].rate_minus < points[4].rate_minus);
  // symmetric offsets agree within statistics
  const auto& left = points[1];
  const auto& right = points[3];
  CHECK(proportions_agree_4sigma(left.stats.n_minus, left.stats.n_triples,
                                 right.stats.n_minus, right.stats.n_triples));
}

TEST_CASE("rho mechanics") {
  experiments::Fig3Stats a, b;
  a.n_minus = 50;
  a.n_plus = 950;
  b = a;

  SUBCASE("identical inputs give exactly one") {
    const auto r = experiments::compute_rho(a, b);
    CHECK_FALSE(r.undefined);
    CHECK(r.rho == doctest::Approx(1.0));
    CHECK(r.std_error > 0.0);
  }

  SUBCASE("rescaling equalizes unequal totals") {
    b.n_minus = 25;
    b.n_plus = 475;  // same fraction at half the statistics
    const auto r = experiments::compute_rho(a, b);
    CHECK(r.rho == doctest::Approx(1.0));
  }

  SUBCASE("a minus-free reference arm is flagged") {
    b.n_minus = 0;
    const auto r = experiments::compute_rho(a, b);
    CHECK(r.undefined);
  }

  SUBCASE("a minus-free numerator arm gives zero with finite error") {
    a.n_minus = 0;
    const auto r = experiments::compute_rho(a, b);
    CHECK_FALSE(r.undefined);
    CHECK(r.rho == 0.0);
    CHECK(std::isfinite(r.std_error));
  }
}

TEST_CASE("swap anticorrelation at aligned analyzers") {
  for (auto engine : {EngineKind::StandardQM, EngineKind::ElementaryState}) {
    const auto stats =
        experiments::run_swap(20.0, 20.0, engine, ideal(), 200000, 13);
    CHECK(stats.n_gated > 1000);
    CHECK(stats.cells[0][0] == 0);
    CHECK(stats.cells[1][1] == 0);
    CHECK(stats.cell_total() == stats.n_gated);
    CHECK(within_4sigma_binomial(stats.cells[0][1], stats.cell_total(), 0.5));
  }
}

TEST_CASE("swap inversion at orthogonal analyzers") {
  for (auto engine : {EngineKind::StandardQM, EngineKind::ElementaryState}) {
    const auto stats =
        experiments::run_swap(20.0, 110.0, engine, ideal(), 200000, 15);
    CHECK(stats.n_gated > 1000);
    CHECK(stats.cells[0][1] == 0);
    CHECK(stats.cells[1][0] == 0);
    CHECK(within_4sigma_binomial(stats.cells[0][0], stats.cell_total(), 0.5));
  }
}

TEST_CASE("swap cell probabilities survive a joint rotation") {
  const auto base =
      experiments::run_swap(0.0, 0.0, EngineKind::StandardQM, ideal(),
                            200000, 17);
  const auto rotated =
      experiments::run_swap(33.0, 33.0, EngineKind::StandardQM, ideal(),
                            200000, 19);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(proportions_agree_4sigma(base.cells[i][j], base.cell_total(),
                                     rotated.cells[i][j],
                                     rotated.cell_total()));
}

TEST_CASE("pulse accounting is conserved") {
  PhysicsConfig physics;
  physics.p_pair = 0.1;
  const auto stats = experiments::run_fig3(90.0, 0.0, EngineKind::StandardQM,
                                           physics, 50000, 21);
  CHECK(stats.n_candidate <= stats.n_pulses);
  CHECK(stats.n_triples <= stats.n_candidate);
  const std::uint64_t rejected = stats.n_candidate - stats.n_triples;
  const std::uint64_t no_emission = stats.n_pulses - stats.n_candidate;
  CHECK(stats.n_triples + rejected + no_emission == stats.n_pulses);
}

TEST_CASE("rotation scan contrasts") {
  const std::vector<double> angles = {0.0, 45.0};

  SUBCASE("flat for the state-vector engine") {
    const auto points = experiments::rotation_scan(
        angles, EngineKind::StandardQM, ideal(), 400000, 23);
    REQUIRE(points.size() == 2);
    CHECK(points[0].stats.cells[0][0] == 0);
    CHECK(points[1].stats.cells[0][0] == 0);
    CHECK(std::abs(points[0].contrast() - points[1].contrast()) < 0.05);
  }

  SUBCASE("diagonal extrema are shallower with fluctuations") {
    PhysicsConfig physics = ideal();
    physics.epsilon = 0.1;
    const auto points = experiments::rotation_scan(
        angles, EngineKind::ElementaryState, physics, 400000, 25);
    CHECK(points[0].min_cell_rate == doctest::Approx(0.0));
    CHECK(points[1].min_cell_rate > 0.0);
    CHECK(points[1].contrast() < points[0].contrast());
    // minima sit near eps/2
    CHECK(within_4sigma_binomial(
        points[1].stats.cells[0][0] + points[1].stats.cells[1][1],
        points[1].stats.cell_total(), physics.epsilon));
  }
}

TEST_CASE("engine agreement with fluctuations off") {
  PhysicsConfig physics;  // default small imperfections
  physics.p_pair = 0.2;
  const std::uint64_t n = 100000;

  SUBCASE("diagonal coder") {
    const auto qm =
        experiments::run_fig3(45.0, 0.0, EngineKind::StandardQM, physics, n, 27);
    const auto es = experiments::run_fig3(45.0, 0.0, EngineKind::ElementaryState,
                                          physics, n, 29);
    CHECK(proportions_agree_4sigma(qm.n_triples, qm.n_candidate, es.n_triples,
                                   es.n_candidate));
    CHECK(proportions_agree_4sigma(qm.n_minus, qm.n_triples, es.n_minus,
                                   es.n_triples));
    CHECK(proportions_agree_4sigma(qm.n_plus, qm.n_triples, es.n_plus,
                                   es.n_triples));
  }

  SUBCASE("swap cells at a rotated common angle") {
    const auto qm =
        experiments::run_swap(45.0, 45.0, EngineKind::StandardQM, physics, n, 31);
    const auto es = experiments::run_swap(45.0, 45.0,
                                          EngineKind::ElementaryState, physics,
                                          n, 33);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(proportions_agree_4sigma(qm.cells[i][j], qm.cell_total(),
                                       es.cells[i][j], es.cell_total()));
  }

  SUBCASE("swap cells at split analyzer angles") {
    const auto qm = experiments::run_swap(10.0, 40.0, EngineKind::StandardQM,
                                          physics, n, 35);
    const auto es = experiments::run_swap(10.0, 40.0,
                                          EngineKind::ElementaryState, physics,
                                          n, 37);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(proportions_agree_4sigma(qm.cells[i][j], qm.cell_total(),
                                       es.cells[i][j], es.cell_total()));
  }
}

TEST_CASE("runs are reproducible across worker counts and the serial path") {
  PhysicsConfig physics;
  physics.p_pair = 0.2;
  const auto serial = experiments::run_fig3(45.0, 0.5, EngineKind::StandardQM,
                                            physics, 60000, 39, 0);
  const auto one = experiments::run_fig3(45.0, 0.5, EngineKind::StandardQM,
                                         physics, 60000, 39, 1);
  const auto four = experiments::run_fig3(45.0, 0.5, EngineKind::StandardQM,
                                          physics, 60000, 39, 4);
  CHECK(serial.n_minus == one.n_minus);
  CHECK(serial.n_plus == one.n_plus);
  CHECK(serial.n_triples == one.n_triples);
  CHECK(serial.n_candidate == one.n_candidate);
  CHECK(four.n_minus == one.n_minus);
  CHECK(four.n_plus == one.n_plus);
  CHECK(four.n_triples == one.n_triples);
  CHECK(four.n_candidate == one.n_candidate);

  const auto swap_serial = experiments::run_swap(
      10.0, 40.0, EngineKind::ElementaryState, physics, 60000, 41, 0);
  const auto swap_four = experiments::run_swap(
      10.0, 40.0, EngineKind::ElementaryState, physics, 60000, 41, 4);
  CHECK(swap_serial.cells == swap_four.cells);
  CHECK(swap_serial.n_gated == swap_four.n_gated);
}
