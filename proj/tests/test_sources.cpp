#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "stat_utils.hpp"
#include "telesim/sources.hpp"

using namespace telesim;
using sources::PumpPulse;

TEST_CASE("emission probability endpoints") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    CHECK_FALSE(sources::spdc_emit({0, 0.0}, 0.0, 0.1,
                                   EngineKind::StandardQM, 0, 1, rng));
    CHECK(sources::spdc_emit({0, 0.0}, 1.0, 0.1, EngineKind::StandardQM, 0, 1,
                             rng));
  }
  CHECK_THROWS_AS(
      sources::spdc_emit({0, 0.0}, 1.5, 0.1, EngineKind::StandardQM, 0, 1, rng),
      std::invalid_argument);
}

TEST_CASE("deterministic pair at p=1 with zero jitter") {
  Rng rng(2);
  const auto ev =
      sources::spdc_emit({7, 7.0}, 1.0, 0.0, EngineKind::StandardQM, 0, 1, rng);
  REQUIRE(ev);
  CHECK(ev->emission_time == 7.0);
  CHECK(ev->pair[0].photon_id == 0);
  CHECK(ev->pair[1].photon_id == 1);
  REQUIRE(ev->qm_pair);
  const auto ref = qcore::bell_state(qcore::BellKind::PsiMinus, 0, 1);
  CHECK(qcore::overlap(ref, *ev->qm_pair) == doctest::Approx(1.0));
}

TEST_CASE("emission rate follows the binomial oracle") {
  Rng rng(3);
  const std::uint64_t n = 100000;
  std::uint64_t pairs = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    if (sources::spdc_emit({i, double(i)}, 0.05, 0.1, EngineKind::StandardQM,
                           0, 1, rng))
      ++pairs;
  CHECK(within_4sigma_binomial(pairs, n, 0.05));
}

TEST_CASE("hidden-variable pairs are born anticorrelated") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto ev = sources::spdc_emit({0, 0.0}, 1.0, 0.0,
                                       EngineKind::ElementaryState, 2, 3, rng);
    REQUIRE(ev);
    CHECK_FALSE(ev->qm_pair);
    const double d = (i % 12) * 15.5;
    CHECK(ev->pair[0].es->respond(d, rng) == -ev->pair[1].es->respond(d, rng));
  }
}

TEST_CASE("double pass emits both pairs independently") {
  Rng rng(5);

  SUBCASE("p=1 always yields both pairs with the mirror offset") {
    const auto [a, b] = sources::double_pass_emit(
        {3, 3.0}, 1.0, 0.25, 0.0, EngineKind::StandardQM, rng);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->pass_index == 1);
    CHECK(b->pass_index == 2);
    CHECK(a->pair[0].photon_id == 0);
    CHECK(b->pair[0].photon_id == 2);
    CHECK(b->emission_time - a->emission_time == doctest::Approx(0.25));
  }

  SUBCASE("both-pair frequency is p^2") {
    const std::uint64_t n = 1000000;
    const double p = 0.01;
    std::uint64_t both = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto [a, b] = sources::double_pass_emit(
          {i, double(i)}, p, 0.0, 0.1, EngineKind::StandardQM, rng);
      if (a && b) ++both;
    }
    CHECK(within_4sigma_binomial(both, n, p * p));
  }

  SUBCASE("pass emissions are uncorrelated") {
    const std::uint64_t n = 1000000;
    const double p = 0.05;
    std::uint64_t n1 = 0, n2 = 0, n12 = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto [a, b] = sources::double_pass_emit(
          {i, double(i)}, p, 0.0, 0.1, EngineKind::StandardQM, rng);
      n1 += a.has_value();
      n2 += b.has_value();
      n12 += a.has_value() && b.has_value();
    }
    // correlation coefficient of the two emission indicators
    const double p1 = double(n1) / double(n), p2 = double(n2) / double(n);
    const double cov = double(n12) / double(n) - p1 * p2;
    const double corr = cov / std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
    const double sigma = 1.0 / std::sqrt(double(n));
    CHECK(std::abs(corr) <= 4.0 * sigma);
  }

  SUBCASE("rarity ordering: two pairs < one pair < none") {
    const std::uint64_t n = 200000;
    const double p = 0.05;
    std::uint64_t none = 0, one = 0, two = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto [a, b] = sources::double_pass_emit(
          {i, double(i)}, p, 0.0, 0.1, EngineKind::StandardQM, rng);
      const int k = int(a.has_value()) + int(b.has_value());
      none += k == 0;
      one += k == 1;
      two += k == 2;
    }
    CHECK(two < one);
    CHECK(one < none);
  }

  SUBCASE("emission time difference tracks delay plus jitter") {
    const double jitter = 0.05, delay = 0.4;
    for (int i = 0; i < 2000; ++i) {
      const auto [a, b] = sources::double_pass_emit(
          {0, 0.0}, 1.0, delay, jitter, EngineKind::StandardQM, rng);
      const double dt = b->emission_time - a->emission_time;
      CHECK(std::abs(dt - delay) < 10.0 * jitter);
    }
  }
}
