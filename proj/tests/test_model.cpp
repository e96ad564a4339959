#include <doctest.h>

#include <cmath>

#include "mussel/errors.hpp"
#include "mussel/model.hpp"
#include "oracles.hpp"

using namespace mussel;

namespace {
ModelParams set_a() { return {1.1, 4.0, 0.654, 0.05, 0.0, 6.0}; }
}  // namespace

TEST_CASE("equilibrium matches bisection oracle") {
  const ModelParams p = set_a();
  const Equilibrium eq = positive_equilibrium(p);
  const auto [m, a] = oracle::equilibrium(p.r, p.alpha);
  CHECK(eq.m_star == doctest::Approx(m).epsilon(1e-12));
  CHECK(eq.a_star == doctest::Approx(a).epsilon(1e-12));
  CHECK(std::abs(eq.m_star - 0.233073) < 1e-5);
  CHECK(std::abs(eq.a_star - 0.737257) < 1e-5);
}

TEST_CASE("equilibrium zeroes the reaction terms") {
  for (double alpha : {0.2, 0.5, 0.654, 0.8}) {
    ModelParams p = set_a();
    p.alpha = alpha;
    if (!h1_holds(p)) continue;
    const Equilibrium eq = positive_equilibrium(p);
    const Reaction rx = reaction(p, eq.m_star, eq.a_star, eq.m_star, eq.a_star);
    CHECK(std::abs(rx.m_rate) < 1e-14);
    CHECK(std::abs(rx.a_rate) < 1e-14);
  }
}

TEST_CASE("equilibrium identity r^2 a*^2 m* = m*/(1+m*)^2") {
  const ModelParams p = set_a();
  const Equilibrium eq = positive_equilibrium(p);
  const double lhs = p.r * p.r * eq.a_star * eq.a_star * eq.m_star;
  CHECK(lhs == doctest::Approx(eq.m_star / std::pow(1.0 + eq.m_star, 2)).epsilon(1e-13));
}

TEST_CASE("equilibrium rejects degenerate and out-of-range inputs") {
  ModelParams p = set_a();
  p.alpha = 1.0 / p.r * (1.0 - 1e-12);
  CHECK_THROWS_AS(positive_equilibrium(p), DomainError);
  p = set_a();
  p.r = 0.9;
  CHECK_THROWS_AS(positive_equilibrium(p), HypothesisError);
  p = set_a();
  p.alpha = 0.95;  // alpha r > 1
  CHECK_THROWS_AS(positive_equilibrium(p), HypothesisError);
}

TEST_CASE("hypotheses report") {
  const HypothesisReport ok = hypotheses(set_a());
  CHECK(ok.h1_holds);
  CHECK(ok.h2_holds);
  CHECK(ok.H0_value == doctest::Approx((1 - 0.654 * 1.1) / (1 - 0.654)));
  CHECK(ok.P0_value == doctest::Approx(1.1 * (1 - 0.654) / (4.0 * 0.1)));

  ModelParams p = set_a();
  p.r = 1.0;
  const HypothesisReport sing = hypotheses(p);
  CHECK_FALSE(sing.h2_defined);
  CHECK_FALSE(sing.h2_holds);
  CHECK_THROWS_AS(require_hypotheses(p), HypothesisError);

  p = set_a();
  p.gamma = 1000.0;  // P0 shrinks below H0^2
  const HypothesisReport h2 = hypotheses(p);
  CHECK(h2.h1_holds);
  CHECK_FALSE(h2.h2_holds);
  CHECK_THROWS_AS(require_hypotheses(p), HypothesisError);
}

TEST_CASE("parameter validation") {
  ModelParams p = set_a();
  CHECK_NOTHROW(p.validate());
  p.d = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = set_a();
  p.tau = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = set_a();
  p.l = std::nan("");
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("nondimensionalization maps a constructed dimensional set onto the reference set") {
  // omega = c k_M / H = 1 and D_A = 1 make the scales trivial.
  DimensionalParams dp;
  dp.c = 1.0;
  dp.k_M = 1.0;
  dp.H = 1.0;
  dp.d_M = 4.0;
  dp.f = 0.654;
  dp.A_up = 2.0;
  dp.e = 1.1 * 4.0 / 2.0;
  dp.D_A = 1.0;
  dp.D_M = 0.05 * 4.0;
  const Nondimensionalized nd = nondimensionalize(dp, 0.25, 6.0 * M_PI);
  CHECK(nd.params.r == doctest::Approx(1.1));
  CHECK(nd.params.gamma == doctest::Approx(4.0));
  CHECK(nd.params.alpha == doctest::Approx(0.654));
  CHECK(nd.params.d == doctest::Approx(0.05));
  CHECK(nd.params.tau == doctest::Approx(1.0));
  CHECK(nd.params.l == doctest::Approx(6.0));
  CHECK(nd.scales.at("omega") == doctest::Approx(1.0));

  dp.D_A = 4.0;  // length scale 2
  const Nondimensionalized nd2 = nondimensionalize(dp, 0.0, 6.0 * M_PI);
  CHECK(nd2.params.l == doctest::Approx(3.0));
  CHECK(nd2.scales.at("length_scale") == doctest::Approx(2.0));

  dp.H = 0.0;
  CHECK_THROWS_AS(nondimensionalize(dp, 0.0, 1.0), DomainError);
}
