#include <doctest.h>

#include <cmath>

#include "mussel/errors.hpp"
#include "mussel/spectrum.hpp"
#include "oracles.hpp"

using namespace mussel;

namespace {

ModelParams set_a(double d = 0.05, double tau = 0.0) { return {1.1, 4.0, 0.654, d, tau, 6.0}; }

// Continuous marginal diffusion for s = k^2, from D + M = 0 written out directly.
double marginal_d(const ModelParams& p, const Equilibrium& eq, double s) {
  const double ms = eq.m_star, as = eq.a_star;
  // d (alpha + m* + s) s + r a* m* (1 - alpha r - r a* s) = 0
  return -p.r * as * ms * (1.0 - p.alpha * p.r - p.r * as * s) / ((p.alpha + ms + s) * s);
}

// Newton on E_n from a seed, for finite-difference transversality checks.
cplx newton_root(const ModelParams& p, const Equilibrium& eq, int n, cplx z) {
  const ModeCoeffs mc = mode_coeffs(p, eq, n);
  for (int i = 0; i < 100; ++i) {
    const cplx step = char_value(mc, p.gamma, z, p.tau) / char_derivative(mc, p.gamma, z, p.tau);
    z -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return z;
}

}  // namespace

TEST_CASE("Hopf frequency matches a dense scan of the modulus condition") {
  const ModelParams p = set_a(0.0531254537920516);
  const Equilibrium eq = positive_equilibrium(p);
  for (int n = 0; n <= 8; ++n) {
    const ModeCoeffs mc = mode_coeffs(p, eq, n);
    // |gamma (i w)^2 + T i w + D|^2 - |B i w + M|^2 changes sign at the Hopf frequency.
    auto G = [&](double w) {
      const double re = mc.D - p.gamma * w * w, im = mc.T * w;
      return re * re + im * im - (mc.M * mc.M + mc.B * mc.B * w * w);
    };
    double found = -1.0;
    const int samples = 20000;
    for (int i = 1; i < samples; ++i) {
      const double w0 = 2.0 * (i - 1) / samples + 1e-9, w1 = 2.0 * i / samples;
      if ((G(w0) < 0) != (G(w1) < 0)) {
        found = oracle::bisect(G, w0, w1);
        break;
      }
    }
    const auto w = hopf_frequency(p, eq, n);
    if (found < 0) {
      CHECK_FALSE(w.has_value());
    } else {
      REQUIRE(w.has_value());
      CHECK(*w == doctest::Approx(found).epsilon(1e-9));
    }
  }
}

TEST_CASE("critical delays solve the characteristic equation") {
  const ModelParams p = set_a(0.0531254537920516);
  const Equilibrium eq = positive_equilibrium(p);
  const HopfBranch br = hopf_branch(p, eq, 0, 4);
  REQUIRE(br.taus.size() == 5);
  CHECK(br.quadratic_coefficient_positive);
  const ModeCoeffs mc = mode_coeffs(p, eq, 0);
  for (std::size_t j = 0; j < br.taus.size(); ++j) {
    CHECK(std::abs(char_value(mc, p.gamma, cplx(0.0, br.omega), br.taus[j])) < 1e-12);
    if (j > 0) CHECK(br.taus[j] - br.taus[j - 1] == doctest::Approx(2 * M_PI / br.omega));
  }
  CHECK(br.taus[0] == doctest::Approx(7.084102).epsilon(1e-7));
  CHECK(br.taus[0] > 0.0);
  CHECK(br.taus[0] <= 2 * M_PI / br.omega);
}

TEST_CASE("mode without Hopf pair is reported") {
  const ModelParams p = set_a(0.0531254537920516);
  const Equilibrium eq = positive_equilibrium(p);
  CHECK_FALSE(hopf_frequency(p, eq, 40).has_value());
  CHECK_THROWS_AS(hopf_branch(p, eq, 40, 0), NumericalError);
}

TEST_CASE("Turing threshold agrees with golden-section maximisation") {
  ModelParams p = set_a();
  const Equilibrium eq = positive_equilibrium(p);
  const TuringThreshold tt = turing_threshold(p, eq, 6.0);
  auto f = [&](double s) { return marginal_d(p, eq, s); };
  const double s_star = oracle::golden_max(f, 1e-3, 10.0);
  CHECK(tt.d0 == doctest::Approx(f(s_star)).epsilon(1e-10));
  CHECK(tt.k2_star == doctest::Approx(s_star).epsilon(1e-5));
  CHECK(std::abs(tt.d0 - 0.0531255) < 1e-6);
  CHECK(tt.n2 == 6);
  CHECK(tt.d_marginal == doctest::Approx(marginal_d(p, eq, 1.0)).epsilon(1e-12));
  CHECK(tt.d_marginal <= tt.d0);
  CHECK(tt.d0 - tt.d_marginal < 1e-6);
}

TEST_CASE("Turing threshold picks the better of the two bracketing modes") {
  ModelParams p = set_a();
  const Equilibrium eq = positive_equilibrium(p);
  for (double l : {2.3, 4.7, 6.0, 9.1, 13.5}) {
    const TuringThreshold tt = turing_threshold(p, eq, l);
    double best = -1e300;
    int best_n = -1;
    for (int n = 1; n < 200; ++n) {
      const double dc = marginal_d(p, eq, double(n) * n / (l * l));
      if (dc > best) {
        best = dc;
        best_n = n;
      }
    }
    CHECK(tt.n2 == best_n);
  }
}

TEST_CASE("spatial scale is the positive root of D - M") {
  const ModelParams p = set_a(0.0531254537920516);
  const Equilibrium eq = positive_equilibrium(p);
  const double S = spatial_scale(p, eq);
  auto dm = [&](double s) {
    const double ms = eq.m_star, as = eq.a_star;
    return p.d * (p.alpha + ms + s) * s - p.r * as * ms * (1.0 - p.alpha * p.r - p.r * as * s);
  };
  CHECK(S == doctest::Approx(oracle::bisect(dm, 0.0, 100.0)).epsilon(1e-10));
  // Hopf exists exactly for n^2/l^2 < S.
  for (int n = 0; n < 30; ++n) {
    const bool below = double(n) * n / 36.0 < S;
    CHECK(hopf_frequency(p, eq, n).has_value() == below);
  }
  CHECK(critical_length(p, eq, 3) == doctest::Approx(3.0 / std::sqrt(S)));
}

TEST_CASE("Turing-stable region membership") {
  const ModelParams p0 = set_a();
  const Equilibrium eq = positive_equilibrium(p0);
  const double d0 = turing_threshold(p0, eq, 6.0).d0;
  CHECK(gamma_membership(set_a(d0 * 1.01), eq).member);
  CHECK_FALSE(gamma_membership(set_a(d0 * 0.99), eq).member);
  const GammaMembership at = gamma_membership(set_a(d0), eq);
  CHECK(at.marginal);
}

TEST_CASE("Turing-Hopf point for the reference set") {
  const ModelParams p = set_a();
  const Equilibrium eq = positive_equilibrium(p);
  const THPoint th = turing_hopf_point(p, eq, 6.0);
  CHECK(th.n1 == 0);
  CHECK(th.n2 == 6);
  CHECK(std::abs(th.tau0 - 7.084102) < 1e-4);
  CHECK(std::abs(th.d0 - 0.0531255) < 1e-6);
  ModelParams pt = set_a(th.d0, th.tau0);
  const ModeCoeffs mc = mode_coeffs(pt, eq, 0);
  CHECK(std::abs(char_value(mc, pt.gamma, cplx(0.0, th.omega0), th.tau0)) < 1e-9);
}

TEST_CASE("Turing-Hopf point gate") {
  ModelParams p = set_a();
  p.gamma = 1000.0;
  const Equilibrium eq = positive_equilibrium(p);
  CHECK_THROWS_AS(turing_hopf_point(p, eq, 6.0), HypothesisError);
}

TEST_CASE("Hopf transversality matches finite differences of the root") {
  const ModelParams base = set_a(0.0531254537920516);
  const Equilibrium eq = positive_equilibrium(base);
  int checked = 0;
  // Only modes 0..2 carry a Hopf pair at d0; take 7 + 7 + 6 delays.
  for (int n = 0; n <= 2; ++n) {
    const HopfBranch br = hopf_branch(base, eq, n, n < 2 ? 6 : 5);
    for (double tc : br.taus) {
      const double h = 1e-5;
      ModelParams pp = base, pm = base;
      pp.tau = tc + h;
      pm.tau = tc - h;
      const cplx seed(0.0, br.omega);
      const cplx dl = (newton_root(pp, eq, n, seed) - newton_root(pm, eq, n, seed)) / (2 * h);
      const double expected = (1.0 / dl).real();
      const double got = hopf_transversality(base, eq, n, tc);
      CHECK(got > 0.0);
      CHECK(got == doctest::Approx(expected).epsilon(1e-5));
      ++checked;
    }
  }
  CHECK(checked == 20);
}

TEST_CASE("Turing transversality matches finite differences of the zero root") {
  const ModelParams p0 = set_a();
  const Equilibrium eq = positive_equilibrium(p0);
  const THPoint th = turing_hopf_point(p0, eq, 6.0);
  const ModelParams p = set_a(th.d_marginal, th.tau0);
  const TuringTransversality tt = turing_transversality(p, eq, 6, th.tau0);
  CHECK(tt.derivative < 0.0);
  CHECK(tt.simplicity_witness > 0.0);
  const double h = 1e-6;
  ModelParams pp = p, pm = p;
  pp.d += h;
  pm.d -= h;
  const double dl =
      (newton_root(pp, eq, 6, 0.0).real() - newton_root(pm, eq, 6, 0.0).real()) / (2 * h);
  CHECK(tt.derivative == doctest::Approx(dl).epsilon(1e-5));
}

TEST_CASE("rightmost roots at the Turing-Hopf point") {
  const ModelParams p0 = set_a();
  const Equilibrium eq = positive_equilibrium(p0);
  const THPoint th = turing_hopf_point(p0, eq, 6.0);
  const ModelParams p = set_a(th.d0, th.tau0);
  const RootScan s0 = rightmost_roots(p, eq, 0, th.tau0);
  REQUIRE_FALSE(s0.roots.empty());
  CHECK(std::abs(s0.roots.front() - cplx(0.0, th.omega0)) < 1e-8);
  for (int n = 0; n <= 20; ++n) {
    const RootScan s = rightmost_roots(p, eq, n, th.tau0);
    for (cplx z : s.roots) CHECK(z.real() < 1e-6);
  }
}

TEST_CASE("rightmost roots are sorted, deduplicated and in the upper half-plane") {
  const ModelParams p = set_a(0.06, 8.0);
  const Equilibrium eq = positive_equilibrium(p);
  const RootScan s = rightmost_roots(p, eq, 0, p.tau);
  REQUIRE(s.roots.size() >= 2);
  for (std::size_t i = 0; i < s.roots.size(); ++i) {
    CHECK(s.roots[i].imag() >= 0.0);
    if (i > 0) {
      CHECK(s.roots[i - 1].real() >= s.roots[i].real());
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(s.roots[i] - s.roots[j]) > 1e-7);
    }
  }
  // tau beyond tau0 on mode 0: a root has crossed into the right half-plane.
  CHECK(s.roots.front().real() > 0.0);
}
