#include "mussel/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mussel/errors.hpp"

namespace mussel {

namespace {

double wavenumber_sq(const ModelParams& p, int n) { return double(n) * n / (p.l * p.l); }

// Coefficients of h(s) = D + M as a polynomial in s = n^2/l^2:
//   d s^2 + (d alpha/a* - r^2 a*^2 m*) s + alpha r (r-1) a*.
struct TuringQuadratic {
  double quad, lin, cst;
  double operator()(double s) const { return (quad * s + lin) * s + cst; }
};

TuringQuadratic turing_quadratic(const ModelParams& p, const Equilibrium& eq, double d) {
  const double as = eq.a_star;
  return {d, d * p.alpha / as - p.r * p.r * as * as * eq.m_star,
          p.alpha * p.r * (p.r - 1.0) * as};
}

// Diffusion at which mode s = n^2/l^2 is exactly marginal (D + M = 0).
double marginal_diffusion(const ModelParams& p, const Equilibrium& eq, double s) {
  const double as = eq.a_star;
  const double c2 = p.r * p.r * as * as * eq.m_star;
  const double c0 = p.alpha * p.r * (p.r - 1.0) * as;
  return (c2 * s - c0) / (s * (s + p.alpha / as));
}

}  // namespace

ModeCoeffs mode_coeffs(const ModelParams& p, const Equilibrium& eq, int n) {
  if (n < 0) throw DomainError("mode index must be nonnegative");
  const double k2 = wavenumber_sq(p, n);
  const double ms = eq.m_star, as = eq.a_star;
  ModeCoeffs mc;
  mc.n = n;
  mc.T = p.alpha + ms + (1.0 + p.gamma * p.d) * k2;
  mc.M = p.r * as * ms * (1.0 - p.alpha * p.r - p.r * as * k2);
  mc.D = p.d * (p.alpha + ms + k2) * k2;
  mc.B = -p.gamma * p.r * p.r * as * as * ms;
  return mc;
}

cplx char_derivative(const ModeCoeffs& mc, double gamma, cplx lambda, double tau) {
  const cplx e = std::exp(-lambda * tau);
  return 2.0 * gamma * lambda + mc.T + mc.B * e - tau * (mc.B * lambda + mc.M) * e;
}

std::optional<double> hopf_frequency(const ModelParams& p, const Equilibrium& eq, int n) {
  const ModeCoeffs mc = mode_coeffs(p, eq, n);
  const double g2 = p.gamma * p.gamma;
  const double P = mc.T * mc.T - 2.0 * p.gamma * mc.D - mc.B * mc.B;
  const double Q = mc.D * mc.D - mc.M * mc.M;
  const double disc = P * P - 4.0 * g2 * Q;
  if (disc < 0.0) return std::nullopt;
  const double z = (-P + std::sqrt(disc)) / (2.0 * g2);
  if (!(z > 0.0)) return std::nullopt;
  return std::sqrt(z);
}

HopfBranch hopf_branch(const ModelParams& p, const Equilibrium& eq, int n, int j_max) {
  const auto omega = hopf_frequency(p, eq, n);
  if (!omega) {
    std::ostringstream os;
    os << "no Hopf on mode " << n;
    throw NumericalError(os.str());
  }
  const ModeCoeffs mc = mode_coeffs(p, eq, n);
  const double w = *omega;
  // M c + w B s = gamma w^2 - D,  M s - w B c = T w,  with (c, s) = (cos w tau, sin w tau).
  const double det = mc.M * mc.M + w * w * mc.B * mc.B;
  const double rhs1 = p.gamma * w * w - mc.D;
  const double rhs2 = mc.T * w;
  const double cos_wt = (mc.M * rhs1 - w * mc.B * rhs2) / det;
  const double sin_wt = (w * mc.B * rhs1 + mc.M * rhs2) / det;
  double phase = std::atan2(sin_wt, cos_wt);
  if (phase <= 0.0) phase += 2.0 * M_PI;

  HopfBranch br;
  br.n = n;
  br.omega = w;
  br.quadratic_coefficient_positive = mc.T * mc.T - 2.0 * p.gamma * mc.D - mc.B * mc.B > 0.0;
  br.taus.reserve(std::max(j_max, 0) + 1);
  for (int j = 0; j <= j_max; ++j) br.taus.push_back((phase + 2.0 * M_PI * j) / w);
  return br;
}

double spatial_scale(const ModelParams& p, const Equilibrium& eq) {
  const double as = eq.a_star;
  const double c2 = p.r * p.r * as * as * eq.m_star;
  const double lin = p.d * p.alpha / as + c2;
  const double S = -0.5 * (p.alpha / as + c2 / p.d) +
                   std::sqrt(lin * lin + 4.0 * p.d * p.alpha * p.r * (p.r - 1.0) * as) /
                       (2.0 * p.d);
  if (!(S > 0.0)) throw NumericalError("S(d, alpha, r) <= 0: no inhomogeneous Hopf modes");
  return S;
}

double critical_length(const ModelParams& p, const Equilibrium& eq, int n) {
  return n / std::sqrt(spatial_scale(p, eq));
}

GammaMembership gamma_membership(const ModelParams& p, const Equilibrium& eq,
                                 const NumericalSettings& s) {
  const TuringQuadratic q = turing_quadratic(p, eq, p.d);
  GammaMembership g;
  if (q.lin >= 0.0) {
    g.vertex_value = q.cst;
    g.member = q.cst > 0.0;
    return g;
  }
  const double vertex = -q.lin / (2.0 * q.quad);
  g.vertex_value = q(vertex);
  g.marginal = std::abs(g.vertex_value) <= s.marginal_tol;
  g.member = g.vertex_value > 0.0;
  return g;
}

TuringThreshold turing_threshold(const ModelParams& p, const Equilibrium& eq, double l) {
  const double one_minus = 1.0 - p.alpha * p.r;
  if (!(one_minus > 0.0)) throw DomainError("turing_threshold needs 1 - alpha r > 0");
  if (!(l > 0.0)) throw DomainError("domain parameter l must be positive");

  TuringThreshold tt;
  const double om = 1.0 - p.alpha;
  tt.d0 = p.alpha * (p.r - 1.0) * one_minus * one_minus /
          (om * om * om * (2.0 * std::sqrt(one_minus) + 2.0 - p.alpha * p.r));
  const double as = eq.a_star;
  const double c2 = p.r * p.r * as * as * eq.m_star;
  tt.k2_star = (c2 - tt.d0 * p.alpha / as) / (2.0 * tt.d0);

  ModelParams pl = p;
  pl.l = l;
  // The two integers bracketing l*sqrt(k2*); the one with the larger marginal
  // diffusion destabilises first as d decreases.
  const int lo = static_cast<int>(std::floor(l * std::sqrt(tt.k2_star)));
  int best = -1;
  double best_d = -std::numeric_limits<double>::infinity();
  for (int n : {lo, lo + 1}) {
    if (n < 1) continue;
    const double dc = marginal_diffusion(pl, eq, wavenumber_sq(pl, n));
    if (dc > best_d) {
      best_d = dc;
      best = n;
    }
  }
  tt.n2 = best;
  tt.d_marginal = best_d;
  return tt;
}

double hopf_transversality(const ModelParams& p, const Equilibrium& eq, int n, double tau_c) {
  (void)tau_c;  // the closed form is independent of the branch index
  const auto omega = hopf_frequency(p, eq, n);
  if (!omega) throw NumericalError("hopf_transversality: mode has no Hopf pair");
  const ModeCoeffs mc = mode_coeffs(p, eq, n);
  const double w = *omega;
  const double P = mc.T * mc.T - 2.0 * p.gamma * mc.D - mc.B * mc.B;
  const double disc = P * P - 4.0 * p.gamma * p.gamma * (mc.D * mc.D - mc.M * mc.M);
  const double value = std::sqrt(std::max(disc, 0.0)) / (mc.B * mc.B * w * w + mc.M * mc.M);
  if (!(value > 0.0))
    throw NumericalError("Hopf transversality violated: Re(dlambda/dtau)^{-1} <= 0");
  return value;
}

TuringTransversality turing_transversality(const ModelParams& p, const Equilibrium& eq, int n2,
                                           double tau) {
  const ModeCoeffs mc = mode_coeffs(p, eq, n2);
  const double k2 = wavenumber_sq(p, n2);
  const double dD_dd = (p.alpha + eq.m_star + k2) * k2;
  TuringTransversality tt;
  tt.simplicity_witness = mc.T + mc.B - tau * mc.M;
  if (!(tt.simplicity_witness > 0.0)) throw NumericalError("zero eigenvalue not simple");
  tt.derivative = -dD_dd / tt.simplicity_witness;
  return tt;
}

THPoint turing_hopf_point(const ModelParams& p, const Equilibrium& eq, double l) {
  ModelParams pl = p;
  pl.l = l;
  require_hypotheses(pl);
  const TuringThreshold tt = turing_threshold(pl, eq, l);
  pl.d = tt.d0;

  // Hopf modes form an initial segment 0..n (D_n - M_n increases with n).
  constexpr int kMaxModes = 10000;
  THPoint th;
  th.tau0 = std::numeric_limits<double>::infinity();
  for (int n = 0; n < kMaxModes; ++n) {
    if (!hopf_frequency(pl, eq, n)) break;
    const HopfBranch br = hopf_branch(pl, eq, n, 0);
    if (br.taus.front() < th.tau0) {
      th.tau0 = br.taus.front();
      th.n1 = n;
      th.omega0 = br.omega;
    }
  }
  if (!std::isfinite(th.tau0)) throw NumericalError("no Hopf branch found at d0");
  th.d0 = tt.d0;
  th.n2 = tt.n2;
  th.d_marginal = tt.d_marginal;
  if (th.n1 == th.n2)
    throw NumericalError("Hopf and Turing modes coincide (n1 == n2); not a Turing-Hopf point");
  return th;
}

RootScan rightmost_roots(const ModelParams& p, const Equilibrium& eq, int n, double tau,
                         const SearchBox& box, std::size_t max_roots,
                         const NumericalSettings& s) {
  const ModeCoeffs mc = mode_coeffs(p, eq, n);
  const int g = std::max(box.grid, 2);
  RootScan scan;
  std::vector<cplx>& roots = scan.roots;

  // Residual is judged relative to the magnitude of the individual terms when
  // they exceed 1, since e^{-lambda tau} is large deep in the left half-plane.
  auto term_scale = [&](cplx z) {
    return std::abs(p.gamma * z * z) + std::abs(mc.T * z) +
           std::abs(mc.B * z + mc.M) * std::abs(std::exp(-z * tau)) + std::abs(mc.D);
  };

  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      cplx z(box.re_min + (box.re_max - box.re_min) * i / (g - 1), box.im_max * j / (g - 1));
      for (int it = 0; it < 80; ++it) {
        const cplx f = char_value(mc, p.gamma, z, tau);
        const cplx df = char_derivative(mc, p.gamma, z, tau);
        if (df == cplx(0.0)) break;
        const cplx step = f / df;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e6) break;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      const cplx f = char_value(mc, p.gamma, z, tau);
      if (!std::isfinite(std::abs(f))) continue;
      if (!(std::abs(f) <= s.residual_tol * std::max(1.0, term_scale(z)))) continue;
      if (z.imag() < 0.0) z = std::conj(z);
      if (std::abs(z.imag()) < 1e-12) z = {z.real(), 0.0};
      const double margin = 1e-9;
      if (z.real() < box.re_min - margin || z.real() > box.re_max + margin ||
          z.imag() > box.im_max + margin)
        continue;
      const bool dup = std::any_of(roots.begin(), roots.end(),
                                   [&](cplx r) { return std::abs(r - z) < s.dedupe_tol; });
      if (!dup) roots.push_back(z);
    }
  }
  if (roots.empty()) scan.warning = "Newton iteration did not converge from any seed";
  std::sort(roots.begin(), roots.end(),
            [](cplx a, cplx b) { return a.real() > b.real(); });
  if (roots.size() > max_roots) roots.resize(max_roots);
  return scan;
}

}  // namespace mussel
