#include "mussel/amplitude.hpp"

#include <cmath>
#include <limits>

#include "mussel/errors.hpp"

namespace mussel {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

AmplitudePoint make_point(const AmplitudeSystem& as, double eps1, double eps2, double rho,
                          double eta) {
  const double tol = 1e-12;
  AmplitudePoint pt;
  pt.rho = rho;
  pt.eta = eta;
  Eigen::Matrix2d J;
  J << eps1 + 3.0 * rho * rho + as.b * eta * eta, 2.0 * as.b * rho * eta,
      2.0 * as.c * rho * eta, eps2 + as.c * rho * rho + 3.0 * as.d_hat * eta * eta;
  J *= as.epsilon;
  const double half_tr = 0.5 * J.trace();
  const cplx root = std::sqrt(cplx(half_tr * half_tr - J.determinant(), 0.0));
  pt.eigenvalues << half_tr + root, half_tr - root;
  const double r0 = pt.eigenvalues(0).real(), r1 = pt.eigenvalues(1).real();
  if (std::abs(r0) <= tol || std::abs(r1) <= tol) pt.stability = Stability::Marginal;
  else if (r0 < 0.0 && r1 < 0.0) pt.stability = Stability::StableNode;
  else if (r0 > 0.0 && r1 > 0.0) pt.stability = Stability::UnstableNode;
  else pt.stability = Stability::Saddle;
  return pt;
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::StableNode: return "stable-node";
    case Stability::UnstableNode: return "unstable-node";
    case Stability::Saddle: return "saddle";
    case Stability::Marginal: return "marginal";
  }
  return "marginal";
}

std::string to_string(Region r) {
  static const char* names[] = {"D1", "D2", "D3", "D4", "D5", "D6",
                                "L1", "L2", "T1", "T2", "origin", "unlabelled"};
  return names[static_cast<int>(r)];
}

Eigen::Vector2d amplitude_field(const AmplitudeSystem& as, double eps1, double eps2,
                                const Eigen::Vector2d& x) {
  const double r2 = x(0) * x(0), e2 = x(1) * x(1);
  return as.epsilon * Eigen::Vector2d(x(0) * (eps1 + r2 + as.b * e2),
                                      x(1) * (eps2 + as.c * r2 + as.d_hat * e2));
}

AmplitudeEquilibria equilibria(const AmplitudeSystem& as, double tau_eps, double d_eps,
                               const NumericalSettings& s) {
  if (std::abs(as.d_hat_minus_bc) <= s.degeneracy_tol)
    throw NumericalError("degenerate amplitude system: d_hat - b c vanishes");
  AmplitudeEquilibria out;
  const double e1 = as.eps1(tau_eps, d_eps), e2 = as.eps2(tau_eps, d_eps);
  out.eps1 = e1;
  out.eps2 = e2;
  out.E1 = make_point(as, e1, e2, 0.0, 0.0);

  auto note = [&](const char* what) {
    out.on_boundary = true;
    if (!out.boundary_note.empty()) out.boundary_note += "; ";
    out.boundary_note += what;
  };

  const double rad2 = -e1;
  if (std::abs(rad2) <= s.radicand_tol) note("E2 radicand vanishes (on L1)");
  else if (rad2 > 0.0) out.E2 = make_point(as, e1, e2, std::sqrt(rad2), 0.0);

  const double rad3 = -e2 / as.d_hat;
  if (std::abs(rad3) <= s.radicand_tol) note("E3 radicand vanishes (on L2)");
  else if (rad3 > 0.0) {
    const double h = std::sqrt(rad3);
    out.E3 = std::array<AmplitudePoint, 2>{make_point(as, e1, e2, 0.0, h),
                                           make_point(as, e1, e2, 0.0, -h)};
  }

  const double rr = (as.b * e2 - as.d_hat * e1) / as.d_hat_minus_bc;
  const double ee = (as.c * e1 - e2) / as.d_hat_minus_bc;
  if (std::abs(rr) <= s.radicand_tol || std::abs(ee) <= s.radicand_tol)
    note("E4 radicand vanishes (on T1 or T2)");
  else if (rr > 0.0 && ee > 0.0) {
    const double r = std::sqrt(rr), h = std::sqrt(ee);
    out.E4 = std::array<AmplitudePoint, 2>{make_point(as, e1, e2, r, h),
                                           make_point(as, e1, e2, r, -h)};
  }
  return out;
}

double BifurcationLine::slope() const {
  return vertical() ? std::numeric_limits<double>::quiet_NaN() : -a_tau / a_d;
}

BifurcationLines bifurcation_lines(const AmplitudeSystem& as) {
  const double det = as.eps1_tau * as.eps2_d - as.eps1_d * as.eps2_tau;
  if (std::abs(det) <= default_settings().degeneracy_tol)
    throw NumericalError("degenerate line arrangement: eps-maps are parallel");
  BifurcationLines bl;
  bl.L1 = {"L1", as.eps1_tau, as.eps1_d};
  bl.L2 = {"L2", as.eps2_tau, as.eps2_d};
  // b eps2 = d_hat eps1 and eps2 = c eps1.
  bl.T1 = {"T1", as.b * as.eps2_tau - as.d_hat * as.eps1_tau,
           as.b * as.eps2_d - as.d_hat * as.eps1_d};
  bl.T2 = {"T2", as.eps2_tau - as.c * as.eps1_tau, as.eps2_d - as.c * as.eps1_d};
  for (const BifurcationLine* l : {&bl.L1, &bl.L2, &bl.T1, &bl.T2})
    if (l->a_tau == 0.0 && l->a_d == 0.0)
      throw NumericalError("degenerate line arrangement: " + l->name + " is undefined");
  return bl;
}

UnfoldingCase unfolding_case(const AmplitudeSystem& as) {
  UnfoldingCase uc;
  uc.d_hat = sign_of(as.d_hat);
  uc.b = sign_of(as.b);
  uc.c = sign_of(as.c);
  uc.d_hat_minus_bc = sign_of(as.d_hat_minus_bc);
  // The feasible sign patterns in a fixed order.
  static const int table[12][4] = {
      {1, 1, 1, 1},  {1, 1, 1, -1},  {1, 1, -1, 1},   {1, -1, 1, 1},
      {1, -1, -1, 1}, {1, -1, -1, -1}, {-1, 1, 1, -1},  {-1, 1, -1, 1},
      {-1, 1, -1, -1}, {-1, -1, 1, 1}, {-1, -1, 1, -1}, {-1, -1, -1, -1}};
  for (int k = 0; k < 12; ++k) {
    if (table[k][0] == uc.d_hat && table[k][1] == uc.b && table[k][2] == uc.c &&
        table[k][3] == uc.d_hat_minus_bc) {
      uc.index = k + 1;
      break;
    }
  }
  if (uc.index == 0) throw NumericalError("amplitude coefficients match no unfolding case");
  uc.has_named_regions = uc.index == 2;
  uc.label = uc.has_named_regions ? "Ia" : "case " + std::to_string(uc.index);
  return uc;
}

std::string signature(const AmplitudeEquilibria& eq) {
  std::string s = "E1:" + to_string(eq.E1.stability);
  if (eq.E2) s += ",E2:" + to_string(eq.E2->stability);
  if (eq.E3) s += ",E3:" + to_string((*eq.E3)[0].stability);
  if (eq.E4) s += ",E4:" + to_string((*eq.E4)[0].stability);
  return s;
}

RegionResult classify_region(const AmplitudeSystem& as, double tau_eps, double d_eps) {
  RegionResult res;
  res.unfolding = unfolding_case(as);
  const BifurcationLines bl = bifurcation_lines(as);
  res.equilibria = equilibria(as, tau_eps, d_eps);
  res.signature = signature(res.equilibria);

  const double norm = std::hypot(tau_eps, d_eps);
  if (norm == 0.0) {
    res.region = Region::Origin;
    return res;
  }
  if (!res.unfolding.has_named_regions || as.epsilon != -1.0) {
    res.region = Region::Unlabelled;
    return res;
  }

  // Signed distance-like values, scale-invariant in (tau_eps, d_eps).
  auto side = [&](const BifurcationLine& l) {
    return (l.a_tau * tau_eps + l.a_d * d_eps) / (std::hypot(l.a_tau, l.a_d) * norm);
  };
  const double tol = 1e-12;
  const double s_l1 = side(bl.L1), s_l2 = side(bl.L2);
  const double e1 = as.eps1(tau_eps, d_eps), e2 = as.eps2(tau_eps, d_eps);
  if (std::abs(s_l1) <= tol) {
    res.region = Region::L1;
    return res;
  }
  if (std::abs(s_l2) <= tol) {
    res.region = Region::L2;
    return res;
  }
  if (e1 > 0.0) {
    res.region = e2 > 0.0 ? Region::D1 : Region::D6;
    return res;
  }
  if (e2 > 0.0) {
    res.region = Region::D2;
    return res;
  }
  // eps1 < 0, eps2 < 0: the rays of T1 and T2 split this quadrant.
  const double s_t1 = side(bl.T1), s_t2 = side(bl.T2);
  if (std::abs(s_t1) <= tol) res.region = Region::T1;
  else if (std::abs(s_t2) <= tol) res.region = Region::T2;
  else if (as.d_hat * e1 - as.b * e2 < 0.0) res.region = Region::D3;
  else if (as.c * e1 - e2 < 0.0) res.region = Region::D4;
  else res.region = Region::D5;
  return res;
}

AmplitudeTrajectory integrate(const AmplitudeSystem& as, double tau_eps, double d_eps,
                              const Eigen::Vector2d& initial, double horizon, double dt,
                              int record_stride) {
  if (!(initial(0) >= 0.0)) throw DomainError("integrate: rho0 must be >= 0");
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw DomainError("integrate: need dt > 0, T >= 0");
  if (record_stride < 1) record_stride = 1;
  const double e1 = as.eps1(tau_eps, d_eps), e2 = as.eps2(tau_eps, d_eps);
  auto f = [&](const Eigen::Vector2d& x) { return amplitude_field(as, e1, e2, x); };

  AmplitudeTrajectory tr;
  Eigen::Vector2d x = initial;
  const long steps = std::lround(horizon / dt);
  tr.t.push_back(0.0);
  tr.states.push_back(x);
  for (long n = 1; n <= steps; ++n) {
    const Eigen::Vector2d k1 = f(x);
    const Eigen::Vector2d k2 = f(x + 0.5 * dt * k1);
    const Eigen::Vector2d k3 = f(x + 0.5 * dt * k2);
    const Eigen::Vector2d k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = n * dt;
    if (!x.allFinite() || x.norm() > 1e6) {
      tr.diverged = true;
      tr.divergence_time = t;
      tr.t.push_back(t);
      tr.states.push_back(x);
      return tr;
    }
    if (n % record_stride == 0 || n == steps) {
      tr.t.push_back(t);
      tr.states.push_back(x);
    }
  }
  return tr;
}

}  // namespace mussel
