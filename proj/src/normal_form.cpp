#include "mussel/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mussel/errors.hpp"

namespace mussel {

namespace {

using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

constexpr cplx I(0.0, 1.0);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[i] = x;
    g.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

double inf_norm(const Vec2c& v) { return v.cwiseAbs().maxCoeff(); }

// Null vector (1, x) of A: uses the row whose second entry has the larger modulus.
Vec2c right_null(const Mat2c& A) {
  const int i = std::abs(A(0, 1)) >= std::abs(A(1, 1)) ? 0 : 1;
  if (A(i, 1) == cplx(0.0)) throw NumericalError("singular eigen-system");
  return Vec2c(1.0, -A(i, 0) / A(i, 1));
}

// Left null vector (x, 1) of A: uses the column whose first entry has the larger modulus.
Eigen::RowVector2cd left_null(const Mat2c& A) {
  const int j = std::abs(A(0, 0)) >= std::abs(A(0, 1)) ? 0 : 1;
  if (A(0, j) == cplx(0.0)) throw NumericalError("singular eigen-system");
  return Eigen::RowVector2cd(-A(1, j) / A(0, j), 1.0);
}

PrintedFormMatch compare_printed(cplx solver, cplx printed) {
  PrintedFormMatch m;
  m.ratio = printed == cplx(0.0) ? cplx(0.0) : solver / printed;
  const double tol = 1e-9;
  if (std::abs(m.ratio - 1.0) < tol) m.kind = PrintedFormMatch::Kind::Exact;
  else if (std::abs(m.ratio + 1.0) < tol) m.kind = PrintedFormMatch::Kind::Negated;
  else if (std::abs(m.ratio.imag()) < tol * std::abs(m.ratio))
    m.kind = PrintedFormMatch::Kind::Scaled;
  else m.kind = PrintedFormMatch::Kind::Mismatch;
  return m;
}

double k2_of(const ModelParams& p, int n) { return double(n) * n / (p.l * p.l); }

}  // namespace

std::string to_string(PrintedFormMatch::Kind k) {
  switch (k) {
    case PrintedFormMatch::Kind::Exact: return "exact";
    case PrintedFormMatch::Kind::Negated: return "negated";
    case PrintedFormMatch::Kind::Scaled: return "scaled";
    case PrintedFormMatch::Kind::Mismatch: return "mismatch";
  }
  return "mismatch";
}

Linearization linearize(const ModelParams& p, const Equilibrium& eq) {
  const double ms = eq.m_star, as = eq.a_star;
  Linearization lin;
  lin.L1 << 0.0, 0.0, -as / p.gamma, -(p.alpha + ms) / p.gamma;
  lin.L2 << ms / ((1.0 + ms) * (1.0 + ms)), p.r * ms, 0.0, 0.0;
  lin.diffusion << p.d, 0.0, 0.0, 1.0 / p.gamma;
  return lin;
}

Eigen::Matrix2cd characteristic_matrix(const Linearization& lin, double k2, cplx lambda,
                                       double tau) {
  return lambda * Mat2c::Identity() + (k2 * lin.diffusion - lin.L1).cast<cplx>() -
         std::exp(-lambda * tau) * lin.L2.cast<cplx>();
}

cplx delay_pairing(const Eigen::RowVector2cd& row, cplx z_row, const Eigen::Vector2cd& col,
                   cplx z_col, const Eigen::Matrix2d& L2, double tau0) {
  static const GaussRule rule = gauss_legendre(16);
  constexpr int kPanels = 16;
  const cplx kernel = (row * L2.cast<cplx>() * col).value();
  cplx integral = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double a = -1.0 + double(k) / kPanels, b = a + 1.0 / kPanels;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[i];
      integral += 0.5 * (b - a) * rule.w[i] * std::exp(-z_row * (xi + 1.0)) *
                  std::exp(z_col * xi);
    }
  }
  return (row * col).value() + tau0 * kernel * integral;
}

EigenData eigen_data(const ModelParams& p, const Equilibrium& eq, const THPoint& th) {
  if (th.n1 != 0)
    throw NumericalError("unsupported: normal form implemented for a homogeneous Hopf mode (n1 = 0)");
  if (!(th.tau0 > 0.0) || !(th.omega0 > 0.0)) throw DomainError("invalid Turing-Hopf point");

  ModelParams pd = p;
  pd.d = th.d0;
  const Linearization lin = linearize(pd, eq);
  const double k1 = k2_of(p, th.n1), k2 = k2_of(p, th.n2);
  const double ms = eq.m_star, as = eq.a_star, g = p.gamma;
  const cplx lam1(0.0, th.omega0);
  const cplx e = std::exp(-lam1 * th.tau0);

  EigenData ed;
  ed.th = th;
  const Mat2c A1 = characteristic_matrix(lin, k1, lam1, th.tau0);
  ed.q = right_null(A1);
  ed.q_star = left_null(A1);
  ed.q_residual = inf_norm(A1 * ed.q);
  ed.q_star_residual = inf_norm((ed.q_star * A1).transpose());

  const Mat2c A2 = characteristic_matrix(lin, k2, 0.0, th.tau0);
  ed.p = right_null(A2).real();
  ed.p_star = left_null(A2).real();
  ed.p_residual_at_d0 = inf_norm(A2 * ed.p.cast<cplx>());
  ModelParams pm = p;
  pm.d = th.d_marginal;
  const Mat2c A2m = characteristic_matrix(linearize(pm, eq), k2, 0.0, th.tau0);
  ed.p_residual = inf_norm(A2m * ed.p.cast<cplx>());
  ed.p_star_residual = inf_norm((ed.p_star.cast<cplx>() * A2m).transpose());

  const Eigen::Matrix2cd L2c = lin.L2.cast<cplx>();
  ed.M1 = 1.0 / ((ed.q_star * ed.q).value() + th.tau0 * e * (ed.q_star * L2c * ed.q).value());
  ed.M2 = 1.0 / ((ed.p_star * ed.p).value() + th.tau0 * (ed.p_star * lin.L2 * ed.p).value());

  const cplx iwt = I * th.omega0 * th.tau0;
  ed.pairing_11 = delay_pairing(ed.psi1(), iwt, ed.q, iwt, lin.L2, th.tau0);
  ed.pairing_1conj = delay_pairing(ed.psi1(), iwt, ed.q.conjugate(), -iwt, lin.L2, th.tau0);
  ed.pairing_22 =
      delay_pairing(ed.psi2().cast<cplx>(), 0.0, ed.p.cast<cplx>(), 0.0, lin.L2, th.tau0).real();

  // Closed-form expressions.
  const double km = k2 + p.alpha + ms;
  ed.q1_printed = compare_printed(ed.q(1), as / (I * g * th.omega0 + p.alpha + ms));
  ed.q2_printed = compare_printed(ed.q_star(0), (I * g * th.omega0 + p.alpha + ms) / (p.r * ms * e));
  ed.p1_printed = compare_printed(ed.p(1), -as / km);
  ed.p2_printed = compare_printed(ed.p_star(0), km / (p.r * ms));
  return ed;
}

DerivTable::Key make_key(std::initializer_list<Arg> args) {
  DerivTable::Key k;
  for (Arg a : args) k.push_back(static_cast<int>(a));
  return k;
}

Eigen::Vector2d DerivTable::lookup(Key key) const {
  std::sort(key.begin(), key.end());
  const auto it = entries_.find(key);
  return it == entries_.end() ? Eigen::Vector2d::Zero() : it->second;
}

Eigen::Vector2d DerivTable::operator()(Arg i, Arg j) const { return lookup(make_key({i, j})); }

Eigen::Vector2d DerivTable::operator()(Arg i, Arg j, Arg k) const {
  return lookup(make_key({i, j, k}));
}

void DerivTable::set(std::initializer_list<Arg> args, const Eigen::Vector2d& value) {
  Key key = make_key(args);
  std::sort(key.begin(), key.end());
  entries_[key] = value;
}

DerivTable deriv_table(const ModelParams& p, const Equilibrium& eq, double tau0) {
  const double ms = eq.m_star, s = 1.0 + ms;
  DerivTable dt;
  using A = Arg;
  dt.set({A::m, A::a_tau}, {tau0 * p.r, 0.0});
  dt.set({A::m, A::m_tau}, {tau0 / (s * s), 0.0});
  dt.set({A::m_tau, A::m_tau}, {-2.0 * tau0 * ms / (s * s * s), 0.0});
  dt.set({A::m, A::a}, {0.0, -tau0 / p.gamma});
  dt.set({A::m_tau, A::m_tau, A::m_tau}, {6.0 * tau0 * ms / (s * s * s * s), 0.0});
  dt.set({A::m, A::m_tau, A::m_tau}, {-2.0 * tau0 / (s * s * s), 0.0});
  return dt;
}

AppendixVectors appendix_vectors(const EigenData& ed, const DerivTable& dt) {
  using A = Arg;
  auto d2 = [&](A i, A j) -> Vec2c { return dt(i, j).cast<cplx>(); };
  auto d3 = [&](A i, A j, A k) -> Vec2c { return dt(i, j, k).cast<cplx>(); };

  const Vec2c mm = d2(A::m, A::m), ma = d2(A::m, A::a), mmt = d2(A::m, A::m_tau),
              mat = d2(A::m, A::a_tau), mta = d2(A::m_tau, A::a), aa = d2(A::a, A::a),
              aat = d2(A::a, A::a_tau), mtmt = d2(A::m_tau, A::m_tau),
              mtat = d2(A::m_tau, A::a_tau), atat = d2(A::a_tau, A::a_tau);
  const Vec2c mmm = d3(A::m, A::m, A::m), mma = d3(A::m, A::m, A::a),
              mmmt = d3(A::m, A::m, A::m_tau), maa = d3(A::m, A::a, A::a),
              mmat = d3(A::m, A::m, A::a_tau), mamt = d3(A::m, A::a, A::m_tau),
              maat = d3(A::m, A::a, A::a_tau), mmtmt = d3(A::m, A::m_tau, A::m_tau),
              mmtat = d3(A::m, A::m_tau, A::a_tau), matat = d3(A::m, A::a_tau, A::a_tau),
              aaa = d3(A::a, A::a, A::a), aamt = d3(A::a, A::a, A::m_tau),
              aaat = d3(A::a, A::a, A::a_tau), amtmt = d3(A::a, A::m_tau, A::m_tau),
              amtat = d3(A::a, A::m_tau, A::a_tau), aatat = d3(A::a, A::a_tau, A::a_tau),
              mtmtmt = d3(A::m_tau, A::m_tau, A::m_tau),
              mtmtat = d3(A::m_tau, A::m_tau, A::a_tau),
              mtatat = d3(A::m_tau, A::a_tau, A::a_tau),
              atatat = d3(A::a_tau, A::a_tau, A::a_tau);

  const cplx q = ed.q(1), qb = std::conj(q);
  const cplx p1 = ed.p(1);
  const double wt = ed.th.omega0 * ed.th.tau0;
  const cplx e = std::exp(-I * wt), ei = std::exp(I * wt), e2 = std::exp(-2.0 * I * wt);

  AppendixVectors v;
  v.F200 = mm + aa * q * q + mtmt * e2 + atat * q * q * e2 +
           2.0 * (ma * q + mmt * e + mat * q * e + mta * q * e + aat * q * q * e + mtat * q * e2);
  v.F110 = 2.0 * (mm + aa * q * qb + mtmt + atat * q * qb + ma * (q + qb) + mmt * (e + ei) +
                  mat * (q * e + qb * ei) + mta * (q * ei + qb * e) +
                  aat * q * qb * (e + ei) + mtat * (q + qb));
  v.F101 = 2.0 * (mm + aa * q * p1 + mtmt * e + atat * q * p1 * e + ma * (q + p1) +
                  mmt * (1.0 + e) + mat * (p1 + q * e) + mta * (q + p1 * e) +
                  aat * q * p1 * (1.0 + e) + mtat * (q + p1) * e);
  v.F002 = mm + aa * p1 * p1 + mtmt + atat * p1 * p1 +
           2.0 * (ma * p1 + mmt + mat * p1 + mta * p1 + aat * p1 * p1 + mtat * p1);
  v.F020 = v.F200.conjugate();
  v.F011 = v.F101.conjugate();

  v.F210 = 3.0 * (mmm + mma * (2.0 * q + qb) + mmmt * (2.0 * e + ei) +
                  maa * q * (2.0 * qb + q) + mmat * (2.0 * q * e + qb * ei) +
                  2.0 * mamt * (q * e + q * ei + qb * e) +
                  2.0 * maat * q * (q * e + qb * ei + qb * e) + mmtmt * (e2 + 2.0) +
                  2.0 * mmtat * (q + qb + q * e2) + matat * q * (2.0 * qb + q * e2) +
                  aaa * q * q * qb + aamt * q * (2.0 * qb * e + q * ei) +
                  aaat * q * q * qb * (2.0 * e + ei) + amtmt * (2.0 * q + qb * e2) +
                  2.0 * amtat * q * (qb + qb * e2 + q) + aatat * q * q * qb * (2.0 + e2) +
                  mtmtmt * e + mtmtat * (2.0 * q * e + qb * e) +
                  mtatat * q * e * (2.0 * qb + q) + atatat * q * q * qb * e);
  v.F102 = 3.0 * (mmm + mma * (q + 2.0 * p1) + mmmt * (e + 2.0) +
                  maa * p1 * (2.0 * q + p1) + mmat * (2.0 * p1 + q * e) +
                  2.0 * mamt * (q + p1 + p1 * e) + 2.0 * maat * p1 * (q + p1 + q * e) +
                  mmtmt * (2.0 * e + 1.0) + 2.0 * mmtat * (p1 + p1 * e + q * e) +
                  matat * p1 * (p1 + 2.0 * q * e) + aaa * q * p1 * p1 +
                  aamt * p1 * (2.0 * q + p1 * e) + aaat * q * p1 * p1 * (2.0 + e) +
                  amtmt * (q + 2.0 * p1 * e) + 2.0 * amtat * p1 * (q + q * e + p1 * e) +
                  aatat * q * p1 * p1 * (1.0 + 2.0 * e) + mtmtmt * e +
                  mtmtat * (q * e + 2.0 * p1 * e) + mtatat * p1 * e * (2.0 * q + p1) +
                  atatat * q * p1 * p1 * e);
  v.F111 = 6.0 * (mmm + mma * (q + qb + p1) + mmmt * (e + ei + 1.0) +
                  maa * (q * qb + q * p1 + p1 * qb) + mmat * (q * e + qb * ei + p1) +
                  mamt * (q * (1.0 + ei) + qb * (1.0 + e) + p1 * (ei + e)) +
                  maat * (q * p1 * (1.0 + e) + q * qb * (ei + e) + qb * p1 * (1.0 + ei)) +
                  mmtmt * (ei + e + 1.0) +
                  mmtat * (q * (1.0 + e) + qb * (1.0 + ei) + p1 * (ei + e)) +
                  matat * (q * qb + qb * p1 * ei + q * p1 * e) + aaa * q * qb * p1 +
                  aamt * (q * qb + qb * p1 * e + q * p1 * ei) +
                  aaat * q * qb * p1 * (1.0 + e + ei) + amtmt * (p1 + q * ei + qb * e) +
                  amtat * (q * qb * (ei + e) + q * p1 * (1.0 + ei) + qb * p1 * (1.0 + e)) +
                  aatat * q * qb * p1 * (1.0 + ei + e) + mtmtmt + mtmtat * (q + qb + p1) +
                  mtatat * (q * qb + q * p1 + qb * p1) + atatat * q * qb * p1);
  v.F003 = mmm + 3.0 * mmmt + 3.0 * mmtmt + mtmtmt + 3.0 * mma * p1 + 3.0 * mmat * p1 +
           6.0 * mamt * p1 + 6.0 * mmtat * p1 + 3.0 * mtmtat * p1 + 3.0 * amtmt * p1 +
           3.0 * maa * p1 * p1 + 6.0 * maat * p1 * p1 + 3.0 * matat * p1 * p1 +
           aaa * p1 * p1 * p1 + 3.0 * mtatat * p1 * p1 + 3.0 * aamt * p1 * p1 +
           3.0 * aaat * p1 * p1 * p1 + 6.0 * amtat * p1 * p1 + 3.0 * aatat * p1 * p1 * p1 +
           atatat * p1 * p1 * p1;

  v.Fy_z1[0][0] = 2.0 * (mm + ma * q + mmt * e + mat * q * e);
  v.Fy_z1[0][1] = 2.0 * (mmt + mta * q + mtmt * e + mtat * q * e);
  v.Fy_z1[1][0] = 2.0 * (ma + aa * q + mta * e + aat * q * e);
  v.Fy_z1[1][1] = 2.0 * (mat + aat * q + mtat * e + atat * q * e);
  v.Fy_z2[0][0] = 2.0 * (mm + mmt + ma * p1 + mat * p1);
  v.Fy_z2[0][1] = 2.0 * (mmt + mtmt + mtat * p1 + mta * p1);
  v.Fy_z2[1][0] = 2.0 * (ma + mta + aa * p1 + aat * p1);
  v.Fy_z2[1][1] = 2.0 * (mat + mtat + aat * p1 + atat * p1);
  return v;
}

namespace {

struct Projection {
  Eigen::RowVector2cd psi1;
  Eigen::RowVector2cd psi2;
  double s;  // 1/sqrt(l pi)
  cplx f11(const Vec2c& F) const { return s * (psi1 * F).value(); }
  cplx f12(const Vec2c& F) const { return s * (psi1.conjugate() * F).value(); }
  cplx f13(const Vec2c& F) const { return s * (psi2 * F).value(); }
};

template <typename Correction>
HComponent solve_h(const Mat2c& bracket, const Vec2c& F, double weight, cplx exponent,
                   Correction corr) {
  HComponent h;
  h.bracket = bracket;
  h.resolvent_weight = weight;
  h.resolvent_exponent = exponent;
  const double scale = bracket.cwiseAbs().maxCoeff();
  if (!(std::abs(bracket.determinant()) > 1e-12 * std::max(1.0, scale * scale)))
    throw NumericalError("non-resonance violated: singular resolvent bracket");
  h.resolvent_solution = bracket.partialPivLu().solve(F);
  h.solve_residual = inf_norm(bracket * h.resolvent_solution - F);
  h.at_zero = weight * h.resolvent_solution + corr(0.0);
  h.at_minus_one = weight * std::exp(-exponent) * h.resolvent_solution + corr(-1.0);
  return h;
}

// S_{y z}(h): sum over y_i(0), y_i(-1) of F_{y_i(theta) z} h_i(theta).
Vec2c apply_S(const std::array<std::array<Vec2c, 2>, 2>& Fy, const HComponent& h,
              bool conjugate_rows) {
  auto row = [&](int i, int s) { return conjugate_rows ? Vec2c(Fy[i][s].conjugate()) : Fy[i][s]; };
  return row(0, 0) * h.at_zero(0) + row(1, 0) * h.at_zero(1) + row(0, 1) * h.at_minus_one(0) +
         row(1, 1) * h.at_minus_one(1);
}

}  // namespace

HComponents h_components(const ModelParams& p, const Equilibrium& eq, const EigenData& ed,
                         const AppendixVectors& v) {
  ModelParams pd = p;
  pd.d = ed.th.d0;
  const Linearization lin = linearize(pd, eq);
  const double tau0 = ed.th.tau0;
  const double lp = p.l * M_PI, s = 1.0 / std::sqrt(lp);
  const double k2 = k2_of(p, ed.th.n2);
  const cplx iw = I * ed.th.omega0 * tau0;
  const Projection pr{ed.psi1(), ed.psi2().cast<cplx>(), s};

  auto L0 = [&](cplx z) -> Mat2c {
    return tau0 * (lin.L1.cast<cplx>() + std::exp(-z) * lin.L2.cast<cplx>());
  };
  const Mat2c Id = Mat2c::Identity();
  const Mat2c Dt = (tau0 * lin.diffusion).cast<cplx>();
  auto phi1 = [&](double th) -> Vec2c { return ed.q * std::exp(iw * th); };
  auto phi1b = [&](double th) -> Vec2c { return ed.q.conjugate() * std::exp(-iw * th); };
  const Vec2c phi2 = ed.p.cast<cplx>();

  HComponents hc;
  hc.h200_n1 = solve_h(2.0 * iw * Id - L0(2.0 * iw), v.F200, 1.0 / lp, 2.0 * iw, [&](double th) {
    return Vec2c(-(s / iw) * (pr.f11(v.F200) * phi1(th) + pr.f12(v.F200) / 3.0 * phi1b(th)));
  });
  hc.h110_n1 = solve_h(-L0(0.0), v.F110, 1.0 / lp, 0.0, [&](double th) {
    return Vec2c((s / iw) * (pr.f11(v.F110) * phi1(th) - pr.f12(v.F110) * phi1b(th)));
  });
  hc.h101_n2n1 = solve_h(iw * Id + k2 * Dt - L0(iw), v.F101, 1.0 / lp, iw, [&](double) {
    return Vec2c(-(s / iw) * pr.f13(v.F101) * phi2);
  });
  hc.h011_n1n2 = solve_h(-iw * Id + k2 * Dt - L0(-iw), v.F011, 1.0 / lp, -iw, [&](double) {
    return Vec2c((s / iw) * pr.f13(v.F011) * phi2);
  });
  hc.h002_n1 = solve_h(-L0(0.0), v.F002, 1.0 / lp, 0.0, [&](double th) {
    return Vec2c((s / iw) * (pr.f11(v.F002) * phi1(th) - pr.f12(v.F002) * phi1b(th)));
  });
  const HComponent& a = hc.h002_n1;
  hc.h002_n2 = solve_h(4.0 * k2 * Dt - L0(0.0), v.F002, 1.0 / (2.0 * lp), 0.0, [&](double th) {
    return Vec2c(th == 0.0 ? a.at_zero : a.at_minus_one);
  });
  return hc;
}

NFCoeffs nf_coeffs(const ModelParams& p, const Equilibrium& eq, const EigenData& ed,
                   const DerivTable& dt) {
  ModelParams pd = p;
  pd.d = ed.th.d0;
  const Linearization lin = linearize(pd, eq);
  const AppendixVectors v = appendix_vectors(ed, dt);
  const double tau0 = ed.th.tau0;
  const double lp = p.l * M_PI, s = 1.0 / std::sqrt(lp);
  const double k1 = k2_of(p, ed.th.n1), k2 = k2_of(p, ed.th.n2);
  const cplx iw = I * ed.th.omega0 * tau0;
  const Eigen::RowVector2cd psi1 = ed.psi1();
  const Eigen::RowVector2cd psi2 = ed.psi2().cast<cplx>();
  const Projection pr{psi1, psi2, s};
  const cplx e = std::exp(-iw);

  NFCoeffs nf;
  nf.omega_tau = ed.th.omega0 * tau0;
  nf.h = h_components(p, eq, ed, v);

  const Mat2c L1 = lin.L1.cast<cplx>(), L2 = lin.L2.cast<cplx>();
  const Mat2c Dm = lin.diffusion.cast<cplx>();
  Mat2c dD_dd = Mat2c::Zero();
  dD_dd(0, 0) = tau0;
  const Vec2c p2 = ed.p.cast<cplx>();
  nf.f11_11 = 2.0 * (psi1 * (-k1 * Dm * ed.q + L1 * ed.q + L2 * ed.q * e)).value();
  nf.f11_21 = 2.0 * (psi1 * (-k1 * dD_dd * ed.q)).value();
  const cplx f13_12 = 2.0 * (psi2 * (-k2 * Dm * p2 + L1 * p2 + L2 * p2)).value();
  const cplx f13_22 = 2.0 * (psi2 * (-k2 * dD_dd * p2)).value();
  nf.f13_12 = f13_12.real();
  nf.f13_22 = f13_22.real();
  nf.f13_12_imag = f13_12.imag();
  nf.f13_22_imag = f13_22.imag();

  auto& ft = nf.f_terms;
  ft["f11_200"] = pr.f11(v.F200);
  ft["f11_110"] = pr.f11(v.F110);
  ft["f11_020"] = pr.f11(v.F020);
  ft["f11_002"] = pr.f11(v.F002);
  ft["f11_101"] = pr.f11(v.F101);
  ft["f12_200"] = pr.f12(v.F200);
  ft["f12_110"] = pr.f12(v.F110);
  ft["f12_002"] = pr.f12(v.F002);
  ft["f13_101"] = pr.f13(v.F101);
  ft["f13_011"] = pr.f13(v.F011);
  ft["f13_110"] = pr.f13(v.F110);
  ft["f13_002"] = pr.f13(v.F002);
  ft["f11_210"] = (psi1 * v.F210).value() / lp;
  ft["f11_102"] = (psi1 * v.F102).value() / lp;
  ft["f13_111"] = (psi2 * v.F111).value() / lp;
  ft["f13_003"] = (psi2 * v.F003).value() * 1.5 / lp;

  const cplx k = 3.0 / (2.0 * iw);
  const HComponents& h = nf.h;
  nf.g11_210 = ft["f11_210"] +
               k * (-ft["f11_110"] * ft["f11_200"] + ft["f11_110"] * ft["f12_110"] +
                    (2.0 / 3.0) * ft["f11_020"] * ft["f12_200"]) +
               1.5 * (psi1 * (apply_S(v.Fy_z1, h.h110_n1, false) +
                              apply_S(v.Fy_z1, h.h200_n1, true)))
                         .value();
  nf.g11_102 = ft["f11_102"] +
               k * (-2.0 * ft["f11_002"] * ft["f11_200"] + ft["f12_002"] * ft["f11_110"] +
                    2.0 * ft["f11_002"] * ft["f13_101"]) +
               1.5 * (psi1 * (apply_S(v.Fy_z1, h.h002_n1, false) +
                              apply_S(v.Fy_z2, h.h101_n2n1, false)))
                         .value();
  const cplx g111 = ft["f13_111"] +
                    k * (-ft["f13_101"] * ft["f11_110"] + ft["f13_011"] * ft["f12_110"]) +
                    1.5 * (psi2 * (apply_S(v.Fy_z1, h.h011_n1n2, false) +
                                   apply_S(v.Fy_z1, h.h101_n2n1, true) +
                                   apply_S(v.Fy_z2, h.h110_n1, false)))
                              .value();
  const cplx g003 = ft["f13_003"] +
                    k * (-ft["f11_002"] * ft["f13_101"] + ft["f12_002"] * ft["f13_011"]) +
                    1.5 * (psi2 * apply_S(v.Fy_z2, h.h002_n2, false)).value();
  nf.g13_111 = g111.real();
  nf.g13_111_imag = g111.imag();
  nf.g13_003 = g003.real();
  nf.g13_003_imag = g003.imag();
  return nf;
}

AmplitudeSystem amplitude_system(const NFCoeffs& nf, const THPoint& th) {
  const double tol = default_settings().degeneracy_tol;
  const double re210 = nf.g11_210.real();
  if (std::abs(re210) <= tol || std::abs(nf.g13_003) <= tol)
    throw NumericalError("degenerate normal form: Re g210 or g003 vanishes");
  AmplitudeSystem as;
  as.th = th;
  as.epsilon = re210 > 0.0 ? 1.0 : -1.0;
  as.eps1_tau = 0.5 * as.epsilon * nf.f11_11.real();
  as.eps1_d = 0.5 * as.epsilon * nf.f11_21.real();
  as.eps2_tau = 0.5 * as.epsilon * nf.f13_12;
  as.eps2_d = 0.5 * as.epsilon * nf.f13_22;
  as.b = as.epsilon * nf.g11_102.real() / std::abs(nf.g13_003);
  as.c = as.epsilon * nf.g13_111 / std::abs(re210);
  as.d_hat = as.epsilon * nf.g13_003 / std::abs(nf.g13_003);
  as.d_hat_minus_bc = as.d_hat - as.b * as.c;
  if (std::abs(as.d_hat_minus_bc) <= tol)
    throw NumericalError("degenerate normal form: d_hat - b c vanishes");
  return as;
}

NormalFormReport compute_normal_form(const ModelParams& p) {
  NormalFormReport rep;
  rep.params = p;
  ModelParams check = p;
  if (!(check.d > 0.0)) check.d = 1.0;
  check.tau = 0.0;
  check.validate();
  rep.eq = positive_equilibrium(p);
  rep.th = turing_hopf_point(p, rep.eq, p.l);
  rep.params.d = rep.th.d0;
  rep.params.tau = rep.th.tau0;
  rep.eigen = eigen_data(rep.params, rep.eq, rep.th);
  rep.derivs = deriv_table(rep.params, rep.eq, rep.th.tau0);
  rep.vectors = appendix_vectors(rep.eigen, rep.derivs);
  rep.coeffs = nf_coeffs(rep.params, rep.eq, rep.eigen, rep.derivs);
  rep.amplitude = amplitude_system(rep.coeffs, rep.th);
  return rep;
}

}  // namespace mussel
