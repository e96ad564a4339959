#include "mussel/model.hpp"

#include <cmath>
#include <sstream>

#include "mussel/errors.hpp"

namespace mussel {

void ModelParams::validate() const {
  auto need_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "parameter " << name << " must be positive and finite (got " << v << ")";
      throw DomainError(os.str());
    }
  };
  need_positive(r, "r");
  need_positive(gamma, "gamma");
  need_positive(alpha, "alpha");
  need_positive(d, "d");
  need_positive(l, "l");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("parameter tau must be >= 0");
}

Nondimensionalized nondimensionalize(const DimensionalParams& dp, double tau_dimensional,
                                     double domain_length) {
  const std::pair<double, const char*> fields[] = {
      {dp.e, "e"},     {dp.c, "c"},       {dp.d_M, "d_M"},
      {dp.k_M, "k_M"}, {dp.f, "f"},       {dp.H, "H"},
      {dp.A_up, "A_up"}, {dp.D_M, "D_M"}, {dp.D_A, "D_A"},
      {domain_length, "domain_length"}};
  for (const auto& [v, name] : fields) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError(std::string("dimensional parameter ") + name + " must be positive");
  }
  if (!(tau_dimensional >= 0.0)) throw DomainError("tau_dimensional must be >= 0");

  const double omega = dp.c * dp.k_M / dp.H;
  const double length_scale = std::sqrt(dp.D_A / omega);

  Nondimensionalized out;
  ModelParams& p = out.params;
  p.r = dp.e * dp.c * dp.A_up / dp.d_M;
  p.gamma = dp.d_M / omega;
  p.alpha = dp.f / omega;
  p.d = dp.D_M / (p.gamma * dp.D_A);
  p.tau = dp.d_M * tau_dimensional;
  p.l = domain_length / length_scale / M_PI;

  out.scales = {{"m_scale", dp.k_M},
                {"a_scale", dp.A_up},
                {"time_scale", 1.0 / dp.d_M},
                {"length_scale", length_scale},
                {"omega", omega}};
  return out;
}

bool h1_holds(const ModelParams& p) {
  return p.alpha > 0.0 && p.alpha < 1.0 && p.r > 1.0 && p.alpha * p.r < 1.0;
}

HypothesisReport hypotheses(const ModelParams& p) {
  HypothesisReport rep;
  rep.h1_holds = h1_holds(p);
  rep.H0_value = (1.0 - p.alpha * p.r) / (1.0 - p.alpha);
  if (p.r == 1.0 || !(p.gamma > 0.0)) {
    rep.h2_defined = false;
    rep.h2_holds = false;
    rep.P0_value = std::nan("");
    rep.diagnostic = "P0 = r(1-alpha)/(gamma(r-1)) is singular at r = 1; (H2) undefined";
    return rep;
  }
  rep.P0_value = p.r * (1.0 - p.alpha) / (p.gamma * (p.r - 1.0));
  rep.h2_holds = rep.H0_value * rep.H0_value < rep.P0_value;
  if (!rep.h1_holds) rep.diagnostic = "(H1) violated: need 0 < alpha < 1 < r < 1/alpha";
  else if (!rep.h2_holds) rep.diagnostic = "(H2) violated: H0^2 >= P0";
  return rep;
}

void require_hypotheses(const ModelParams& p) {
  const auto rep = hypotheses(p);
  if (!rep.h1_holds || !rep.h2_holds) {
    throw HypothesisError(rep.diagnostic.empty() ? "hypothesis gate failed" : rep.diagnostic);
  }
}

Equilibrium positive_equilibrium(const ModelParams& p, const NumericalSettings& s) {
  if (std::abs(1.0 - p.alpha * p.r) < s.degeneracy_tol)
    throw DomainError("|1 - alpha r| is below the degeneracy tolerance; m* diverges");
  if (!h1_holds(p))
    throw HypothesisError("(H1) violated: no positive equilibrium (need 0 < alpha < 1 < r < 1/alpha)");
  const double one_minus = 1.0 - p.alpha * p.r;
  return {p.alpha * (p.r - 1.0) / one_minus, one_minus / (p.r * (1.0 - p.alpha))};
}

Reaction reaction(const ModelParams& p, double m, double a, double m_tau, double a_tau) {
  return {m * (p.r * a_tau - 1.0 / (1.0 + m_tau)), p.alpha * (1.0 - a) - m * a};
}

}  // namespace mussel
