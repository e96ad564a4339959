// mussel-th: command-line front end for the mussel-algae Turing-Hopf toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "mussel/amplitude.hpp"
#include "mussel/config.hpp"
#include "mussel/errors.hpp"
#include "mussel/normal_form.hpp"
#include "mussel/pde_sim.hpp"
#include "mussel/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mussel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitNumerical = 4;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

template <typename Vec>
json vjson(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<typename Vec::Scalar, cplx>) out.push_back(cjson(v(i)));
    else out.push_back(v(i));
  }
  return out;
}

struct Context {
  std::string command;
  fs::path out_dir;
  RunConfig cfg;
  json resolved;

  std::ofstream open(const std::string& name) const {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / name);
    if (!os) throw ValidationError("cannot open output file " + (out_dir / name).string());
    return os;
  }

  void write_json(const std::string& name, json body) const {
    body["config"] = resolved;
    body["command"] = command;
    open(name) << body.dump(2) << "\n";
  }

  // CSV outputs start with one comment line carrying the resolved config.
  std::ofstream open_csv(const std::string& name) const {
    std::ofstream os = open(name);
    os << "# config: " << resolved.dump() << "\n";
    return os;
  }
};

ModelParams with_th_defaults(const RunConfig& c, const Equilibrium& eq, THPoint* th_out) {
  ModelParams p = c.model;
  if (!c.d_given || !c.tau_given) {
    const THPoint th = turing_hopf_point(p, eq, p.l);
    if (!c.d_given) p.d = th.d0;
    if (!c.tau_given) p.tau = th.tau0;
    if (th_out) *th_out = th;
  }
  return p;
}

void cmd_analyze(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const HypothesisReport hr = hypotheses(c.model);
  json body;
  body["hypotheses"] = {{"H1", hr.h1_holds},
                        {"H2", hr.h2_holds},
                        {"H2_defined", hr.h2_defined},
                        {"H0", hr.H0_value},
                        {"P0", std::isfinite(hr.P0_value) ? json(hr.P0_value) : json()},
                        {"diagnostic", hr.diagnostic}};
  const Equilibrium eq = positive_equilibrium(c.model, c.numerics);
  body["equilibrium"] = {{"m_star", eq.m_star}, {"a_star", eq.a_star}};
  if (c.d_given) {
    const GammaMembership g = gamma_membership(c.model, eq, c.numerics);
    body["turing_stable_region"] = {
        {"member", g.member}, {"marginal", g.marginal}, {"vertex_value", g.vertex_value}};
  }
  ctx.write_json("analyze.json", body);
  std::cout << "m* = " << fmt("%.6f", eq.m_star) << ", a* = " << fmt("%.6f", eq.a_star)
            << "; H1 " << (hr.h1_holds ? "holds" : "fails") << ", H2 "
            << (hr.h2_holds ? "holds" : "fails") << "\n";
}

void cmd_hopf(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  require_hypotheses(c.model);
  const Equilibrium eq = positive_equilibrium(c.model, c.numerics);
  const ModelParams p = with_th_defaults(c, eq, nullptr);
  std::ofstream os = ctx.open_csv("hopf.csv");
  os << "# d: " << fmt("%.12g", p.d) << "\n";
  os << "n,omega,j,tau\n";
  int rows = 0;
  for (int n = 0; n <= c.hopf.n_max; ++n) {
    if (!hopf_frequency(p, eq, n)) break;
    const HopfBranch br = hopf_branch(p, eq, n, c.hopf.j_max);
    for (std::size_t j = 0; j < br.taus.size(); ++j) {
      os << n << "," << fmt("%.12g", br.omega) << "," << j << "," << fmt("%.12g", br.taus[j])
         << "\n";
      ++rows;
    }
  }
  std::cout << "hopf.csv: " << rows << " critical delays\n";
}

void cmd_turing(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  std::ofstream os = ctx.open_csv("turing.csv");
  os << "alpha,r,d0,n2,k2_star,d_marginal,valid\n";
  const TuringOptions& t = c.turing;
  for (int i = 0; i < t.alpha_steps; ++i) {
    ModelParams p = c.model;
    p.alpha = t.alpha_steps == 1
                  ? t.alpha_min
                  : t.alpha_min + (t.alpha_max - t.alpha_min) * i / (t.alpha_steps - 1);
    const HypothesisReport hr = hypotheses(p);
    os << fmt("%.10g", p.alpha) << "," << fmt("%.10g", p.r) << ",";
    if (!hr.h1_holds || !hr.h2_holds) {
      os << ",,,,0\n";
      continue;
    }
    const Equilibrium eq = positive_equilibrium(p, c.numerics);
    const TuringThreshold tt = turing_threshold(p, eq, p.l);
    os << fmt("%.12g", tt.d0) << "," << tt.n2 << "," << fmt("%.12g", tt.k2_star) << ","
       << fmt("%.12g", tt.d_marginal) << ",1\n";
  }
  std::cout << "turing.csv: " << t.alpha_steps << " rows\n";
}

json th_json(const THPoint& th) {
  return {{"tau0", th.tau0},     {"d0", th.d0}, {"n1", th.n1}, {"n2", th.n2},
          {"omega0", th.omega0}, {"d_marginal", th.d_marginal}};
}

void cmd_th_point(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Equilibrium eq = positive_equilibrium(c.model, c.numerics);
  const THPoint th = turing_hopf_point(c.model, eq, c.model.l);
  ctx.write_json("th_point.json", {{"th_point", th_json(th)}});
  std::cout << "tau0 = " << fmt("%.6f", th.tau0) << ", d0 = " << fmt("%.7f", th.d0)
            << ", n1 = " << th.n1 << ", n2 = " << th.n2 << "\n";
}

json lines_json(const BifurcationLines& bl) {
  json out;
  for (const BifurcationLine* l : {&bl.L1, &bl.L2, &bl.T1, &bl.T2}) {
    out[l->name] = {{"a_tau", l->a_tau},
                    {"a_d", l->a_d},
                    {"slope", l->vertical() ? json() : json(l->slope())},
                    {"vertical", l->vertical()}};
  }
  return out;
}

json h_json(const HComponent& h) {
  return {{"at_zero", vjson(h.at_zero)},
          {"at_minus_one", vjson(h.at_minus_one)},
          {"solve_residual", h.solve_residual}};
}

void cmd_normal_form(const Context& ctx) {
  const NormalFormReport r = compute_normal_form(ctx.cfg.model);
  const EigenData& e = r.eigen;
  const NFCoeffs& nf = r.coeffs;
  const AmplitudeSystem& as = r.amplitude;
  auto printed = [](const PrintedFormMatch& m) {
    return json{{"relation", to_string(m.kind)}, {"ratio", cjson(m.ratio)}};
  };
  json body;
  body["th_point"] = th_json(r.th);
  body["equilibrium"] = {{"m_star", r.eq.m_star}, {"a_star", r.eq.a_star}};
  body["eigen"] = {
      {"source", "null-space solve of the characteristic matrix"},
      {"q", vjson(e.q)},
      {"q_star", vjson(e.q_star)},
      {"p", vjson(e.p)},
      {"p_star", vjson(e.p_star)},
      {"M1", cjson(e.M1)},
      {"M2", e.M2},
      {"residuals",
       {{"q", e.q_residual},
        {"q_star", e.q_star_residual},
        {"p_at_d_marginal", e.p_residual},
        {"p_star_at_d_marginal", e.p_star_residual},
        {"p_at_d0", e.p_residual_at_d0}}},
      {"pairings_by_quadrature",
       {{"psi1_phi1", cjson(e.pairing_11)},
        {"psi1_conj_phi1", cjson(e.pairing_1conj)},
        {"psi2_phi2", e.pairing_22}}},
      {"printed_forms",
       {{"q1", printed(e.q1_printed)},
        {"q2", printed(e.q2_printed)},
        {"p1", printed(e.p1_printed)},
        {"p2", printed(e.p2_printed)}}}};
  json derivs = json::array();
  static const char* names[] = {"m", "a", "m_tau", "a_tau"};
  for (const auto& [key, value] : r.derivs.entries()) {
    std::string label;
    for (int k : key) label += std::string(label.empty() ? "" : ",") + names[k];
    derivs.push_back({{"args", label}, {"value", vjson(value)}});
  }
  body["derivatives"] = {{"source", "closed form of the nonlinearity, scaled by tau0"},
                         {"entries", derivs}};
  json fterms;
  for (const auto& [k, v] : nf.f_terms) fterms[k] = cjson(v);
  body["coefficients"] = {
      {"source", "projection formulas with centre-manifold corrections"},
      {"f11_11", cjson(nf.f11_11)},
      {"f11_21", cjson(nf.f11_21)},
      {"f13_12", nf.f13_12},
      {"f13_22", nf.f13_22},
      {"g11_210", cjson(nf.g11_210)},
      {"g11_102", cjson(nf.g11_102)},
      {"g13_111", nf.g13_111},
      {"g13_003", nf.g13_003},
      {"imaginary_residue",
       {{"f13_12", nf.f13_12_imag},
        {"f13_22", nf.f13_22_imag},
        {"g13_111", nf.g13_111_imag},
        {"g13_003", nf.g13_003_imag}}},
      {"projected_terms", fterms},
      {"h_components",
       {{"h200_n1", h_json(nf.h.h200_n1)},
        {"h110_n1", h_json(nf.h.h110_n1)},
        {"h101_n2n1", h_json(nf.h.h101_n2n1)},
        {"h011_n1n2", h_json(nf.h.h011_n1n2)},
        {"h002_n1", h_json(nf.h.h002_n1)},
        {"h002_n2", h_json(nf.h.h002_n2)}}}};
  const UnfoldingCase uc = unfolding_case(as);
  body["amplitude"] = {{"epsilon", as.epsilon},
                       {"d_hat", as.d_hat},
                       {"b", as.b},
                       {"c", as.c},
                       {"d_hat_minus_bc", as.d_hat_minus_bc},
                       {"eps1_map", {as.eps1_tau, as.eps1_d}},
                       {"eps2_map", {as.eps2_tau, as.eps2_d}},
                       {"unfolding_case", uc.label},
                       {"lines", lines_json(bifurcation_lines(as))}};
  ctx.write_json("normal_form.json", body);
  std::cout << "epsilon = " << as.epsilon << ", d_hat = " << as.d_hat
            << ", b = " << fmt("%.6f", as.b) << ", c = " << fmt("%.6f", as.c)
            << ", d_hat - bc = " << fmt("%.6f", as.d_hat_minus_bc) << " (" << uc.label << ")\n";
}

void cmd_classify(const Context& ctx) {
  const NormalFormReport r = compute_normal_form(ctx.cfg.model);
  const ClassifyOptions& k = ctx.cfg.classify;
  const RegionResult res = classify_region(r.amplitude, k.tau_eps, k.d_eps);
  const std::string label =
      res.region == Region::Origin ? "origin / Turing–Hopf point" : to_string(res.region);
  ctx.write_json("classify.json", {{"tau_eps", k.tau_eps},
                                   {"d_eps", k.d_eps},
                                   {"region", label},
                                   {"unfolding_case", res.unfolding.label},
                                   {"signature", res.signature},
                                   {"eps1", res.equilibria.eps1},
                                   {"eps2", res.equilibria.eps2}});
  std::cout << label << "\n";
}

void cmd_sweep(const Context& ctx) {
  const NormalFormReport r = compute_normal_form(ctx.cfg.model);
  const SweepOptions& s = ctx.cfg.sweep;
  auto axis = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  const std::size_t total = std::size_t(s.tau_eps_steps) * s.d_eps_steps;
  std::vector<std::string> labels(total);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<std::size_t>(s.threads > 0 ? s.threads : hw, total);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t idx = w; idx < total; idx += workers) {
          const int i = static_cast<int>(idx / s.d_eps_steps);
          const int j = static_cast<int>(idx % s.d_eps_steps);
          const double te = axis(s.tau_eps_min, s.tau_eps_max, s.tau_eps_steps, i);
          const double de = axis(s.d_eps_min, s.d_eps_max, s.d_eps_steps, j);
          labels[idx] = to_string(classify_region(r.amplitude, te, de).region);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ofstream os = ctx.open_csv("sweep.csv");
  os << "tau_eps,d_eps,region\n";
  for (std::size_t idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / s.d_eps_steps);
    const int j = static_cast<int>(idx % s.d_eps_steps);
    os << fmt("%.10g", axis(s.tau_eps_min, s.tau_eps_max, s.tau_eps_steps, i)) << ","
       << fmt("%.10g", axis(s.d_eps_min, s.d_eps_max, s.d_eps_steps, j)) << "," << labels[idx]
       << "\n";
  }
  std::cout << "sweep.csv: " << total << " points\n";
}

void cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SimulateOptions& so = c.simulate;
  ModelParams p = c.model;
  json prediction;
  if (so.offset) {
    const NormalFormReport r = compute_normal_form(c.model);
    p.tau = r.th.tau0 + so.offset->first;
    p.d = r.th.d0 + so.offset->second;
    if (so.offset->first != 0.0 || so.offset->second != 0.0) {
      const RegionResult res = classify_region(r.amplitude, so.offset->first, so.offset->second);
      prediction = {{"region", to_string(res.region)}, {"signature", res.signature}};
    }
  } else if (!c.d_given || !c.tau_given) {
    throw ValidationError("config.simulate: needs either simulate.offset or model.d and model.tau");
  }
  const FieldTrajectory tr = simulate(p, so.ic, so.sim);
  const PatternClass pc = classify_pattern(tr, so.sim);
  const WellposednessReport& w = tr.monitors;
  {
    std::ofstream os = ctx.open_csv("trajectory.csv");
    write_trajectory_csv(os, tr, so.csv_stride);
  }
  json body = {
      {"tau", p.tau},
      {"d", p.d},
      {"dt", tr.dt},
      {"steps_per_delay", tr.steps_per_delay},
      {"final_time", tr.times.empty() ? 0.0 : tr.times.back()},
      {"aborted", tr.aborted},
      {"abort_reason", tr.abort_reason},
      {"pattern", to_string(pc.pattern)},
      {"dominant_mode", pc.dominant_mode},
      {"oscillation_amplitude", pc.oscillation_amplitude},
      {"spatial_measure", pc.spatial_measure},
      {"temporal_measure", pc.temporal_measure},
      {"classifier_note", pc.note},
      {"final_sup_deviation", tr.sup_deviation.empty() ? 0.0 : tr.sup_deviation.back()},
      {"monitors",
       {{"min_m", w.min_m},
        {"min_a", w.min_a},
        {"max_a", w.max_a},
        {"a_bound", w.a_bound},
        {"positivity_violation", w.positivity_violation},
        {"bound_violation", w.bound_violation},
        {"ok", w.ok}}}};
  if (!prediction.is_null()) body["amplitude_prediction"] = prediction;
  ctx.write_json("summary.json", body);
  std::cout << to_string(pc.pattern);
  if (pc.dominant_mode > 0) std::cout << " (mode " << pc.dominant_mode << ")";
  std::cout << "\n";
}

void append_log(const fs::path& dir, const std::string& command, int code,
                const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream log(dir / "run.log", std::ios::app);
  if (!log) return;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << stamp << " " << command << " exit=" << code;
  if (!message.empty()) log << " " << message;
  log << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  // Dotted long options (--model.r 1.2, --simulate.horizon=5000) are config
  // overrides; everything else goes to the regular parser.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> rest;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--", 0) == 0 && a.find('.', 2) != std::string::npos &&
        !std::isdigit(static_cast<unsigned char>(a[2]))) {
      const std::size_t eq = a.find('=');
      if (eq != std::string::npos) {
        overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
      } else if (i + 1 < argc) {
        overrides.emplace_back(a.substr(2), argv[++i]);
      } else {
        std::cerr << "error: override " << a << " needs a value\n";
        return kExitValidation;
      }
    } else {
      rest.push_back(a);
    }
  }

  CLI::App app{"Turing-Hopf analysis and simulation of the delayed mussel-algae model", "mussel-th"};
  std::string command, config_path, out_dir = "mussel-out";
  std::optional<double> tau_eps, d_eps;
  app.add_option("command", command,
                 "analyze | hopf | turing | th-point | normal-form | classify | sweep | simulate")
      ->required()
      ->check(CLI::IsMember({"analyze", "hopf", "turing", "th-point", "normal-form", "classify",
                             "sweep", "simulate"}));
  app.add_option("--config", config_path, "JSON config (default: built-in reference parameter set)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tau-eps", tau_eps, "classify: tau offset from the Turing-Hopf point");
  app.add_option("--d-eps", d_eps, "classify: diffusion offset from the Turing-Hopf point");
  app.footer("Config keys can be overridden as --section.key value, e.g. --model.r 1.2");

  std::vector<std::string> reversed(rest.rbegin(), rest.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  int code = kExitOk;
  std::string message;
  try {
    json doc;
    if (config_path.empty()) {
      doc = default_config_json();
    } else {
      std::ifstream in(config_path);
      if (!in) throw ValidationError("config: cannot read " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON (") + e.what() + ")");
      }
    }
    if (tau_eps) overrides.emplace_back("classify.tau_eps", fmt("%.17g", *tau_eps));
    if (d_eps) overrides.emplace_back("classify.d_eps", fmt("%.17g", *d_eps));
    apply_overrides(doc, overrides);

    Context ctx;
    ctx.command = command;
    ctx.out_dir = out_dir;
    ctx.cfg = parse_config(doc);
    ctx.resolved = to_json(ctx.cfg);

    if (command == "analyze") cmd_analyze(ctx);
    else if (command == "hopf") cmd_hopf(ctx);
    else if (command == "turing") cmd_turing(ctx);
    else if (command == "th-point") cmd_th_point(ctx);
    else if (command == "normal-form") cmd_normal_form(ctx);
    else if (command == "classify") cmd_classify(ctx);
    else if (command == "sweep") cmd_sweep(ctx);
    else if (command == "simulate") cmd_simulate(ctx);
  } catch (const ValidationError& e) {
    code = kExitValidation;
    message = e.what();
  } catch (const DomainError& e) {
    code = kExitValidation;
    message = e.what();
  } catch (const HypothesisError& e) {
    code = kExitHypothesis;
    message = e.what();
  } catch (const std::exception& e) {
    code = kExitNumerical;
    message = e.what();
  }
  if (code != kExitOk) std::cerr << "error: " << message << "\n";
  append_log(out_dir, command, code, message);
  return code;
}
