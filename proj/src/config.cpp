#include "mussel/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mussel/errors.hpp"

namespace mussel {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

// Reads the fields of one JSON object, rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) fail(path_ + "." + key, "unknown key");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(path_ + "." + key, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path_ + "." + key, "must be finite");
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
    out = v.get<int>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(path_ + "." + key, "expected true or false");
    out = v.get<bool>();
  }

  void object(const std::string& key, const std::function<void(Reader&)>& body) {
    if (!has(key)) return;
    Reader sub(j_.at(key), path_ + "." + key);
    body(sub);
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_positive(const std::string& path, double v) {
  if (!(v > 0.0)) fail(path, "must be positive");
}

void require_at_least(const std::string& path, int v, int lo) {
  if (v < lo) fail(path, "must be at least " + std::to_string(lo));
}

}  // namespace

json default_config_json() {
  return json{{"model", {{"r", 1.1}, {"gamma", 4.0}, {"alpha", 0.654}, {"l", 6.0}}}};
}

void apply_overrides(json& j, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, text] : kv) {
    if (key.empty()) throw ValidationError("override: empty key");
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
      if (part.empty()) throw ValidationError("override " + key + ": empty path component");
      if (!node->is_object()) throw ValidationError("override " + key + ": parent is not an object");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      if (!node->contains(part) || (*node)[part].is_null()) (*node)[part] = json::object();
      node = &(*node)[part];
      start = dot + 1;
    }
  }
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader root(j, "config");
  if (!root.has("model")) fail("config.model", "required");

  root.object("model", [&](Reader& m) {
    if (m.has("dimensional")) {
      for (const char* k : {"r", "gamma", "alpha", "l"})
        if (m.has(k)) fail(m.path(k), "not allowed together with model.dimensional");
      m.object("dimensional", [&](Reader& dm) {
        DimensionalParams dp;
        const std::pair<const char*, double*> fields[] = {
            {"e", &dp.e},     {"c", &dp.c},       {"d_M", &dp.d_M},
            {"k_M", &dp.k_M}, {"f", &dp.f},       {"H", &dp.H},
            {"A_up", &dp.A_up}, {"D_M", &dp.D_M}, {"D_A", &dp.D_A},
            {"tau_dimensional", &c.tau_dimensional}, {"domain_length", &c.domain_length}};
        for (const auto& [k, ptr] : fields) {
          if (!dm.has(k)) fail(dm.path(k), "required");
          dm.number(k, *ptr);
        }
        for (const auto& [k, ptr] : fields) {
          if (std::string(k) == "tau_dimensional") {
            if (*ptr < 0.0) fail(dm.path(k), "must be >= 0");
          } else {
            require_positive(dm.path(k), *ptr);
          }
        }
        c.dimensional = dp;
      });
      const Nondimensionalized nd =
          nondimensionalize(*c.dimensional, c.tau_dimensional, c.domain_length);
      c.model = nd.params;
      c.d_given = true;
      c.tau_given = true;
    } else {
      for (const char* k : {"r", "gamma", "alpha", "l"})
        if (!m.has(k)) fail(m.path(k), "required");
      m.number("r", c.model.r);
      m.number("gamma", c.model.gamma);
      m.number("alpha", c.model.alpha);
      m.number("l", c.model.l);
      for (const char* k : {"r", "gamma", "alpha", "l"}) {
        const double v = std::string(k) == "r"       ? c.model.r
                         : std::string(k) == "gamma" ? c.model.gamma
                         : std::string(k) == "alpha" ? c.model.alpha
                                                     : c.model.l;
        require_positive(m.path(k), v);
      }
      c.d_given = m.has("d");
      c.tau_given = m.has("tau");
      m.number("d", c.model.d);
      m.number("tau", c.model.tau);
      if (c.d_given) require_positive(m.path("d"), c.model.d);
      if (c.tau_given && c.model.tau < 0.0) fail(m.path("tau"), "must be >= 0");
    }
  });

  root.object("hopf", [&](Reader& h) {
    h.integer("j_max", c.hopf.j_max);
    h.integer("n_max", c.hopf.n_max);
    require_at_least(h.path("j_max"), c.hopf.j_max, 0);
    require_at_least(h.path("n_max"), c.hopf.n_max, 0);
  });

  root.object("turing", [&](Reader& t) {
    t.number("alpha_min", c.turing.alpha_min);
    t.number("alpha_max", c.turing.alpha_max);
    t.integer("alpha_steps", c.turing.alpha_steps);
    require_positive(t.path("alpha_min"), c.turing.alpha_min);
    if (!(c.turing.alpha_max >= c.turing.alpha_min))
      fail(t.path("alpha_max"), "must be >= alpha_min");
    require_at_least(t.path("alpha_steps"), c.turing.alpha_steps, 1);
  });

  root.object("classify", [&](Reader& k) {
    k.number("tau_eps", c.classify.tau_eps);
    k.number("d_eps", c.classify.d_eps);
  });

  root.object("sweep", [&](Reader& s) {
    SweepOptions& o = c.sweep;
    s.number("tau_eps_min", o.tau_eps_min);
    s.number("tau_eps_max", o.tau_eps_max);
    s.integer("tau_eps_steps", o.tau_eps_steps);
    s.number("d_eps_min", o.d_eps_min);
    s.number("d_eps_max", o.d_eps_max);
    s.integer("d_eps_steps", o.d_eps_steps);
    s.integer("threads", o.threads);
    if (!(o.tau_eps_max >= o.tau_eps_min)) fail(s.path("tau_eps_max"), "must be >= tau_eps_min");
    if (!(o.d_eps_max >= o.d_eps_min)) fail(s.path("d_eps_max"), "must be >= d_eps_min");
    require_at_least(s.path("tau_eps_steps"), o.tau_eps_steps, 1);
    require_at_least(s.path("d_eps_steps"), o.d_eps_steps, 1);
    require_at_least(s.path("threads"), o.threads, 0);
  });

  root.object("simulate", [&](Reader& s) {
    SimulateOptions& o = c.simulate;
    SimConfig& sc = o.sim;
    s.integer("grid_points", sc.grid_points);
    s.number("horizon", sc.horizon);
    s.number("snapshot_interval", sc.snapshot_interval);
    s.number("transient_fraction", sc.transient_fraction);
    s.number("spatial_tol", sc.spatial_tol);
    s.number("temporal_tol", sc.temporal_tol);
    s.number("drift_tol", sc.drift_tol);
    s.number("dt_request", sc.dt_request);
    s.boolean("enforce_stability_bound", sc.enforce_stability_bound);
    s.boolean("abort_on_violation", sc.abort_on_violation);
    s.integer("csv_stride", o.csv_stride);
    require_at_least(s.path("grid_points"), sc.grid_points, 4);
    require_positive(s.path("horizon"), sc.horizon);
    require_positive(s.path("snapshot_interval"), sc.snapshot_interval);
    if (!(sc.transient_fraction >= 0.0 && sc.transient_fraction < 1.0))
      fail(s.path("transient_fraction"), "must lie in [0, 1)");
    require_positive(s.path("spatial_tol"), sc.spatial_tol);
    require_positive(s.path("temporal_tol"), sc.temporal_tol);
    require_positive(s.path("drift_tol"), sc.drift_tol);
    if (sc.dt_request < 0.0) fail(s.path("dt_request"), "must be >= 0");
    require_at_least(s.path("csv_stride"), o.csv_stride, 1);
    s.object("offset", [&](Reader& off) {
      std::pair<double, double> v{0.0, 0.0};
      off.number("tau_eps", v.first);
      off.number("d_eps", v.second);
      o.offset = v;
    });
    s.object("initial", [&](Reader& ic) {
      ic.number("c0_m", o.ic.c0_m);
      ic.number("c1_m", o.ic.c1_m);
      ic.number("k_m", o.ic.k_m);
      ic.number("c0_a", o.ic.c0_a);
      ic.number("c1_a", o.ic.c1_a);
      ic.number("k_a", o.ic.k_a);
    });
  });

  root.object("numerics", [&](Reader& n) {
    NumericalSettings& s = c.numerics;
    const std::pair<const char*, double*> fields[] = {
        {"residual_tol", &s.residual_tol},   {"dedupe_tol", &s.dedupe_tol},
        {"golden_tol", &s.golden_tol},       {"degeneracy_tol", &s.degeneracy_tol},
        {"marginal_tol", &s.marginal_tol},   {"boundary_tol", &s.boundary_tol},
        {"radicand_tol", &s.radicand_tol}};
    for (const auto& [k, ptr] : fields) {
      n.number(k, *ptr);
      require_positive(n.path(k), *ptr);
    }
  });
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  json& m = j["model"];
  m = {{"r", c.model.r}, {"gamma", c.model.gamma}, {"alpha", c.model.alpha}, {"l", c.model.l}};
  if (c.d_given) m["d"] = c.model.d;
  if (c.tau_given) m["tau"] = c.model.tau;
  if (c.dimensional) {
    const DimensionalParams& dp = *c.dimensional;
    j["dimensional_source"] = {{"e", dp.e},         {"c", dp.c},     {"d_M", dp.d_M},
                               {"k_M", dp.k_M},     {"f", dp.f},     {"H", dp.H},
                               {"A_up", dp.A_up},   {"D_M", dp.D_M}, {"D_A", dp.D_A},
                               {"tau_dimensional", c.tau_dimensional},
                               {"domain_length", c.domain_length}};
  }
  j["hopf"] = {{"j_max", c.hopf.j_max}, {"n_max", c.hopf.n_max}};
  j["turing"] = {{"alpha_min", c.turing.alpha_min},
                 {"alpha_max", c.turing.alpha_max},
                 {"alpha_steps", c.turing.alpha_steps}};
  j["classify"] = {{"tau_eps", c.classify.tau_eps}, {"d_eps", c.classify.d_eps}};
  const SweepOptions& s = c.sweep;
  j["sweep"] = {{"tau_eps_min", s.tau_eps_min}, {"tau_eps_max", s.tau_eps_max},
                {"tau_eps_steps", s.tau_eps_steps}, {"d_eps_min", s.d_eps_min},
                {"d_eps_max", s.d_eps_max},     {"d_eps_steps", s.d_eps_steps},
                {"threads", s.threads}};
  const SimConfig& sc = c.simulate.sim;
  const InitialCondition& ic = c.simulate.ic;
  json& sim = j["simulate"];
  sim = {{"grid_points", sc.grid_points},
         {"horizon", sc.horizon},
         {"snapshot_interval", sc.snapshot_interval},
         {"transient_fraction", sc.transient_fraction},
         {"spatial_tol", sc.spatial_tol},
         {"temporal_tol", sc.temporal_tol},
         {"drift_tol", sc.drift_tol},
         {"dt_request", sc.dt_request},
         {"enforce_stability_bound", sc.enforce_stability_bound},
         {"abort_on_violation", sc.abort_on_violation},
         {"csv_stride", c.simulate.csv_stride},
         {"initial",
          {{"c0_m", ic.c0_m}, {"c1_m", ic.c1_m}, {"k_m", ic.k_m},
           {"c0_a", ic.c0_a}, {"c1_a", ic.c1_a}, {"k_a", ic.k_a}}}};
  if (c.simulate.offset)
    sim["offset"] = {{"tau_eps", c.simulate.offset->first}, {"d_eps", c.simulate.offset->second}};
  const NumericalSettings& n = c.numerics;
  j["numerics"] = {{"residual_tol", n.residual_tol},     {"dedupe_tol", n.dedupe_tol},
                   {"golden_tol", n.golden_tol},         {"degeneracy_tol", n.degeneracy_tol},
                   {"marginal_tol", n.marginal_tol},     {"boundary_tol", n.boundary_tol},
                   {"radicand_tol", n.radicand_tol}};
  return j;
}

}  // namespace mussel
