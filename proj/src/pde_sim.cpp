#include "mussel/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "mussel/errors.hpp"

namespace mussel {

void SimConfig::validate() const {
  if (grid_points < 4) throw DomainError("grid_points must be at least 4");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (!(snapshot_interval > 0.0)) throw DomainError("snapshot_interval must be positive");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
    throw DomainError("transient_fraction must lie in [0, 1)");
  if (!(spatial_tol > 0.0) || !(temporal_tol > 0.0) || !(drift_tol > 0.0))
    throw DomainError("classifier tolerances must be positive");
  if (!(dt_request >= 0.0)) throw DomainError("dt_request must be >= 0");
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::HomogeneousSteady: return "HomogeneousSteady";
    case Pattern::HomogeneousPeriodic: return "HomogeneousPeriodic";
    case Pattern::InhomogeneousSteady: return "InhomogeneousSteady";
    case Pattern::InhomogeneousPeriodic: return "InhomogeneousPeriodic";
    case Pattern::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

double stability_dt(const ModelParams& p, int grid_points) {
  const double h = p.l * M_PI / grid_points;
  return 0.8 * h * h / (2.0 * std::max(p.d, 1.0 / p.gamma));
}

namespace {

struct Fields {
  Eigen::ArrayXd m, a;
};

class Rhs {
 public:
  Rhs(const ModelParams& p, int n) : p_(p), n_(n) {
    const double h = p.l * M_PI / n;
    inv_h2_ = 1.0 / (h * h);
  }

  // out = time derivative given current state and delayed state.
  void operator()(const Fields& u, const Fields& delayed, Fields& out) const {
    const double* m = u.m.data();
    const double* a = u.a.data();
    const double* mt = delayed.m.data();
    const double* at = delayed.a.data();
    double* dm = out.m.data();
    double* da = out.a.data();
    const double d = p_.d, r = p_.r, alpha = p_.alpha, inv_g = 1.0 / p_.gamma;
    const int n = n_;
    for (int i = 0; i <= n; ++i) {
      const int il = i == 0 ? 1 : i - 1;
      const int ir = i == n ? n - 1 : i + 1;
      const double lap_m = (m[il] + m[ir] - 2.0 * m[i]) * inv_h2_;
      const double lap_a = (a[il] + a[ir] - 2.0 * a[i]) * inv_h2_;
      dm[i] = d * lap_m + m[i] * (r * at[i] - 1.0 / (1.0 + mt[i]));
      da[i] = inv_g * (lap_a + alpha * (1.0 - a[i]) - m[i] * a[i]);
    }
  }

 private:
  ModelParams p_;
  int n_;
  double inv_h2_;
};

}  // namespace

FieldTrajectory simulate(const ModelParams& p, const InitialCondition& ic, const SimConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!h1_holds(p)) throw HypothesisError("simulate requires (H1): 0 < alpha < 1 < r < 1/alpha");
  const Equilibrium eq = positive_equilibrium(p);
  const int N = cfg.grid_points;
  const double dt_max = stability_dt(p, N);
  const double dt_cap = cfg.dt_request > 0.0 ? cfg.dt_request : dt_max;

  FieldTrajectory tr;
  tr.eq = eq;
  tr.l = p.l;
  int K = 0;
  if (p.tau > 0.0) {
    K = static_cast<int>(std::ceil(p.tau / dt_cap - 1e-12));
    K = std::max(K, 1);
    tr.dt = p.tau / K;
  } else {
    // No history to align with: land exactly on the horizon instead.
    tr.dt = cfg.horizon / std::ceil(cfg.horizon / dt_cap - 1e-12);
  }
  tr.steps_per_delay = K;
  if (cfg.enforce_stability_bound && tr.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << tr.dt << " exceeds the diffusion stability bound " << dt_max;
    throw DomainError(os.str());
  }
  const double dt = tr.dt;

  tr.x = Eigen::ArrayXd::LinSpaced(N + 1, 0.0, p.l * M_PI);
  Fields u{eq.m_star + ic.c0_m + ic.c1_m * (ic.k_m * tr.x / p.l).cos(),
           eq.a_star + ic.c0_a + ic.c1_a * (ic.k_a * tr.x / p.l).cos()};
  if ((u.m < 0.0).any() || (u.a < 0.0).any())
    throw DomainError("initial condition must be nonnegative on the grid");

  WellposednessReport& mon = tr.monitors;
  mon.a_bound = std::max(u.a.maxCoeff(), 1.0);
  mon.min_m = u.m.minCoeff();
  mon.min_a = u.a.minCoeff();
  mon.max_a = u.a.maxCoeff();

  auto sup_dev = [&](const Fields& f) {
    return std::max((f.m - eq.m_star).abs().maxCoeff(), (f.a - eq.a_star).abs().maxCoeff());
  };
  auto store = [&](double t, const Fields& f) {
    tr.times.push_back(t);
    tr.m.push_back(f.m);
    tr.a.push_back(f.a);
    tr.sup_deviation.push_back(sup_dev(f));
  };

  // Ring buffer of the last K + 1 states; slot (n mod (K+1)) holds step n.
  const int slots = K + 1;
  std::vector<Fields> ring(slots, u);
  const Rhs rhs(p, N);
  Fields k1{Eigen::ArrayXd(N + 1), Eigen::ArrayXd(N + 1)}, k2 = k1, k3 = k1, k4 = k1, stage = k1,
      lag_mid = k1;

  const long steps = std::lround(std::ceil(cfg.horizon / dt - 1e-9));
  const long stride = std::max(1L, std::lround(cfg.snapshot_interval / dt));
  store(0.0, u);

  for (long n = 0; n < steps; ++n) {
    const double t_next = (n + 1) * dt;
    if (K > 0) {
      // Step n - K sits in slot (n + 1) mod (K + 1); step n - K + 1 in (n + 2) mod (K + 1).
      const Fields& lag0 = ring[(n + 1) % slots];
      const Fields& lag1 = ring[(n + 2) % slots];
      lag_mid.m = 0.5 * (lag0.m + lag1.m);
      lag_mid.a = 0.5 * (lag0.a + lag1.a);
      rhs(u, lag0, k1);
      stage.m = u.m + 0.5 * dt * k1.m;
      stage.a = u.a + 0.5 * dt * k1.a;
      rhs(stage, lag_mid, k2);
      stage.m = u.m + 0.5 * dt * k2.m;
      stage.a = u.a + 0.5 * dt * k2.a;
      rhs(stage, lag_mid, k3);
      stage.m = u.m + dt * k3.m;
      stage.a = u.a + dt * k3.a;
      rhs(stage, lag1, k4);
    } else {
      rhs(u, u, k1);
      stage.m = u.m + 0.5 * dt * k1.m;
      stage.a = u.a + 0.5 * dt * k1.a;
      rhs(stage, stage, k2);
      stage.m = u.m + 0.5 * dt * k2.m;
      stage.a = u.a + 0.5 * dt * k2.a;
      rhs(stage, stage, k3);
      stage.m = u.m + dt * k3.m;
      stage.a = u.a + dt * k3.a;
      rhs(stage, stage, k4);
    }
    u.m += dt / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    u.a += dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    if (K > 0) ring[(n + 1) % slots] = u;

    const double min_m = u.m.minCoeff(), min_a = u.a.minCoeff(), max_a = u.a.maxCoeff();
    const bool finite = u.m.allFinite() && u.a.allFinite();
    if (finite) {
      mon.min_m = std::min(mon.min_m, min_m);
      mon.min_a = std::min(mon.min_a, min_a);
      mon.max_a = std::max(mon.max_a, max_a);
    }
    const double pos_v = finite ? std::max(0.0, -std::min(min_m, min_a)) : INFINITY;
    const double bnd_v = finite ? std::max(0.0, max_a - mon.a_bound) : INFINITY;
    mon.positivity_violation = std::max(mon.positivity_violation, pos_v);
    mon.bound_violation = std::max(mon.bound_violation, bnd_v);
    const bool violated = pos_v > cfg.violation_tol || bnd_v > 1e-6;
    if (violated && mon.ok) {
      mon.ok = false;
      mon.first_violation_time = t_next;
    }
    if (!finite || (violated && cfg.abort_on_violation)) {
      std::ostringstream os;
      os << (finite ? "well-posedness bound violated" : "non-finite value") << " at t = "
         << t_next << " (min m " << min_m << ", min a " << min_a << ", max a " << max_a
         << ")";
      tr.aborted = true;
      tr.abort_reason = os.str();
      if (finite) store(t_next, u);
      if (cfg.abort_on_violation) throw NumericalError(tr.abort_reason);
      return tr;
    }
    if ((n + 1) % stride == 0 || n + 1 == steps) store(t_next, u);
  }
  return tr;
}

namespace {

double spatial_mean(const Eigen::ArrayXd& f) {
  const Eigen::Index n = f.size() - 1;
  return (f.sum() - 0.5 * (f(0) + f(n))) / n;
}

}  // namespace

PatternClass classify_pattern(const FieldTrajectory& tr, const SimConfig& cfg) {
  PatternClass pc;
  if (tr.times.size() < 4) {
    pc.note = "too few snapshots";
    return pc;
  }
  const double t_end = tr.times.back();
  const double t_start = cfg.transient_fraction * t_end;
  std::size_t first = 0;
  while (first < tr.times.size() && tr.times[first] < t_start) ++first;
  const std::size_t count = tr.times.size() - first;
  if (count < 4) {
    pc.note = "trailing window has too few snapshots";
    return pc;
  }
  if (cfg.reference_period > 0.0 && t_end - tr.times[first] < 10.0 * cfg.reference_period)
    throw DomainError("trailing window shorter than 10 reference periods");

  const double ms = tr.eq.m_star;
  // Per-half statistics to detect drift.
  struct Stats {
    double spatial = 0.0, lo = INFINITY, hi = -INFINITY;
    std::size_t n = 0;
  };
  Stats all, halves[2];
  Eigen::ArrayXd mean_profile = Eigen::ArrayXd::Zero(tr.x.size());
  for (std::size_t k = first; k < tr.times.size(); ++k) {
    const Eigen::ArrayXd& m = tr.m[k];
    const double range = m.maxCoeff() - m.minCoeff();
    const double avg = spatial_mean(m);
    Stats& h = halves[(k - first) * 2 < count ? 0 : 1];
    for (Stats* s : {&all, &h}) {
      s->spatial += range;
      s->lo = std::min(s->lo, avg);
      s->hi = std::max(s->hi, avg);
      ++s->n;
    }
    mean_profile += m;
  }
  mean_profile /= double(count);

  auto spatial_of = [&](const Stats& s) { return s.spatial / s.n / ms; };
  auto temporal_of = [&](const Stats& s) { return 0.5 * (s.hi - s.lo) / ms; };
  pc.spatial_measure = spatial_of(all);
  pc.temporal_measure = temporal_of(all);
  pc.oscillation_amplitude = 0.5 * (all.hi - all.lo);

  // Dominant cosine mode of the time-averaged profile.
  const Eigen::Index n_nodes = tr.x.size();
  const int max_mode = static_cast<int>(n_nodes - 1) / 2;
  double best = -1.0;
  for (int k = 1; k <= max_mode; ++k) {
    const Eigen::ArrayXd basis = (k * tr.x / tr.l).cos();
    const double c = std::abs(spatial_mean(mean_profile * basis));
    if (c > best) {
      best = c;
      pc.dominant_mode = k;
    }
  }

  const bool inhomogeneous = pc.spatial_measure > cfg.spatial_tol;
  const bool periodic = pc.temporal_measure > cfg.temporal_tol;
  if (!inhomogeneous) pc.dominant_mode = 0;

  auto drifting = [&](double v0, double v1, double tol) {
    if (std::max(v0, v1) <= tol) return false;
    return std::abs(v1 - v0) > cfg.drift_tol * std::max(v0, v1);
  };
  if (drifting(spatial_of(halves[0]), spatial_of(halves[1]), cfg.spatial_tol) ||
      drifting(temporal_of(halves[0]), temporal_of(halves[1]), cfg.temporal_tol)) {
    pc.pattern = Pattern::Undetermined;
    pc.note = "monitors still trending across the trailing window";
    return pc;
  }
  if (inhomogeneous) pc.pattern = periodic ? Pattern::InhomogeneousPeriodic : Pattern::InhomogeneousSteady;
  else pc.pattern = periodic ? Pattern::HomogeneousPeriodic : Pattern::HomogeneousSteady;
  return pc;
}

WellposednessReport monitor_wellposedness(const FieldTrajectory& tr) { return tr.monitors; }

void write_trajectory_csv(std::ostream& os, const FieldTrajectory& tr, int stride) {
  stride = std::max(stride, 1);
  char buf[128];
  os << "t,x,m,a\n";
  for (std::size_t k = 0; k < tr.times.size(); k += stride) {
    for (Eigen::Index i = 0; i < tr.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g,%.12g\n", tr.times[k], tr.x(i),
                    tr.m[k](i), tr.a[k](i));
      os << buf;
    }
  }
}

}  // namespace mussel
