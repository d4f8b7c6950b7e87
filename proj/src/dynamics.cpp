#include "cgrav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cgrav/error.hpp"
#include "dopri.hpp"

namespace cgrav {

std::string_view to_string(HistoryBootstrap b) {
  switch (b) {
    case HistoryBootstrap::None: return "none";
    case HistoryBootstrap::StraightLinePast: return "straight_line_past";
    case HistoryBootstrap::KeplerianPast: return "keplerian_past";
  }
  return "unknown";
}

void validate(const IntegratorConfig& cfg) {
  auto in_range = [](double tol) { return tol > 0.0 && tol < 1e-2; };
  if (!in_range(cfg.rel_tol)) throw Error(ErrorCode::Validation, "rel_tol must lie in (0, 1e-2)");
  if (!in_range(cfg.abs_tol)) throw Error(ErrorCode::Validation, "abs_tol must lie in (0, 1e-2)");
  if (!(cfg.max_step > 0.0)) throw Error(ErrorCode::Validation, "max_step must be positive");
  if (!(cfg.r_min > 0.0)) throw Error(ErrorCode::Validation, "r_min must be positive");
  if (!(cfg.lag_fraction > 0.0 && cfg.lag_fraction < 1.0))
    throw Error(ErrorCode::Validation, "lag_fraction must lie in (0, 1)");
}

namespace {

using detail::State;

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <std::size_t N>
Vec3 block(const State<N>& y, std::size_t at) {
  return {y[at], y[at + 1], y[at + 2]};
}
template <std::size_t N>
void put(State<N>& y, std::size_t at, const Vec3& v) {
  y[at] = v.x;
  y[at + 1] = v.y;
  y[at + 2] = v.z;
}

Vec3 velocity_from_momentum(const Vec3& u, double c) { return u / std::sqrt(1.0 + norm2(u) / (c * c)); }
Vec3 momentum_from_velocity(const Vec3& v, double c) { return v / std::sqrt(1.0 - norm2(v) / (c * c)); }

void check_step(double h, double t) {
  if (std::abs(h) <= 16.0 * kEps * std::max(std::abs(t), 1.0))
    throw Error(ErrorCode::Stiffness, "step size underflow at t = " + std::to_string(t) + " s");
}

// Central-field integration for any signed coupling m (negative = repulsive).
CentralRun integrate_central_core(const SpatialState& s0, double m, double t_end, const IntegratorConfig& cfg,
                                  double c) {
  const double span = t_end - s0.t;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  std::vector<SpatialState> out{s0};
  CentralRun run{Trajectory(c), RunStatus::Completed, 0, 0};

  State<6> y{};
  put(y, 0, s0.x);
  put(y, 3, momentum_from_velocity(s0.v, c));
  auto f = [m, c](double, const State<6>& s) {
    const Vec3 x = block(s, 0);
    const Vec3 u = block(s, 3);
    const double r = norm(x);
    State<6> d{};
    put(d, 0, velocity_from_momentum(u, c));
    put(d, 3, (-m / (r * r * r)) * x);
    return d;
  };

  double t = s0.t;
  double h = cfg.initial_step;
  if (!(h > 0.0)) {
    const double r = norm(s0.x);
    const double speed = norm(s0.v);
    double tscale = std::sqrt(r * r * r / std::max(std::abs(m), 1e-300));
    if (speed > 0.0) tscale = std::min(tscale, r / speed);
    h = 1e-3 * tscale;
  }
  h = std::min({h, cfg.max_step, std::abs(span)});

  while (dir * (t_end - t) > 0.0) {
    const double remaining = std::abs(t_end - t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (run.accepted + run.rejected >= cfg.max_steps)
      throw Error(ErrorCode::Stiffness, "step budget exhausted at t = " + std::to_string(t) + " s");
    const auto trial = detail::dopri_step<6>(f, t, y, dir * h);
    double err = detail::block_error(y, trial.y, trial.err, cfg.rel_tol, cfg.abs_tol);
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      t = last ? t_end : t + dir * h;
      y = trial.y;
      ++run.accepted;
      const Vec3 x = block(y, 0);
      out.push_back({t, x, velocity_from_momentum(block(y, 3), c)});
      if (norm(x) < cfg.r_min) {
        run.status = RunStatus::Collision;
        break;
      }
      h = std::min(h * detail::next_step_factor(err), cfg.max_step);
    } else {
      ++run.rejected;
      h *= std::max(0.2, detail::next_step_factor(err));
      check_step(h, t);
    }
  }

  if (dir < 0.0) std::reverse(out.begin(), out.end());
  run.trajectory = Trajectory(std::move(out), c);
  return run;
}

}  // namespace

CentralRun integrate_central(const SpatialState& state0, double m10G, double t_end, const IntegratorConfig& cfg,
                             double c) {
  validate(cfg);
  if (!(norm(state0.v) < c)) throw Error(ErrorCode::Domain, "integrate_central: |v0| >= c");
  if (!(norm(state0.x) > cfg.r_min)) throw Error(ErrorCode::Domain, "integrate_central: |x0| <= r_min");
  return integrate_central_core(state0, m10G, t_end, cfg, c);
}

ConservationReport conservation_report(const Trajectory& trajectory, double m10G) {
  ConservationReport rep;
  if (trajectory.empty()) return rep;
  const double c = trajectory.c();
  const auto q0 = conserved_quantities(trajectory.front(), m10G, c);
  const double m0 = norm(q0.M);
  for (const auto& s : trajectory.samples()) {
    const auto q = conserved_quantities(s, m10G, c);
    rep.max_rel_drift_E = std::max(rep.max_rel_drift_E, std::abs(q.E - q0.E) / std::abs(q0.E));
    if (m0 > 0.0) rep.max_rel_drift_M = std::max(rep.max_rel_drift_M, std::abs(norm(q.M) - m0) / m0);
    if (q0.energy_deficit != 0.0)
      rep.max_rel_drift_binding = std::max(
          rep.max_rel_drift_binding, std::abs(q.energy_deficit - q0.energy_deficit) / std::abs(q0.energy_deficit));
    // eta_{aa} (dt/ds dx^a/dt)^2 with dt/ds dx^0/dt = gamma, dt/ds dx^i/dt = gamma v^i / c.
    const double beta2 = norm2(s.v) / (c * c);
    const double gamma = 1.0 / std::sqrt(1.0 - beta2);
    const double residual = gamma * gamma - gamma * gamma * beta2 - 1.0;
    rep.fourvel_norm_residual = std::max(rep.fourvel_norm_residual, std::abs(residual));
  }
  return rep;
}

std::array<double, 4> lorentz_rhs(const FieldStrength& f, const Vec3& v, double c) {
  const std::array<double, 4> dx = {c, v.x, v.y, v.z};
  std::array<double, 4> rhs{};
  for (int mu = 0; mu < 4; ++mu) {
    double sum = 0.0;
    for (int nu = 0; nu < 4; ++nu) sum += dx[static_cast<std::size_t>(nu)] * f(mu, nu);
    const double eta = mu == 0 ? 1.0 : -1.0;
    rhs[static_cast<std::size_t>(mu)] = -eta * sum / c;
  }
  return rhs;
}

namespace {

Trajectory bootstrap_history(const SourceSpec& self, double self_coupling, const SourceSpec& partner,
                             const IntegratorConfig& cfg) {
  const Trajectory& given = self.worldline;
  if (given.size() > 1 || cfg.history_bootstrap == HistoryBootstrap::None) return given;

  const double c = given.c();
  const SpatialState s0 = given.back();
  const SpatialState p0 = partner.worldline.back();
  const double r0 = norm(s0.x - p0.x);
  const double vmax = std::max(norm(s0.v), norm(p0.v));
  // Retarded times of any field point near the partner stay within r0 / (c - vmax) of t0.
  const double span = 1.25 * r0 / (c - vmax) + 1.0;

  if (cfg.history_bootstrap == HistoryBootstrap::StraightLinePast) {
    return Trajectory({{s0.t - span, s0.x - span * s0.v, s0.v}, s0}, c);
  }

  // KeplerianPast: relative motion in the static field of the partner held at its t0 position.
  SpatialState rel = s0;
  rel.x = s0.x - p0.x;
  const double m_eff = self_coupling * partner.strength;
  auto run = integrate_central_core(rel, m_eff, s0.t - span, cfg, c);
  std::vector<SpatialState> samples(run.trajectory.samples().begin(), run.trajectory.samples().end());
  for (auto& s : samples) s.x += p0.x;
  samples.back() = s0;
  return Trajectory(std::move(samples), c);
}

}  // namespace

PairRun integrate_retarded_pair(const SourceSpec& a, const SourceSpec& b, const PairMasses& masses, double t_end,
                                const IntegratorConfig& cfg) {
  validate(cfg);
  if (a.worldline.empty() || b.worldline.empty())
    throw Error(ErrorCode::Validation, "integrate_retarded_pair: worldlines must hold the initial states");
  if (!(masses.a > 0.0) || !(masses.b > 0.0))
    throw Error(ErrorCode::Validation, "integrate_retarded_pair: inertial mass parameters must be positive");
  if (a.worldline.back().t != b.worldline.back().t)
    throw Error(ErrorCode::Validation, "integrate_retarded_pair: initial states must share one time");
  const double c = a.worldline.c();
  if (b.worldline.c() != c) throw Error(ErrorCode::Validation, "integrate_retarded_pair: bodies disagree on c");

  const double kappa_a = a.strength / masses.a;
  const double kappa_b = b.strength / masses.b;
  SourceSpec sa{a.strength, bootstrap_history(a, kappa_a, b, cfg)};
  SourceSpec sb{b.strength, bootstrap_history(b, kappa_b, a, cfg)};

  PairRun run;
  const double t0 = sa.worldline.back().t;
  // The first field evaluation already looks back one light delay.
  const double lookback = t0 - norm(sa.worldline.back().x - sb.worldline.back().x) / c;
  if (sa.worldline.front().t > lookback || sb.worldline.front().t > lookback)
    throw Error(ErrorCode::InsufficientHistory,
                "integrate_retarded_pair: supplied histories do not reach the initial light delay");
  const LwLimits limits{};

  State<12> y{};
  put(y, 0, sa.worldline.back().x);
  put(y, 3, momentum_from_velocity(sa.worldline.back().v, c));
  put(y, 6, sb.worldline.back().x);
  put(y, 9, momentum_from_velocity(sb.worldline.back().v, c));

  auto force = [&](double t, const Vec3& x, const Vec3& v, const SourceSpec& partner, double kappa) {
    RetardedPoint where;
    const auto f = field_strength(Event{c * t, x}, partner, limits, where);
    const auto& w = partner.worldline;
    ++run.field_evaluations;
    run.max_retarded_lead = std::max(run.max_retarded_lead, where.t - w.back().t);
    if (w.size() > 1) {
      const double t_lo = w[where.segment].t;
      const double t_hi = w[where.segment + 1].t;
      run.max_stencil_fraction = std::max(run.max_stencil_fraction, (t_hi - where.t) / (t_hi - t_lo));
    }
    run.min_light_delay = std::min(run.min_light_delay, t - where.t);
    const auto rhs = lorentz_rhs(f, v, c);
    return kappa * Vec3{rhs[1], rhs[2], rhs[3]};
  };
  auto rhs = [&](double t, const State<12>& s) {
    const Vec3 xa = block(s, 0), ua = block(s, 3), xb = block(s, 6), ub = block(s, 9);
    const Vec3 va = velocity_from_momentum(ua, c);
    const Vec3 vb = velocity_from_momentum(ub, c);
    State<12> d{};
    put(d, 0, va);
    put(d, 3, force(t, xa, va, sb, kappa_a));
    put(d, 6, vb);
    put(d, 9, force(t, xb, vb, sa, kappa_b));
    return d;
  };

  const double span = t_end - t0;
  if (span < 0.0) throw Error(ErrorCode::Domain, "integrate_retarded_pair: t_end precedes the initial states");
  double t = t0;
  double h = cfg.initial_step > 0.0 ? cfg.initial_step : std::numeric_limits<double>::infinity();

  while (t < t_end) {
    const double sep = norm(block(y, 0) - block(y, 6));
    if (sep < cfg.r_min) {
      run.status = RunStatus::Collision;
      break;
    }
    const double cap = cfg.lag_fraction * sep / c;
    h = std::min({h, cap, cfg.max_step});
    const double remaining = t_end - t;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (run.accepted + run.rejected >= cfg.max_steps)
      throw Error(ErrorCode::Stiffness, "step budget exhausted at t = " + std::to_string(t) + " s");

    detail::DopriStep<12> trial;
    double err;
    bool short_history = false;
    try {
      trial = detail::dopri_step<12>(rhs, t, y, h);
      err = detail::block_error(y, trial.y, trial.err, cfg.rel_tol, cfg.abs_tol);
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    } catch (const Error& e) {
      // A stage reached past the partner's integrated history: the step outran the light delay.
      if (e.code() != ErrorCode::InsufficientHistory) throw;
      err = std::numeric_limits<double>::infinity();
      short_history = true;
    }

    if (err <= 1.0) {
      t = last ? t_end : t + h;
      y = trial.y;
      ++run.accepted;
      sa.worldline.append({t, block(y, 0), velocity_from_momentum(block(y, 3), c)});
      sb.worldline.append({t, block(y, 6), velocity_from_momentum(block(y, 9), c)});
      h *= detail::next_step_factor(err);
    } else {
      ++run.rejected;
      h *= std::isfinite(err) ? std::max(0.2, detail::next_step_factor(err)) : 0.5;
      try {
        check_step(h, t);
      } catch (const Error&) {
        if (!short_history) throw;
        throw Error(ErrorCode::InsufficientHistory,
                    "integrate_retarded_pair: partner history ends before the retarded time at t = " +
                        std::to_string(t) + " s");
      }
    }
  }

  run.a = std::move(sa.worldline);
  run.b = std::move(sb.worldline);
  return run;
}

}  // namespace cgrav
