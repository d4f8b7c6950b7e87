#include "cgrav/lw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cgrav/error.hpp"

namespace cgrav {

namespace {

// g(t) = c (t_obs - t) - |x - x_src(t)|; strictly decreasing for |v| < c.
double light_cone_residual(double c, double t_obs, const Vec3& x, const Vec3& src, double t) {
  return c * (t_obs - t) - norm(x - src);
}

RetardedPoint finish(const Event& ev, const Trajectory& traj, std::size_t seg, double t, const LwLimits& limits) {
  RetardedPoint rp;
  rp.t = t;
  rp.segment = seg;
  rp.source = traj.on_segment(seg, t);
  rp.separation = ev.x - rp.source.x;
  rp.distance = norm(rp.separation);
  if (rp.distance < limits.r_min)
    throw Error(ErrorCode::SingularEvaluation,
                "field event lies on the source worldline (distance " + std::to_string(rp.distance) + " m)");
  return rp;
}

}  // namespace

RetardedPoint solve_retarded(const Event& ev, const Trajectory& traj, const LwLimits& limits) {
  if (traj.empty()) throw Error(ErrorCode::InsufficientHistory, "source worldline is empty");
  const double c = traj.c();
  const double t_obs = ev.x0 / c;
  const auto samples = traj.samples();
  auto g_node = [&](std::size_t i) { return light_cone_residual(c, t_obs, ev.x, samples[i].x, samples[i].t); };

  if (samples.front().t > t_obs || g_node(0) < 0.0)
    throw Error(ErrorCode::InsufficientHistory, "retarded time precedes the first worldline sample");

  // Largest node index with g >= 0 among nodes not later than t_obs.
  std::size_t lo = 0;
  std::size_t hi = samples.size();  // exclusive
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (samples[mid].t <= t_obs && g_node(mid) >= 0.0) lo = mid;
    else hi = mid;
  }

  if (g_node(lo) == 0.0) {
    const std::size_t seg = std::min(lo, samples.size() >= 2 ? samples.size() - 2 : 0);
    return finish(ev, traj, seg, samples[lo].t, limits);
  }
  if (lo + 1 == samples.size()) {
    // Root lies after the last sample: either beyond the history, or inside (t_last, t_obs].
    throw Error(ErrorCode::InsufficientHistory, "retarded time is later than the last worldline sample");
  }

  const std::size_t seg = lo;
  double a = samples[seg].t;
  double b = std::min(samples[seg + 1].t, t_obs);
  auto g = [&](double t) { return light_cone_residual(c, t_obs, ev.x, traj.on_segment(seg, t).x, t); };
  double gb = g(b);
  if (gb >= 0.0) {
    // Only possible when b == t_obs: the field event sits on the worldline.
    return finish(ev, traj, seg, b, limits);
  }
  double ga = g_node(seg);

  // Secant start, then Newton with the bracket kept.
  double t = a + (b - a) * ga / (ga - gb);
  const double scale = std::max({std::abs(a), std::abs(b), b - a});
  for (int it = 0; it < 100; ++it) {
    const auto k = traj.on_segment(seg, t);
    const Vec3 r = ev.x - k.x;
    const double dist = norm(r);
    const double gt = c * (t_obs - t) - dist;
    if (gt == 0.0) break;
    if (gt > 0.0) {
      a = t;
      ga = gt;
    } else {
      b = t;
      gb = gt;
    }
    const double dg = -c + (dist > 0.0 ? dot(r, k.v) / dist : 0.0);
    double next = t - gt / dg;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = next - t;
    t = next;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * scale) break;
  }
  return finish(ev, traj, seg, t, limits);
}

double retarded_time(const Event& ev, const Trajectory& source, const LwLimits& limits) {
  return solve_retarded(ev, source, limits).t;
}

namespace {

struct LwGeometry {
  RetardedPoint rp;
  double denom{};  // (R, u) = c |R| - R . v
};

LwGeometry geometry(const Event& ev, const SourceSpec& src, const LwLimits& limits) {
  LwGeometry geo{solve_retarded(ev, src.worldline, limits), 0.0};
  const double c = src.worldline.c();
  geo.denom = c * geo.rp.distance - dot(geo.rp.separation, geo.rp.source.v);
  if (!(geo.denom > limits.eps_denom_relative * c * geo.rp.distance))
    throw Error(ErrorCode::NearLuminalDegeneracy, "Lienard-Wiechert denominator c|R| - R.v collapses");
  return geo;
}

}  // namespace

FourPotential lw_potential(const Event& ev, const SourceSpec& src, const LwLimits& limits) {
  const auto geo = geometry(ev, src, limits);
  const double c = src.worldline.c();
  const double k = src.strength / geo.denom;
  const Vec3& v = geo.rp.source.v;
  return FourPotential{{k * c, -k * v.x, -k * v.y, -k * v.z}};
}

FieldStrength field_strength(const Event& ev, const SourceSpec& src, const LwLimits& limits) {
  RetardedPoint where;
  return field_strength(ev, src, limits, where);
}

FieldStrength field_strength(const Event& ev, const SourceSpec& src, const LwLimits& limits, RetardedPoint& where) {
  const auto geo = geometry(ev, src, limits);
  where = geo.rp;
  const double c = src.worldline.c();
  const auto& rp = geo.rp;
  const Vec3& v = rp.source.v;
  const Vec3& acc = rp.source.a;

  // Index-down four-vectors: R_mu = (|R|, -R), u_mu = (c, -v), a_mu = (0, -acc).
  const std::array<double, 4> R = {rp.distance, -rp.separation.x, -rp.separation.y, -rp.separation.z};
  const std::array<double, 4> u = {c, -v.x, -v.y, -v.z};
  const std::array<double, 4> a = {0.0, -acc.x, -acc.y, -acc.z};
  const double uu = c * c - norm2(v);
  const double ra = -dot(rp.separation, acc);
  const double d = geo.denom;
  const double pre = src.strength / (d * d);
  const double vel = (uu - ra) / d;

  FieldStrength f;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = mu + 1; nu < 4; ++nu) {
      const auto m = static_cast<std::size_t>(mu);
      const auto n = static_cast<std::size_t>(nu);
      f.set(mu, nu, pre * ((R[m] * a[n] - R[n] * a[m]) + vel * (R[m] * u[n] - R[n] * u[m])));
    }
  }
  return f;
}

double default_fd_step(const Event& ev) { return std::max(1e-6 * norm(ev.x), 1e-3); }

double gauge_divergence(const Event& ev, const SourceSpec& src, double step, const LwLimits& limits) {
  const double h = step > 0.0 ? step : default_fd_step(ev);
  double div = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Event plus = ev;
    Event minus = ev;
    if (mu == 0) {
      plus.x0 += h;
      minus.x0 -= h;
    } else {
      plus.x[mu - 1] += h;
      minus.x[mu - 1] -= h;
    }
    const double d = (lw_potential(plus, src, limits)[mu] - lw_potential(minus, src, limits)[mu]) / (2.0 * h);
    div += (mu == 0 ? 1.0 : -1.0) * d;
  }
  return div;
}

}  // namespace cgrav
