#include "cgrav/observer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "cgrav/error.hpp"

namespace cgrav {

std::string_view to_string(LightTime mode) {
  return mode == LightTime::Exact ? "exact" : "neglect_earth_velocity";
}

std::string_view to_string(PrecessionModel model) {
  return model == PrecessionModel::Causal ? "causal" : "gr";
}

void validate(const ObservationScenario& s) {
  if (!std::isfinite(s.phi1_0) || !std::isfinite(s.phi3_0))
    throw Error(ErrorCode::Validation, "scenario: perihelion angles must be finite");
  if (!(s.l2 > s.l1)) throw Error(ErrorCode::Validation, "scenario: l2 must exceed l1");
}

double period_ratio(const PlanetTable& table) {
  return table.at(PlanetId::Mercury).mean_frequency / table.at(PlanetId::Earth).mean_frequency;
}

PerihelionPair select_perihelion_pair(int centuries, const PlanetTable& table) {
  if (centuries < 1) throw Error(ErrorCode::Domain, "select_perihelion_pair: centuries must be >= 1");
  // 2 pi dl / omega1 <= 100 C T3 <= 2 pi dl / omega1 + T1  <=>  dl <= 100 C omega1/omega3 <= dl + 1
  const double window = 100.0 * centuries * period_ratio(table);
  return {0, static_cast<long>(std::ceil(window)) - 1};
}

MercuryPerihelion mercury_perihelion(long l, const PlanetTable& table) {
  const auto& m = table.at(PlanetId::Mercury);
  const double tau = kPi * (2.0 * static_cast<double>(l) + 1.5);
  const double x = m.velocity_ratio2(table.c());
  return {tau, (tau + m.eccentricity * (1.0 - x)) / m.mean_frequency, m.semi_major * (1.0 - m.eccentricity)};
}

double earth_param_at_time(double t, const PlanetTable& table) {
  const auto& earth = table.at(PlanetId::Earth);
  const double k = earth.eccentricity * (1.0 - earth.velocity_ratio2(table.c()));
  const double target = earth.mean_frequency * t;
  double tau = target;
  for (int it = 0; it < 100; ++it) {
    const double g = tau - k * (std::cos(tau) - 1.0) - target;
    const double step = g / (1.0 + k * std::sin(tau));
    tau -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tau))) break;
  }
  return tau;
}

EarthRadiusAngle earth_radius_angle(double tau3, double phi3_0, const PlanetTable& table, PrecessionModel model) {
  const auto& earth = table.at(PlanetId::Earth);
  const double e = earth.eccentricity;
  const double gamma = precession_coefficient(earth, model, table.c());
  const double s = std::sin(tau3);
  const double cos_theta = std::clamp(-(e + s) / (1.0 + e * s), -1.0, 1.0);
  const double shifted = tau3 + 0.5 * kPi;
  const double turns = std::floor(shifted / (2.0 * kPi));
  const double within = shifted - 2.0 * kPi * turns;
  const double theta = within <= kPi ? std::acos(cos_theta) : 2.0 * kPi - std::acos(cos_theta);
  return {1.0 + e * s, phi3_0 + (2.0 * kPi * turns + theta) / gamma};
}

Vec3 position3d(Body body, double r, double phi, const PlanetTable& table) {
  if (body == Body::Earth) return {r * std::cos(phi), r * std::sin(phi), 0.0};
  const double th = table.at(PlanetId::Mercury).inclination;
  return {r * std::cos(phi), -r * std::cos(th) * std::sin(phi), r * std::sin(th) * std::sin(phi)};
}

namespace {

struct EarthAt {
  double t{};
  double tau{};
  EarthRadiusAngle ra;
  Vec3 x;
};

EarthAt earth_at(double t, double phi3_0, const PlanetTable& table, PrecessionModel model) {
  EarthAt e;
  e.t = t;
  e.tau = earth_param_at_time(t, table);
  e.ra = earth_radius_angle(e.tau, phi3_0, table, model);
  e.x = position3d(Body::Earth, e.ra.r_over_a * table.at(PlanetId::Earth).semi_major, e.ra.phi, table);
  return e;
}

}  // namespace

AdvanceResult advance_angle_unchecked(const ObservationScenario& sc, const PlanetTable& table) {
  const double c = table.c();
  const double gamma1 = precession_coefficient(table.at(PlanetId::Mercury), sc.model, c);
  AdvanceResult res;
  std::array<Vec3, 2> sight;
  const std::array<long, 2> ls = {sc.l1, sc.l2};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto mp = mercury_perihelion(ls[k], table);
    const double phi1 = sc.phi1_0 + 2.0 * kPi * static_cast<double>(ls[k]) / gamma1;
    const Vec3 x1 = position3d(Body::Mercury, mp.r1, phi1, table);

    EarthAt earth = earth_at(mp.t1, sc.phi3_0, table, sc.model);
    if (sc.light_time == LightTime::Exact) {
      // delay = |x1 - x3(t1 + delay)| / c; contraction factor |v3| / c.
      double delay = 0.0;
      for (int it = 0; it < 50; ++it) {
        const double next = norm(x1 - earth.x) / c;
        const bool done = std::abs(next - delay) <= 1e-12 * next;
        delay = next;
        earth = earth_at(mp.t1 + delay, sc.phi3_0, table, sc.model);
        if (done) break;
      }
    }

    sight[k] = x1 - earth.x;
    if (!(norm(sight[k]) > 1e-9 * table.at(PlanetId::Earth).semi_major))
      throw Error(ErrorCode::Domain, "advance_angle: Mercury and Earth coincide, sight line undefined");
    res.t1[k] = mp.t1;
    res.t3[k] = earth.t;
    res.tau3[k] = earth.tau;
    res.earth_radii[k] = earth.ra.r_over_a;
    res.earth_angles[k] = earth.ra.phi;
    res.mercury_angles[k] = phi1;
    res.positions[2 * k] = x1;
    res.positions[2 * k + 1] = earth.x;
  }
  res.alpha_rad = angle_between(sight[0], sight[1]);
  res.alpha_deg = res.alpha_rad * 180.0 / kPi;
  return res;
}

AdvanceResult advance_angle(const ObservationScenario& scenario, const PlanetTable& table) {
  validate(scenario);
  return advance_angle_unchecked(scenario, table);
}

std::vector<std::vector<double>> advance_sweep(const std::vector<double>& phi1_grid,
                                               const std::vector<double>& phi3_grid,
                                               const ObservationScenario& base, const PlanetTable& table,
                                               unsigned threads) {
  if (phi1_grid.empty() || phi3_grid.empty()) throw Error(ErrorCode::Validation, "advance_sweep: empty grid");
  validate(base);
  const std::size_t n1 = phi1_grid.size(), n3 = phi3_grid.size(), cells = n1 * n3;
  std::vector<std::vector<double>> out(n1, std::vector<double>(n3));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));

  // Each cell is written by exactly one worker; errors are rethrown for the lowest failing cell.
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells;) {
      ObservationScenario sc = base;
      sc.phi1_0 = phi1_grid[k / n3];
      sc.phi3_0 = phi3_grid[k % n3];
      try {
        out[k / n3][k % n3] = advance_angle(sc, table).alpha_rad;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<double>& phi1_grid, const std::vector<double>& phi3_grid,
                     const std::vector<std::vector<double>>& alpha_rad) {
  out << "phi1_0_rad,phi3_0_rad,alpha_deg\n";
  char buf[96];
  for (std::size_t i = 0; i < phi1_grid.size(); ++i) {
    for (std::size_t j = 0; j < phi3_grid.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", phi1_grid[i], phi3_grid[j],
                    alpha_rad[i][j] * 180.0 / kPi);
      out << buf;
    }
  }
}

}  // namespace cgrav
