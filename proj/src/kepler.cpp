#include "cgrav/kepler.hpp"

#include <cmath>
#include <string>

#include "cgrav/error.hpp"

namespace cgrav {

namespace {

// (c^4 - E^2) from the deficit W = c^2 - E.
double c4_minus_e2(double w, double c) { return w * (2.0 * c * c - w); }

// 1 - sqrt(1 - y) without cancellation.
double one_minus_sqrt1m(double y) { return y / (1.0 + std::sqrt(1.0 - y)); }

}  // namespace

ConservedQuantities conserved_quantities(const SpatialState& state, double m10G, double c) {
  const double r = norm(state.x);
  if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "conserved_quantities: |x| = 0");
  const double beta2 = norm2(state.v) / (c * c);
  if (!(beta2 < 1.0)) throw Error(ErrorCode::Domain, "conserved_quantities: |v| >= c");
  const double gamma = 1.0 / std::sqrt(1.0 - beta2);
  const double gamma_minus_1 = gamma * gamma * beta2 / (gamma + 1.0);

  ConservedQuantities q;
  q.M = 2.0 * gamma * cross(state.x, state.v);
  q.energy_deficit = m10G / r - c * c * gamma_minus_1;
  q.E = c * c - q.energy_deficit;
  return q;
}

ConservedQuantities invariants_for_orbit(double a, double e, double m10G, double c) {
  if (!(a > 0.0) || !(e >= 0.0 && e < 1.0) || !(m10G > 0.0))
    throw Error(ErrorCode::Domain, "invariants_for_orbit: need a > 0, 0 <= e < 1, m10G > 0");
  const double c2 = c * c;
  // a W^2 - (2 a c^2 + m) W + m c^2 = 0, small root.
  const double bq = 2.0 * a * c2 + m10G;
  const double w = 2.0 * m10G * c2 / (bq + std::sqrt(bq * bq - 4.0 * a * m10G * c2));
  const double energy = c2 - w;
  const double p = a * (1.0 - e * e);
  const double l = std::sqrt(m10G * m10G + p * m10G * energy) / c;

  ConservedQuantities q;
  q.M = {0.0, 0.0, 2.0 * l};
  q.E = energy;
  q.energy_deficit = w;
  return q;
}

ConservedQuantities invariants_for_planet(const PlanetRecord& planet, double c) {
  const double x = planet.velocity_ratio2(c);
  if (!(4.0 * x < 1.0)) throw Error(ErrorCode::Domain, "invariants_for_planet: 4 omega^2 a^2 / c^2 >= 1");
  const double m10G = sun_mass_from_orbit(planet, c);
  const double s = std::sqrt(1.0 - 4.0 * x);
  // 1 - sqrt(q) with 1 - q = 2x / (1 + s).
  const double one_minus_q = 2.0 * x / (1.0 + s);
  const double w = c * c * one_minus_q / (1.0 + std::sqrt(1.0 - one_minus_q));
  const double energy = c * c - w;
  const double e = planet.eccentricity;
  const double p = planet.semi_major * (1.0 - e * e);
  const double l = std::sqrt(m10G * m10G + p * m10G * energy) / c;

  ConservedQuantities q;
  q.M = {0.0, 0.0, 2.0 * l};
  q.E = energy;
  q.energy_deficit = w;
  return q;
}

OrbitParams orbit_from_invariants(const ConservedQuantities& q, double m10G, double phi0, double c) {
  const double c2 = c * c;
  const double m = m10G;
  const double l = q.angular_momentum();
  const double w = q.energy_deficit;
  const double energy = q.E;

  const double cl2_minus_m2 = c2 * l * l - m * m;
  if (!(cl2_minus_m2 > 0.0))
    throw Error(ErrorCode::UnsupportedOrbit, "inequality c^2 |M|^2 - m10^2 G^2 > 0 is violated");
  if (!(w > 0.0)) throw Error(ErrorCode::UnboundOrbit, "inequality E^2 < c^4 is violated (E >= c^2)");
  if (!(energy > 0.0)) throw Error(ErrorCode::UnsupportedOrbit, "E > 0 is required");
  const double c4e2 = c4_minus_e2(w, c);
  // Equality is the circular orbit; allow rounding noise on that boundary.
  if (!(m * m * c2 - l * l * c4e2 > -1e-12 * m * m * c2))
    throw Error(ErrorCode::UnsupportedOrbit,
                "inequality |M|^2 (E^2 - c^4) + m10^2 G^2 c^2 > 0 is violated");

  OrbitParams o;
  const double me = m * energy;
  o.p = cl2_minus_m2 / me;
  const double e2 = (m * m * c2 * c2 - c2 * l * l * c4e2) / (me * me);  // may be slightly negative
  o.e = std::sqrt(std::max(e2, 0.0));
  const double y = m * m / (c2 * l * l);
  o.gamma_deficit = one_minus_sqrt1m(y);
  o.gamma = std::sqrt(cl2_minus_m2) / (c * l);
  o.phi0 = phi0;
  o.a = me / c4e2;
  o.b = std::sqrt(cl2_minus_m2) / std::sqrt(c4e2);
  o.T = 2.0 * kPi * m * c2 * c / std::pow(c4e2, 1.5);
  o.omega = 2.0 * kPi / o.T;
  return o;
}

double radius_at_angle(const OrbitParams& orbit, double phi) {
  return orbit.p / (1.0 + orbit.e * std::cos(orbit.gamma * (phi - orbit.phi0)));
}

double perihelion_angle(const OrbitParams& orbit, long l) {
  return orbit.phi0 + 2.0 * kPi * static_cast<double>(l) / orbit.gamma;
}

double precession_deficit(const PlanetRecord& planet, PrecessionModel model, double c) {
  const double x = planet.velocity_ratio2(c);
  if (!(4.0 * x < 1.0))
    throw Error(ErrorCode::Domain, "precession coefficient requires omega a < c / 2");
  const double e = planet.eccentricity;
  if (model == PrecessionModel::GeneralRelativity) return 3.0 * x / (1.0 - e * e);
  const double s = std::sqrt(1.0 - 4.0 * x);
  const double delta = 4.0 * x / ((1.0 - e * e) * (1.0 + s) * (1.0 + s));
  // 1 - (1 + delta)^(-1/2)
  const double root = std::sqrt(1.0 + delta);
  return delta / ((1.0 + root) * root);
}

double precession_coefficient(const PlanetRecord& planet, PrecessionModel model, double c) {
  return 1.0 - precession_deficit(planet, model, c);
}

double century_advance(double gamma_deficit, int periods_per_century) {
  if (periods_per_century <= 0) throw Error(ErrorCode::Domain, "century_advance: periods must be positive");
  return gamma_deficit * 360.0 * periods_per_century * 3600.0;
}

double century_advance(const PlanetRecord& planet, PrecessionModel model, int periods_per_century, double c) {
  return century_advance(precession_deficit(planet, model, c), periods_per_century);
}

RadiusTime parametric_state(const PlanetRecord& planet, double tau, double c) {
  const double e = planet.eccentricity;
  const double x = planet.velocity_ratio2(c);
  RadiusTime out;
  out.r = planet.semi_major * (1.0 + e * std::sin(tau));
  out.t = (tau - e * (1.0 - x) * (std::cos(tau) - 1.0)) / planet.mean_frequency;
  return out;
}

double sun_mass_from_orbit(double omega, double a, double c, int sigma) {
  const double x = omega * omega * a * a / (c * c);
  if (!(4.0 * x < 1.0)) throw Error(ErrorCode::Domain, "relativistic third law requires 4 omega^2 a^2 / c^2 < 1");
  const double half = 0.5 * (1.0 + (sigma >= 0 ? 1.0 : -1.0) * std::sqrt(1.0 - 4.0 * x));
  return omega * omega * a * a * a * std::pow(half, -1.5);
}

double sun_mass_from_orbit(const PlanetRecord& planet, double c) {
  return sun_mass_from_orbit(planet.mean_frequency, planet.semi_major, c, +1);
}

double circular_check(double a, double omega, double m10G, double c) {
  const double beta2 = a * a * omega * omega / (c * c);
  return a * a * a * omega * omega / std::sqrt(1.0 - beta2) - m10G;
}

double circular_frequency(double a, double m10G, double c) {
  if (!(a > 0.0) || !(m10G > 0.0)) throw Error(ErrorCode::Domain, "circular_frequency: need a > 0, m10G > 0");
  // y = a^2 omega^2 / c^2 solves k^2 y^2 + y - 1 = 0 with k = a c^2 / m.
  const double k = a * c * c / m10G;
  const double k2 = k * k;
  const double y = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * k2));
  return c * std::sqrt(y) / a;
}

SpatialState perihelion_state(double a, double e, double m10G, double c) {
  const auto q = invariants_for_orbit(a, e, m10G, c);
  const auto orbit = orbit_from_invariants(q, m10G, 0.0, c);
  const double r = orbit.p / (1.0 + orbit.e);
  // At perihelion v is perpendicular to x, so gamma v = L / r.
  const double u = q.angular_momentum() / r;
  const double v = u / std::sqrt(1.0 + u * u / (c * c));
  SpatialState s;
  s.x = {r, 0.0, 0.0};
  s.v = {0.0, v, 0.0};
  return s;
}

}  // namespace cgrav
