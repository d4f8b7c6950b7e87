#pragma once

#include "cgrav/ephemeris.hpp"
#include "cgrav/vec3.hpp"

namespace cgrav {

/// Position and coordinate velocity of a body in the Sun-rest frame.
struct SpatialState {
  double t{};  // s
  Vec3 x;      // m
  Vec3 v;      // m/s
};

/// Integrals of motion of the central-field problem.
///
/// `M` is the literal epsilon-contraction eps_ijl (x^i v^j - x^j v^i) gamma, i.e. twice the
/// conventional angular momentum per unit mass; the orbit formulas use L = |M| / 2.
/// `energy_deficit` is c^2 - E computed without cancellation; every closed form that needs
/// c^4 - E^2 uses W (2 c^2 - W) instead.
struct ConservedQuantities {
  Vec3 M;                   // m^2/s
  double E{};               // m^2/s^2
  double energy_deficit{};  // c^2 - E, m^2/s^2

  double angular_momentum() const { return 0.5 * norm(M); }
};

enum class PrecessionModel { Causal, GeneralRelativity };

struct OrbitParams {
  double p{};              // semi-latus rectum, m
  double e{};              // eccentricity
  double gamma{};          // precession coefficient
  double gamma_deficit{};  // 1 - gamma, kept separately for precision
  double phi0{};           // perihelion angle, rad
  double a{};              // m
  double b{};              // m
  double T{};              // radial period, s
  double omega{};          // 2 pi / T, rad/s
};

struct RadiusTime {
  double r{};  // m
  double t{};  // s
};

ConservedQuantities conserved_quantities(const SpatialState& state, double m10G, double c = kSpeedOfLight);

/// Builds invariants (with M along +z) from an energy deficit and orbit scale; the general inverse of
/// orbit_from_invariants for given a, e.
ConservedQuantities invariants_for_orbit(double a, double e, double m10G, double c = kSpeedOfLight);

/// Invariants of a table row via the relativistic third law and the energy relation of the
/// mean frequency: W / c^2 = 1 - sqrt((1 + s) / 2), s = sqrt(1 - 4 omega^2 a^2 / c^2).
ConservedQuantities invariants_for_planet(const PlanetRecord& planet, double c = kSpeedOfLight);

OrbitParams orbit_from_invariants(const ConservedQuantities& q, double m10G, double phi0,
                                  double c = kSpeedOfLight);

/// r = p / (1 + e cos(gamma (phi - phi0))).
double radius_at_angle(const OrbitParams& orbit, double phi);

/// Unwrapped polar angle of the l-th perihelion passage: phi0 + 2 pi l / gamma.
double perihelion_angle(const OrbitParams& orbit, long l);

/// 1 - gamma. Causal: exact closed form; GeneralRelativity: 3 omega^2 a^2 c^-2 / (1 - e^2).
double precession_deficit(const PlanetRecord& planet, PrecessionModel model, double c = kSpeedOfLight);
double precession_coefficient(const PlanetRecord& planet, PrecessionModel model, double c = kSpeedOfLight);

/// Perihelion advance over `periods_per_century` revolutions, in arcseconds.
double century_advance(const PlanetRecord& planet, PrecessionModel model, int periods_per_century,
                       double c = kSpeedOfLight);
double century_advance(double gamma_deficit, int periods_per_century);

/// Parametric solution normalised to t(tau = 0) = 0:
///   r / a = 1 + e sin tau,  omega t = tau - e (1 - omega^2 a^2 / c^2)(cos tau - 1).
RadiusTime parametric_state(const PlanetRecord& planet, double tau, double c = kSpeedOfLight);

/// m10 G from the relativistic third law for precessing orbits (physical branch sigma = +1).
double sun_mass_from_orbit(const PlanetRecord& planet, double c = kSpeedOfLight);
double sun_mass_from_orbit(double omega, double a, double c, int sigma = +1);

/// (1 - a^2 omega^2 / c^2)^(-1/2) a^3 omega^2 - m10G; zero on a circular orbit.
double circular_check(double a, double omega, double m10G, double c = kSpeedOfLight);

/// Angular velocity of the circular orbit of radius a (root of circular_check).
double circular_frequency(double a, double m10G, double c = kSpeedOfLight);

/// State at perihelion (on +x, moving towards +y) of the orbit with semi-major axis a and eccentricity e.
SpatialState perihelion_state(double a, double e, double m10G, double c = kSpeedOfLight);

}  // namespace cgrav
