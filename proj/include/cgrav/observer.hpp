#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "cgrav/ephemeris.hpp"
#include "cgrav/kepler.hpp"
#include "cgrav/vec3.hpp"

namespace cgrav {

enum class LightTime {
  Exact,                 // Earth position at the reception time of the light-cone condition
  NeglectEarthVelocity,  // Earth position at Mercury's emission time
};

std::string_view to_string(LightTime mode);
std::string_view to_string(PrecessionModel model);

struct ObservationScenario {
  double phi1_0 = 0.0;  // Mercury perihelion angle, rad
  double phi3_0 = 0.0;  // Earth perihelion angle, rad
  long l1 = 0;
  long l2 = 415;
  PrecessionModel model = PrecessionModel::Causal;
  LightTime light_time = LightTime::NeglectEarthVelocity;
};

/// Throws Error{Validation} unless l2 > l1 and both angles are finite.
void validate(const ObservationScenario& scenario);

struct AdvanceResult {
  double alpha_rad{};
  double alpha_deg{};
  std::array<double, 2> t1{};            // Mercury perihelion (emission) times, s
  std::array<double, 2> t3{};            // Earth observation times, s
  std::array<double, 2> tau3{};
  std::array<double, 2> earth_radii{};   // r3 / a3
  std::array<double, 2> earth_angles{};  // unwrapped phi3, rad
  std::array<double, 2> mercury_angles{};  // unwrapped phi1, rad
  /// Mercury at l1, Earth at l1, Mercury at l2, Earth at l2 (m).
  std::array<Vec3, 4> positions{};
};

struct PerihelionPair {
  long l1{};
  long l2{};
};

/// Mean-frequency ratio omega1 / omega3 = T3 / T1.
double period_ratio(const PlanetTable& table);

/// Smallest l2 - l1 whose Mercury window [t(l2) - t(l1), t(l2) - t(l1) + T1] contains
/// `centuries` hundred Earth years. l1 = 0.
PerihelionPair select_perihelion_pair(int centuries, const PlanetTable& table);

struct MercuryPerihelion {
  double tau1{};
  double t1{};  // s
  double r1{};  // m
};

MercuryPerihelion mercury_perihelion(long l, const PlanetTable& table);

/// Root of tau - e3 (1 - omega3^2 a3^2 / c^2)(cos tau - 1) = omega3 t.
double earth_param_at_time(double t, const PlanetTable& table);

struct EarthRadiusAngle {
  double r_over_a{};
  double phi{};  // rad, unwrapped so that phi3 - phi3_0 grows monotonically with tau3
};

/// Perihelion sits at tau3 = -pi/2 (mod 2 pi); full revolutions are counted from there.
EarthRadiusAngle earth_radius_angle(double tau3, double phi3_0, const PlanetTable& table, PrecessionModel model);

enum class Body { Mercury, Earth };

/// Mercury's orbit plane is tilted by its inclination about the first axis; Earth's is the reference plane.
Vec3 position3d(Body body, double r, double phi, const PlanetTable& table);

AdvanceResult advance_angle(const ObservationScenario& scenario, const PlanetTable& table);
/// Test hook: skips the l2 > l1 check.
AdvanceResult advance_angle_unchecked(const ObservationScenario& scenario, const PlanetTable& table);

/// alpha_rad[i][j] for (phi1_grid[i], phi3_grid[j]); cells are evaluated on `threads` workers
/// (0 = hardware concurrency). The result does not depend on the worker count.
std::vector<std::vector<double>> advance_sweep(const std::vector<double>& phi1_grid,
                                               const std::vector<double>& phi3_grid,
                                               const ObservationScenario& base, const PlanetTable& table,
                                               unsigned threads = 0);

/// Header `phi1_0_rad,phi3_0_rad,alpha_deg`, one row per cell, 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<double>& phi1_grid, const std::vector<double>& phi3_grid,
                     const std::vector<std::vector<double>>& alpha_rad);

}  // namespace cgrav
