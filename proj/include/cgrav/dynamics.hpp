#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string_view>

#include "cgrav/kepler.hpp"
#include "cgrav/lw.hpp"
#include "cgrav/trajectory.hpp"

namespace cgrav {

/// How the pre-t0 worldlines of a retarded pair are synthesised.
enum class HistoryBootstrap {
  None,              // histories supplied by the caller must already cover the light-travel span
  StraightLinePast,  // constant-velocity extrapolation backwards; exact for free bodies
  KeplerianPast,     // backward integration in the static field of the partner frozen at t0
};

std::string_view to_string(HistoryBootstrap b);

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-6;  // m for position blocks, m/s for momentum blocks
  double max_step = std::numeric_limits<double>::infinity();  // s
  double initial_step = 0.0;                                  // s; 0 = automatic
  double r_min = 1e3;                                         // collision radius, m
  HistoryBootstrap history_bootstrap = HistoryBootstrap::StraightLinePast;
  double lag_fraction = 0.5;  // retarded pair: step <= lag_fraction * separation / c
  std::size_t max_steps = 20'000'000;
};

/// Throws Error{Validation} for tolerances outside (0, 1e-2) or non-positive max_step.
void validate(const IntegratorConfig& cfg);

enum class RunStatus { Completed, Collision };

struct CentralRun {
  Trajectory trajectory;
  RunStatus status = RunStatus::Completed;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct ConservationReport {
  double max_rel_drift_E = 0.0;
  double max_rel_drift_M = 0.0;
  double fourvel_norm_residual = 0.0;
  /// Drift of c^2 - E relative to its initial value; far more sensitive than the drift of E.
  double max_rel_drift_binding = 0.0;
};

/// d(gamma v)/dt = -m10G x / |x|^3, stepped on (x, u = gamma v) with v = u / sqrt(1 + |u|^2 / c^2).
/// Integrates backwards when t_end < state0.t.
CentralRun integrate_central(const SpatialState& state0, double m10G, double t_end, const IntegratorConfig& cfg = {},
                             double c = kSpeedOfLight);

ConservationReport conservation_report(const Trajectory& trajectory, double m10G);

/// Right-hand side of d(gamma dx^mu/dt)/dt = -eta^{mu mu} c^-1 sum_nu (dx^nu/dt) F_{mu nu}
/// for unit coupling; index 0 is the time component.
std::array<double, 4> lorentz_rhs(const FieldStrength& f, const Vec3& v, double c);

/// Inertial mass parameters m_k G (m^3/s^2, positive). A body's coupling to the partner's field is
/// its SourceSpec strength divided by its inertial mass parameter (+-1 for gravity).
struct PairMasses {
  double a{};
  double b{};
};

struct PairRun {
  Trajectory a;
  Trajectory b;
  RunStatus status = RunStatus::Completed;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t field_evaluations = 0;
  /// max over field evaluations of (retarded time - latest partner sample time); <= 0 means no
  /// evaluation ever needed partner data that had not been integrated yet.
  double max_retarded_lead = -std::numeric_limits<double>::infinity();
  /// max over evaluations of (end of interpolation segment - retarded time) / segment width; <= 1.
  double max_stencil_fraction = 0.0;
  double min_light_delay = std::numeric_limits<double>::infinity();  // s
};

/// Two bodies under each other's retarded Lienard-Wiechert field. Each worldline's last sample is
/// its initial state; earlier samples (if any) are its past history.
PairRun integrate_retarded_pair(const SourceSpec& a, const SourceSpec& b, const PairMasses& masses, double t_end,
                                const IntegratorConfig& cfg = {});

}  // namespace cgrav
