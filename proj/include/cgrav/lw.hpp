#pragma once

#include <array>

#include "cgrav/trajectory.hpp"
#include "cgrav/vec3.hpp"

namespace cgrav {

/// Space-time point: x0 = c t (m) and spatial position (m).
struct Event {
  double x0{};
  Vec3 x;
};

/// Covariant four-potential A_mu (index down), m^2/s^2.
struct FourPotential {
  std::array<double, 4> A{};
  double operator[](int mu) const { return A[static_cast<std::size_t>(mu)]; }
};

/// Antisymmetric F_{mu nu}; only the six entries above the diagonal are stored.
class FieldStrength {
 public:
  FieldStrength() = default;

  double operator()(int mu, int nu) const {
    if (mu == nu) return 0.0;
    return mu < nu ? upper_[slot(mu, nu)] : -upper_[slot(nu, mu)];
  }
  /// Sets F_{mu nu} (and so F_{nu mu} = -value); mu != nu.
  void set(int mu, int nu, double value) {
    if (mu < nu) upper_[slot(mu, nu)] = value;
    else upper_[slot(nu, mu)] = -value;
  }

 private:
  static std::size_t slot(int lo, int hi) {
    // (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
    static constexpr int base[3] = {0, 3, 5};
    return static_cast<std::size_t>(base[lo] + (hi - lo - 1));
  }
  std::array<double, 6> upper_{};
};

/// A point source: signed coupling (q_j K, or +-m_j G for gravity, m^3/s^2) and its worldline.
struct SourceSpec {
  double strength{};
  Trajectory worldline;
};

struct LwLimits {
  double r_min = 1e-6;             // m; closer evaluations are singular
  double eps_denom_relative = 1e-12;  // denominator floor as a fraction of c |R|
};

/// Root of the light-cone condition x0 - c t' = |x - x_src(t')| and the source state there.
struct RetardedPoint {
  double t{};           // retarded time t', s
  std::size_t segment{};
  Kinematics source;    // interpolated source state at t'
  Vec3 separation;      // x - x_src(t')
  double distance{};    // |separation| = x0 - c t'
};

/// The root's segment is located by bisection over sample times, then refined by safeguarded
/// Newton on that segment's cubic only; samples later than the segment never influence the result.
RetardedPoint solve_retarded(const Event& field_event, const Trajectory& source, const LwLimits& limits = {});

double retarded_time(const Event& field_event, const Trajectory& source, const LwLimits& limits = {});

FourPotential lw_potential(const Event& field_event, const SourceSpec& source, const LwLimits& limits = {});

/// F_{mu nu} = d_mu A_nu - d_nu A_mu evaluated in closed form, including d t' / d x^mu from the
/// light-cone condition.
FieldStrength field_strength(const Event& field_event, const SourceSpec& source, const LwLimits& limits = {});
/// As above; also reports where on the source worldline the field was taken from.
FieldStrength field_strength(const Event& field_event, const SourceSpec& source, const LwLimits& limits,
                             RetardedPoint& where);

/// Default differentiation step: max(1e-6 |x|, 1e-3 m).
double default_fd_step(const Event& field_event);

/// sum_mu eta^{mu mu} d_mu A_mu by central differences; step <= 0 selects default_fd_step.
double gauge_divergence(const Event& field_event, const SourceSpec& source, double step = 0.0,
                        const LwLimits& limits = {});

}  // namespace cgrav
