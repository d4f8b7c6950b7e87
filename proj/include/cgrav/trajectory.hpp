#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

#include "cgrav/ephemeris.hpp"
#include "cgrav/kepler.hpp"
#include "cgrav/vec3.hpp"

namespace cgrav {

/// Position, velocity and acceleration of the interpolated worldline at one instant.
struct Kinematics {
  Vec3 x;
  Vec3 v;
  Vec3 a;
};

/// Time-ordered samples of a worldline, interpolated by piecewise cubic Hermite
/// polynomials that match position and velocity at every sample (C1 in time).
///
/// Append-only; once shared for reading it must not be modified.
class Trajectory {
 public:
  explicit Trajectory(double c = kSpeedOfLight) : c_(c) {}
  explicit Trajectory(std::vector<SpatialState> samples, double c = kSpeedOfLight);
  Trajectory(std::initializer_list<SpatialState> samples, double c = kSpeedOfLight)
      : Trajectory(std::vector<SpatialState>(samples), c) {}

  /// Throws Error{Validation} unless s.t is later than the last sample and |s.v| < c.
  void append(const SpatialState& s);

  std::span<const SpatialState> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const SpatialState& front() const { return samples_.front(); }
  const SpatialState& back() const { return samples_.back(); }
  const SpatialState& operator[](std::size_t i) const { return samples_[i]; }
  double c() const { return c_; }

  /// Index i of the segment [t_i, t_{i+1}] containing t (the last segment for t == t_end).
  /// Throws Error{InsufficientHistory} outside the sampled span.
  std::size_t segment_index(double t) const;

  Kinematics at(double t) const;
  /// Evaluates segment i's cubic at t; t may lie anywhere, no span check.
  Kinematics on_segment(std::size_t i, double t) const;

  /// Checks |v| < c at interior points of every segment; throws Error{Validation}.
  void validate_interpolant() const;

 private:
  std::vector<SpatialState> samples_;
  double c_;
};

/// CSV with header `t,x,y,z,vx,vy,vz`, SI units, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Throws Error{MalformedConfig} naming the line, Error{Validation} for ordering or |v| >= c.
Trajectory read_trajectory_csv(std::istream& in, double c = kSpeedOfLight);

}  // namespace cgrav
