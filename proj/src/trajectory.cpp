#include "cgrav/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "cgrav/error.hpp"

namespace cgrav {

namespace {

void check_sample(const SpatialState& s, double c, std::size_t index) {
  if (!std::isfinite(s.t) || !is_finite(s.x) || !is_finite(s.v))
    throw Error(ErrorCode::Validation, "trajectory sample " + std::to_string(index) + " is not finite");
  if (!(norm(s.v) < c))
    throw Error(ErrorCode::Validation, "trajectory sample " + std::to_string(index) + " has |v| >= c");
}

}  // namespace

Trajectory::Trajectory(std::vector<SpatialState> samples, double c) : c_(c) {
  samples_.reserve(samples.size());
  for (const auto& s : samples) append(s);
}

void Trajectory::append(const SpatialState& s) {
  check_sample(s, c_, samples_.size());
  if (!samples_.empty() && !(s.t > samples_.back().t))
    throw Error(ErrorCode::Validation,
                "trajectory times must be strictly increasing (sample " + std::to_string(samples_.size()) + ")");
  samples_.push_back(s);
}

std::size_t Trajectory::segment_index(double t) const {
  if (samples_.empty()) throw Error(ErrorCode::InsufficientHistory, "trajectory is empty");
  if (t < samples_.front().t || t > samples_.back().t)
    throw Error(ErrorCode::InsufficientHistory, "time " + std::to_string(t) + " s is outside the sampled span");
  if (samples_.size() == 1) return 0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double value, const SpatialState& s) { return value < s.t; });
  const auto i = static_cast<std::size_t>(it - samples_.begin());
  return std::min(i == 0 ? 0 : i - 1, samples_.size() - 2);
}

Kinematics Trajectory::on_segment(std::size_t i, double t) const {
  const auto& p = samples_[i];
  if (samples_.size() == 1) return {p.x, p.v, {}};
  const auto& q = samples_[i + 1];
  const double h = q.t - p.t;
  const double s = (t - p.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const Vec3 dp = q.x - p.x;

  // Hermite basis relative to p.x (h00 + h01 = 1).
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = -6.0 * s2 + 6.0 * s;
  const double d11 = 3.0 * s2 - 2.0 * s;
  const double dd10 = 6.0 * s - 4.0;
  const double dd01 = -12.0 * s + 6.0;
  const double dd11 = 6.0 * s - 2.0;

  Kinematics k;
  k.x = p.x + (h * h10) * p.v + h01 * dp + (h * h11) * q.v;
  k.v = d10 * p.v + (d01 / h) * dp + d11 * q.v;
  k.a = (dd10 / h) * p.v + (dd01 / (h * h)) * dp + (dd11 / h) * q.v;
  return k;
}

Kinematics Trajectory::at(double t) const { return on_segment(segment_index(t), t); }

void Trajectory::validate_interpolant() const {
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    const double t0 = samples_[i].t;
    const double h = samples_[i + 1].t - t0;
    for (double s : {0.25, 0.5, 0.75}) {
      if (!(norm(on_segment(i, t0 + s * h).v) < c_))
        throw Error(ErrorCode::Validation,
                    "interpolated speed reaches c inside segment " + std::to_string(i));
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,x,y,z,vx,vy,vz\n";
  char buf[512];
  for (const auto& s : trajectory.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x.x, s.x.y, s.x.z,
                  s.v.x, s.v.y, s.v.z);
    out << buf;
  }
}

Trajectory read_trajectory_csv(std::istream& in, double c) {
  std::string line;
  int line_no = 0;
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::MalformedConfig, "trajectory csv line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) {
    line_no = 1;
    bad("missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y,z,vx,vy,vz") bad("expected header 't,x,y,z,vx,vy,vz'");

  Trajectory traj(c);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 7> f{};
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t k = 0; k < f.size(); ++k) {
      while (cur < end && *cur == ' ') ++cur;
      auto [ptr, ec] = std::from_chars(cur, end, f[k]);
      if (ec != std::errc{}) bad("field " + std::to_string(k + 1) + " is not a number");
      cur = ptr;
      if (k + 1 < f.size()) {
        if (cur >= end || *cur != ',') bad("expected 7 comma-separated fields");
        ++cur;
      }
    }
    if (cur != end) bad("trailing characters");
    try {
      traj.append({f[0], {f[1], f[2], f[3]}, {f[4], f[5], f[6]}});
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  traj.validate_interpolant();
  return traj;
}

}  // namespace cgrav
