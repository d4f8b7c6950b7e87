#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cgrav/error.hpp"
#include "cgrav/trajectory.hpp"

using namespace cgrav;

namespace {

Trajectory circle(double radius, double omega, int n, double dt) {
  Trajectory t;
  for (int i = 0; i < n; ++i) {
    const double time = i * dt;
    const double ph = omega * time;
    t.append({time,
              {radius * std::cos(ph), radius * std::sin(ph), 0.0},
              {-radius * omega * std::sin(ph), radius * omega * std::cos(ph), 0.0}});
  }
  return t;
}

}  // namespace

TEST(Trajectory, LinearMotionIsReproducedExactly) {
  const Vec3 x0{1e9, -2e8, 3e7}, v{3e4, 1e4, -5e3};
  Trajectory t({{-100.0, x0 - 100.0 * v, v}, {0.0, x0, v}, {250.0, x0 + 250.0 * v, v}});
  for (double s : {-100.0, -37.5, 0.0, 12.25, 249.0}) {
    const auto k = t.at(s);
    const Vec3 expect = x0 + s * v;
    EXPECT_NEAR(norm(k.x - expect), 0.0, 1e-6);
    EXPECT_NEAR(norm(k.v - v), 0.0, 1e-9);
    EXPECT_NEAR(norm(k.a), 0.0, 1e-9);
  }
}

TEST(Trajectory, HermiteMatchesNodesAndConvergesAtFourthOrder) {
  const double r = 1.5e11, w = 2e-7;
  auto err_for = [&](double dt) {
    auto tr = circle(r, w, static_cast<int>(4e5 / dt) + 2, dt);
    double worst = 0.0;
    for (double s = 0.0; s < 4e5; s += 977.0) {
      const auto k = tr.at(s);
      worst = std::max(worst, std::abs(norm(k.x) - r));
    }
    return worst;
  };
  const double e1 = err_for(2e4), e2 = err_for(1e4);
  EXPECT_GT(e1 / e2, 12.0);  // cubic Hermite: O(h^4)
  auto tr = circle(r, w, 5, 1e4);
  EXPECT_EQ(tr.at(2e4).x, tr[2].x);
  EXPECT_EQ(tr.at(2e4).v, tr[2].v);
}

TEST(Trajectory, AccelerationIsSecondDerivativeOfInterpolant) {
  auto tr = circle(1e11, 1e-6, 50, 1e3);
  const double t = 12345.0, h = 1.0;
  const Vec3 fd = (tr.at(t + h).v - tr.at(t - h).v) / (2.0 * h);
  EXPECT_NEAR(norm(fd - tr.at(t).a) / norm(tr.at(t).a), 0.0, 1e-6);
  EXPECT_NEAR(norm(tr.at(t).a) / (1e11 * 1e-12), 1.0, 1e-3);
}

TEST(Trajectory, SegmentIndexAndBounds) {
  Trajectory t({{0.0, {}, {}}, {1.0, {}, {}}, {3.0, {}, {}}});
  EXPECT_EQ(t.segment_index(0.0), 0u);
  EXPECT_EQ(t.segment_index(0.999), 0u);
  EXPECT_EQ(t.segment_index(1.0), 1u);
  EXPECT_EQ(t.segment_index(3.0), 1u);
  EXPECT_THROW(t.segment_index(-1e-9), Error);
  EXPECT_THROW(t.at(3.0 + 1e-9), Error);
  try {
    t.at(4.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
  }
}

TEST(Trajectory, SingleSampleIsConstant) {
  Trajectory t({{5.0, {1, 2, 3}, {4, 5, 6}}});
  EXPECT_EQ(t.at(5.0).x, (Vec3{1, 2, 3}));
  EXPECT_EQ(t.segment_index(5.0), 0u);
}

TEST(Trajectory, AppendValidates) {
  Trajectory t;
  t.append({0.0, {}, {}});
  EXPECT_THROW(t.append({0.0, {}, {}}), Error);
  EXPECT_THROW(t.append({-1.0, {}, {}}), Error);
  EXPECT_THROW(t.append({1.0, {}, {kSpeedOfLight, 0, 0}}), Error);
  EXPECT_THROW(t.append({1.0, {std::nan(""), 0, 0}, {}}), Error);
  EXPECT_EQ(t.size(), 1u);
  t.append({1.0, {}, {0.5 * kSpeedOfLight, 0, 0}});
  EXPECT_EQ(t.size(), 2u);
}

TEST(Trajectory, CsvRoundTripIsBitExact) {
  auto tr = circle(5.791e10, 8.26e-7, 20, 3.3e4);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back[i].t, tr[i].t);
    EXPECT_EQ(back[i].x, tr[i].x);
    EXPECT_EQ(back[i].v, tr[i].v);
  }
}

TEST(Trajectory, CsvErrorsNameTheLine) {
  auto code_and_msg = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_trajectory_csv(in);
    } catch (const Error& e) {
      return std::make_pair(e.code(), std::string(e.what()));
    }
    return std::make_pair(ErrorCode::Domain, std::string("no error"));
  };
  auto [c1, m1] = code_and_msg("t,x,y\n");
  EXPECT_EQ(c1, ErrorCode::MalformedConfig);
  auto [c2, m2] = code_and_msg("t,x,y,z,vx,vy,vz\n0,0,0,0,0,0,0\n1,0,0,zz,0,0,0\n");
  EXPECT_EQ(c2, ErrorCode::MalformedConfig);
  EXPECT_NE(m2.find("line 3"), std::string::npos) << m2;
  auto [c3, m3] = code_and_msg("t,x,y,z,vx,vy,vz\n1,0,0,0,0,0,0\n0,0,0,0,0,0,0\n");
  EXPECT_EQ(c3, ErrorCode::Validation);
  EXPECT_NE(m3.find("line 3"), std::string::npos) << m3;
  auto [c4, m4] = code_and_msg("t,x,y,z,vx,vy,vz\n0,0,0,0,0,0\n");
  EXPECT_EQ(c4, ErrorCode::MalformedConfig);
}

TEST(Trajectory, InterpolantSpeedCheck) {
  const double c = 10.0;
  // Endpoints sub-luminal but the cubic overshoots between them.
  Trajectory t({{0.0, {0, 0, 0}, {9.0, 0, 0}}, {1.0, {10, 0, 0}, {9.0, 0, 0}}}, c);
  EXPECT_THROW(t.validate_interpolant(), Error);
  Trajectory ok({{0.0, {0, 0, 0}, {1.0, 0, 0}}, {1.0, {1, 0, 0}, {1.0, 0, 0}}}, c);
  EXPECT_NO_THROW(ok.validate_interpolant());
}
