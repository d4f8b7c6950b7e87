#pragma once

// Dormand-Prince 5(4) embedded pair; private to the dynamics module.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace cgrav::detail {

template <std::size_t N>
using State = std::array<double, N>;

struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b - b* (5th minus 4th order weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

template <std::size_t N>
struct DopriStep {
  State<N> y;    // 5th-order solution
  State<N> err;  // embedded error estimate
};

/// One trial step; `f(t, y)` returns dy/dt and may throw.
template <std::size_t N, class F>
DopriStep<N> dopri_step(F&& f, double t, const State<N>& y, double h) {
  using T = DopriTableau;
  const State<N> k1 = f(t, y);
  const State<N> k2 = f(t + T::c2 * h, axpy<N>(y, h, {{T::a21, &k1}}));
  const State<N> k3 = f(t + T::c3 * h, axpy<N>(y, h, {{T::a31, &k1}, {T::a32, &k2}}));
  const State<N> k4 = f(t + T::c4 * h, axpy<N>(y, h, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
  const State<N> k5 =
      f(t + T::c5 * h, axpy<N>(y, h, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}));
  const State<N> k6 = f(t + h, axpy<N>(y, h, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4},
                                             {T::a65, &k5}}));
  DopriStep<N> out;
  out.y = axpy<N>(y, h, {{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
  const State<N> k7 = f(t + h, out.y);
  for (std::size_t i = 0; i < N; ++i) {
    out.err[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] +
                      T::e7 * k7[i]);
  }
  return out;
}

/// Error norm over 3-vector blocks: max_b |err_b| / (atol + rtol * max(|y_b|, |ynew_b|)).
template <std::size_t N>
double block_error(const State<N>& y0, const State<N>& y1, const State<N>& err, double rtol, double atol) {
  static_assert(N % 3 == 0);
  double worst = 0.0;
  for (std::size_t b = 0; b < N; b += 3) {
    const double e = std::hypot(err[b], err[b + 1], err[b + 2]);
    const double s0 = std::hypot(y0[b], y0[b + 1], y0[b + 2]);
    const double s1 = std::hypot(y1[b], y1[b + 1], y1[b + 2]);
    worst = std::max(worst, e / (atol + rtol * std::max(s0, s1)));
  }
  return worst;
}

/// Standard step-size update for a 5th-order method.
inline double next_step_factor(double err) {
  if (err == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

}  // namespace cgrav::detail
