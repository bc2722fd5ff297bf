#pragma once

// Dormand-Prince 5(4) embedded pair, single step.
//
// J. R. Dormand, P. J. Prince, "A family of embedded Runge-Kutta formulae",
// J. Comp. Appl. Math. 6 (1980).  The fifth-order solution is propagated; the
// difference to the fourth-order companion is the local error estimate.  The
// last stage is evaluated at the new point, so it doubles as the next step's
// first stage (FSAL).

#include <array>
#include <cstddef>

namespace ahgeom::dopri {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  State<N> y;      // fifth-order solution at t + h
  State<N> error;  // y5 - y4
  State<N> dydt;   // f(t + h, y), reusable as the next first stage
};

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace tableau

/// One step of size h from (t, y) given k1 = f(t, y).
///
/// `f` has signature State<N>(double t, const State<N>& y) and may throw; the
/// exception propagates to the caller, which treats it as a rejected step.
template <std::size_t N, typename F>
StepResult<N> step(F&& f, double t, const State<N>& y, const State<N>& k1, double h) {
  using namespace tableau;
  State<N> tmp{};
  auto stage = [&](auto&& combine) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * combine(i);
    return tmp;
  };

  const State<N> k2 = f(t + c2 * h, stage([&](std::size_t i) { return a21 * k1[i]; }));
  const State<N> k3 =
      f(t + c3 * h, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }));
  const State<N> k4 = f(t + c4 * h, stage([&](std::size_t i) {
                          return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                        }));
  const State<N> k5 = f(t + c5 * h, stage([&](std::size_t i) {
                          return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                        }));
  const State<N> k6 = f(t + h, stage([&](std::size_t i) {
                          return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i];
                        }));

  StepResult<N> out;
  out.y = stage([&](std::size_t i) {
    return b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i];
  });
  out.dydt = f(t + h, out.y);
  for (std::size_t i = 0; i < N; ++i) {
    out.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * out.dydt[i]);
  }
  return out;
}

}  // namespace ahgeom::dopri
