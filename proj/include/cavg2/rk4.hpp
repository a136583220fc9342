#ifndef CAVG2_RK4_HPP
#define CAVG2_RK4_HPP

#include <cmath>
#include <cstddef>
#include <utility>

namespace cavg2 {

/// One classical fourth-order Runge-Kutta step for dx/dt = f(t, x).
///
/// State needs copy, addition and scalar multiplication (Eigen vectors and matrices qualify).
template <typename State, typename Rhs>
State rk4_step(const State& x, double t, double dt, Rhs&& f) {
  const double half = dt / 2.0;
  State k1 = f(t, x);
  State k2 = f(t + half, State(x + half * k1));
  State k3 = f(t + half, State(x + half * k2));
  State k4 = f(t + dt, State(x + dt * k3));
  return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Number of equal steps of size <= dt covering [0, t_final].
inline std::size_t step_count(double t_final, double dt) {
  if (t_final <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

/// Fixed-step integration from 0 to t_final; observer(t, x) sees the initial state and
/// every step.
template <typename State, typename Rhs, typename Observer>
State rk4_integrate(State x, double t_final, double dt, Rhs&& f, Observer&& observer) {
  const std::size_t n = step_count(t_final, dt);
  const double h = n == 0 ? 0.0 : t_final / static_cast<double>(n);
  observer(0.0, std::as_const(x));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = h * static_cast<double>(i);
    x = rk4_step(x, t, h, f);
    observer(h * static_cast<double>(i + 1), std::as_const(x));
  }
  return x;
}

}  // namespace cavg2

#endif  // CAVG2_RK4_HPP
