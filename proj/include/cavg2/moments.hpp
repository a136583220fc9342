#ifndef CAVG2_MOMENTS_HPP
#define CAVG2_MOMENTS_HPP

// The closed set of 16 operator moments for the driven dispersive cavity: equations
// of motion, steady-state solve, and fixed-step trajectories.

#include "cavg2/core.hpp"
#include "cavg2/rk4.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <utility>
#include <vector>

namespace cavg2::moments {

/// Time derivatives of every moment. <sz> is conserved (its derivative is zero).
inline MomentVector moment_rhs(const MomentVector& m, const Params& p) {
  using M = Moment;
  const complex i{0.0, 1.0};
  const double dr = p.delta_r;
  const double chi = p.chi;
  const double eps = p.epsilon;
  const double k = p.kappa1;

  MomentVector d;
  d[M::n] = -i * eps * (m[M::ad] - m[M::a]) - k * m[M::n];
  d[M::a] = -i * dr * m[M::a] - i * chi * m[M::sz_a] - i * eps - k / 2 * m[M::a];
  d[M::ad] = i * dr * m[M::ad] + i * chi * m[M::sz_ad] + i * eps - k / 2 * m[M::ad];
  d[M::sz_a] = -i * dr * m[M::sz_a] - i * eps * m[M::sz] - i * chi * m[M::a] - k / 2 * m[M::sz_a];
  d[M::sz_ad] = i * dr * m[M::sz_ad] + i * eps * m[M::sz] + i * chi * m[M::ad] - k / 2 * m[M::sz_ad];
  d[M::sz] = 0.0;
  d[M::ad2_a2] = 2.0 * i * eps * m[M::ad_a2] - 2.0 * i * eps * m[M::ad2_a] - 2.0 * k * m[M::ad2_a2];
  d[M::ad2_a] = i * chi * m[M::ad2_a_sz] + i * dr * m[M::ad2_a] + 2.0 * i * eps * m[M::n] -
                i * eps * m[M::ad2] - 3.0 * k / 2 * m[M::ad2_a];
  d[M::ad_a2] = -i * chi * m[M::ad_a2_sz] - i * dr * m[M::ad_a2] - 2.0 * i * eps * m[M::n] +
                i * eps * m[M::a2] - 3.0 * k / 2 * m[M::ad_a2];
  d[M::ad2_a_sz] = i * chi * m[M::ad2_a] + i * dr * m[M::ad2_a_sz] + 2.0 * i * eps * m[M::ad_a_sz] -
                   i * eps * m[M::ad2_sz] - 3.0 * k / 2 * m[M::ad2_a_sz];
  d[M::ad_a_sz] = -i * eps * (m[M::sz_ad] - m[M::sz_a]) - k * m[M::ad_a_sz];
  d[M::ad2_sz] = 2.0 * i * dr * m[M::ad2_sz] + 2.0 * i * chi * m[M::ad2] + 2.0 * i * eps * m[M::sz_ad] -
                 k * m[M::ad2_sz];
  d[M::ad_a2_sz] = -i * chi * m[M::ad_a2] - i * dr * m[M::ad_a2_sz] - 2.0 * i * eps * m[M::ad_a_sz] +
                   i * eps * m[M::a2_sz] - 3.0 * k / 2 * m[M::ad_a2_sz];
  d[M::a2_sz] = -2.0 * i * dr * m[M::a2_sz] - 2.0 * i * chi * m[M::a2] - 2.0 * i * eps * m[M::sz_a] -
                k * m[M::a2_sz];
  d[M::ad2] = 2.0 * i * dr * m[M::ad2] + 2.0 * i * chi * m[M::ad2_sz] + 2.0 * i * eps * m[M::ad] -
              k * m[M::ad2];
  d[M::a2] = -2.0 * i * dr * m[M::a2] - 2.0 * i * chi * m[M::a2_sz] - 2.0 * i * eps * m[M::a] -
             k * m[M::a2];
  return d;
}

/// Order of the 15 unknowns in the steady-state system: the Moment order with sz removed.
inline constexpr std::array<Moment, kMomentCount - 1> kSteadyStateUnknowns = {
    Moment::n,        Moment::a,       Moment::ad,     Moment::sz_a,     Moment::sz_ad,
    Moment::ad2_a2,   Moment::ad2_a,   Moment::ad_a2,  Moment::ad2_a_sz, Moment::ad_a_sz,
    Moment::ad2_sz,   Moment::ad_a2_sz, Moment::a2_sz, Moment::ad2,      Moment::a2};

using SteadyMatrix = Eigen::Matrix<complex, kMomentCount - 1, kMomentCount - 1>;
using SteadyVector = Eigen::Matrix<complex, kMomentCount - 1, 1>;

/// The affine system d/dt x = A x + b for the 15 unknowns at fixed <sz>.
///
/// moment_rhs is affine in the moments, so the columns of A are read off by probing
/// it with unit vectors.
inline std::pair<SteadyMatrix, SteadyVector> steady_state_system(const Params& p, double sz) {
  const MomentVector origin = MomentVector::vacuum(sz);
  const MomentVector rhs0 = moment_rhs(origin, p);
  SteadyVector b;
  SteadyMatrix A;
  for (std::size_t r = 0; r < kSteadyStateUnknowns.size(); ++r) {
    b(static_cast<Eigen::Index>(r)) = rhs0[kSteadyStateUnknowns[r]];
  }
  for (std::size_t c = 0; c < kSteadyStateUnknowns.size(); ++c) {
    MomentVector probe = origin;
    probe[kSteadyStateUnknowns[c]] = 1.0;
    const MomentVector col = moment_rhs(probe, p);
    for (std::size_t r = 0; r < kSteadyStateUnknowns.size(); ++r) {
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          col[kSteadyStateUnknowns[r]] - b(static_cast<Eigen::Index>(r));
    }
  }
  return {A, b};
}

inline MomentVector steady_state_moments(const Params& p, double sz) {
  validate_params(p);
  if (!std::isfinite(sz) || std::abs(sz) > 1.0) throw ParameterError("<sz> must lie in [-1, 1]");
  const auto [A, b] = steady_state_system(p, sz);
  Eigen::PartialPivLU<SteadyMatrix> lu(A);
  if (!(lu.rcond() > 1e-14)) throw SolverError("no unique steady state");
  SteadyVector x = lu.solve(SteadyVector(-b));
  // One step of iterative refinement.
  x += lu.solve(SteadyVector(-b - A * x));

  MomentVector m = MomentVector::vacuum(sz);
  for (std::size_t r = 0; r < kSteadyStateUnknowns.size(); ++r) {
    m[kSteadyStateUnknowns[r]] = x(static_cast<Eigen::Index>(r));
  }
  return m;
}

/// Default step: 0.01 / max(kappa1, |delta_r| + |chi|, 1).
inline double default_dt(const Params& p) {
  return 0.01 / std::max({p.kappa1, std::abs(p.delta_r) + std::abs(p.chi), 1.0});
}

/// Rejects steps with dt * (|delta_r| + |chi| + kappa1) >= 0.1.
inline void check_step(const Params& p, double dt, double t_final) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ParameterError("t_final must be >= 0");
  if (dt * (std::abs(p.delta_r) + std::abs(p.chi) + p.kappa1) >= 0.1) {
    throw ParameterError("step size too large: need dt * (|delta_r| + |chi| + kappa1) < 0.1");
  }
}

using Trajectory = std::vector<std::pair<double, MomentVector>>;

/// RK4 trajectory; observer(t, m) is called for t = 0 and after every step.
template <typename Observer>
MomentVector evolve_moments(const MomentVector& m0, const Params& p, double t_final, double dt,
                            Observer&& observer) {
  validate_params(p);
  check_step(p, dt, t_final);
  using V = MomentVector::Storage;
  auto f = [&p](double, const V& x) { return moment_rhs(MomentVector{x}, p).values; };
  V final = rk4_integrate(V(m0.values), t_final, dt, f, [&](double t, const V& x) {
    observer(t, MomentVector{x});
  });
  return MomentVector{final};
}

inline Trajectory evolve_moments(const MomentVector& m0, const Params& p, double t_final, double dt) {
  Trajectory out;
  out.reserve(step_count(t_final, dt) + 1);
  evolve_moments(m0, p, t_final, dt, [&](double t, const MomentVector& m) { out.emplace_back(t, m); });
  return out;
}

/// <a+^2 a^2> / <a+ a>^2.
inline double g2_from_moments(const MomentVector& m) {
  const double n = m[Moment::n].real();
  if (!(n > 0.0)) throw ParameterError("g2 undefined: empty cavity");
  return m[Moment::ad2_a2].real() / (n * n);
}

inline double nbar_from_moments(const MomentVector& m) { return m[Moment::n].real(); }

}  // namespace cavg2::moments

#endif  // CAVG2_MOMENTS_HPP
