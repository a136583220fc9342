#ifndef CAVG2_ANALYTIC_HPP
#define CAVG2_ANALYTIC_HPP

// Closed-form photon statistics of a driven cavity dispersively coupled to one
// atom, the concurrence estimate built on it, and atomic-decay bookkeeping.

#include "cavg2/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace cavg2::analytic {

/// chi = g^2 / Delta.
inline double dispersive_chi(double g, double Delta) {
  if (Delta == 0.0) throw ParameterError("dispersive limit undefined: Delta = 0");
  return g * g / Delta;
}

/// (chi, delta_r) from lab-frame frequencies.
struct DerivedCoupling {
  double chi;
  double delta_r;
};

inline DerivedCoupling derive_coupling(const RawFrequencies& raw) {
  if (auto why = raw_frequencies_violation(raw)) throw ParameterError(*why);
  return {dispersive_chi(raw.g, raw.Delta), raw.omega_c1 - raw.omega_d};
}

inline void check_sz(double sz) {
  if (!std::isfinite(sz) || std::abs(sz) > 1.0) throw ParameterError("<sz> must lie in [-1, 1]");
}

namespace detail {

// Numerator and denominator exactly as grouped in the closed form. Loses digits
// near sz -> 1, delta_r -> chi, where the numerator cancels from O(chi^4) down to
// O(kappa^4); kept as the reference transcription.
template <typename Real>
Real g2_closed_form(Real chi, Real kappa1, Real delta_r, Real sz) {
  const Real k2 = (kappa1 / 2) * (kappa1 / 2);
  const Real A = 2 * chi * chi - 4 * sz * chi * delta_r + 2 * delta_r * delta_r;
  const Real B = -4 * chi * delta_r * (chi * chi + delta_r * delta_r);
  const Real numerator = k2 * k2 + A * k2 + chi * chi * chi * chi + B * sz +
                         6 * chi * chi * delta_r * delta_r +
                         delta_r * delta_r * delta_r * delta_r;
  const Real base = 2 * sz * chi * delta_r - k2 - chi * chi - delta_r * delta_r;
  return numerator / (base * base);
}

// The same rational function regrouped over d_pm = (delta_r +/- chi)^2 + k2:
//   numerator = ((1 + sz) d_m^2 + (1 - sz) d_p^2) / 2
//   -base     = ((1 + sz) d_m   + (1 - sz) d_p) / 2
// Every term is non-negative, so nothing cancels.
template <typename Real>
Real g2_closed_form_stable(Real chi, Real kappa1, Real delta_r, Real sz) {
  const Real k2 = (kappa1 / 2) * (kappa1 / 2);
  const Real d_p = (delta_r + chi) * (delta_r + chi) + k2;
  const Real d_m = (delta_r - chi) * (delta_r - chi) + k2;
  const Real w_p = 1 + sz;
  const Real w_m = 1 - sz;
  const Real numerator = (w_m * d_p * d_p + w_p * d_m * d_m) / 2;
  const Real base = (w_m * d_p + w_p * d_m) / 2;
  return numerator / (base * base);
}

}  // namespace detail

/// Steady-state g2(0) of cavity 1 for atom-1 inversion sz. Independent of epsilon.
inline double g2_exact(const Params& p, double sz) {
  validate_params(p);
  check_sz(sz);
  return detail::g2_closed_form_stable(p.chi, p.kappa1, p.delta_r, sz);
}

/// Mean photon number of the coherent state in the sz = sector (+1 or -1) subspace.
inline double sector_population(const Params& p, int sector) {
  const double detuning = p.delta_r + sector * p.chi;
  const double half_kappa = p.kappa1 / 2.0;
  return p.epsilon * p.epsilon / (detuning * detuning + half_kappa * half_kappa);
}

/// Mean photon number of the two-sector mixture.
inline double mixture_nbar(const Params& p, double sz) {
  const double p_plus = (1.0 + sz) / 2.0;
  const double p_minus = (1.0 - sz) / 2.0;
  return p_plus * sector_population(p, +1) + p_minus * sector_population(p, -1);
}

/// g2 of a mixture of two coherent states, one per conserved sz sector.
///
/// With no atomic decay sz is conserved, and in each sector the cavity is a driven
/// damped oscillator at detuning delta_r +/- chi. Populations are epsilon-scaled,
/// so epsilon is taken as 1 internally; it cancels in the ratio.
inline double g2_mixture(const Params& p, double sz) {
  validate_params(p);
  check_sz(sz);
  const Params unit = p.with_epsilon(1.0);
  const double n_plus = sector_population(unit, +1);
  const double n_minus = sector_population(unit, -1);
  const double p_plus = (1.0 + sz) / 2.0;
  const double p_minus = (1.0 - sz) / 2.0;
  const double first = p_plus * n_plus + p_minus * n_minus;
  if (!(first > 0.0)) throw SolverError("both sector populations are zero");
  const double second = p_plus * n_plus * n_plus + p_minus * n_minus * n_minus;
  return second / (first * first);
}

/// Large-coupling peak values: branch +1 is delta_r = +chi, giving 2 / (1 - sz);
/// branch -1 is delta_r = -chi, giving 2 / (1 + sz).
inline double g2_peak_approx(double sz, int branch) {
  check_sz(sz);
  if (branch != 1 && branch != -1) throw ParameterError("branch must be +1 or -1");
  const double denom = 1.0 - branch * sz;
  if (denom == 0.0) throw ParameterError("approximation invalid; use g2_exact");
  return 2.0 / denom;
}

struct ConcurrenceEstimate {
  double c_raw;
  double c_clamped;
};

/// C = 2 / sqrt(g2(+chi) g2(-chi)).
inline ConcurrenceEstimate concurrence_from_g2(double g2_plus, double g2_minus) {
  if (!(g2_plus > 0.0) || !(g2_minus > 0.0) || !std::isfinite(g2_plus) ||
      !std::isfinite(g2_minus)) {
    throw ParameterError("g2 values must be positive and finite");
  }
  const double c_raw = 2.0 / std::sqrt(g2_plus * g2_minus);
  return {c_raw, std::clamp(c_raw, 0.0, 1.0)};
}

inline double wootters_concurrence(const BellLikeState& s) {
  return 2.0 * std::abs(s.c0() * s.c1());
}

/// <sz> of atom 1 in the reduced state.
inline double sigma_z_of_state(const BellLikeState& s) {
  const double w0 = std::norm(s.c0());
  const double w1 = std::norm(s.c1());
  // Psi: c1 multiplies |e1 e2>; Phi: c0 multiplies |e1 g2>.
  return s.family() == BellFamily::Psi ? w1 - w0 : w0 - w1;
}

/// <sz(t)> = exp(-gamma1 t) (<sz(0)> + 1) - 1, written with expm1 so that gamma1 t = 0
/// returns sz0 exactly.
inline double sigma_z_decay(double sz0, double gamma1, double t) {
  check_sz(sz0);
  if (!(gamma1 >= 0.0) || !(t >= 0.0)) throw ParameterError("gamma1 and t must be non-negative");
  return sz0 + std::expm1(-gamma1 * t) * (sz0 + 1.0);
}

// ---------------------------------------------------------------------------
// Peak finding

struct DetuningGrid {
  double lo = -40.0;
  double hi = 40.0;
  std::size_t count = 801;
};

struct Peak {
  double delta_r;
  double g2;
};

struct PeakPair {
  Peak plus;   ///< the maximum nearest delta_r = +chi
  Peak minus;  ///< the maximum nearest delta_r = -chi
};

class PeaksUnresolved : public SolverError {
public:
  PeaksUnresolved(const std::string& what, std::optional<Peak> single)
      : SolverError(what), single_(single) {}
  [[nodiscard]] const std::optional<Peak>& single_maximum() const { return single_; }

private:
  std::optional<Peak> single_;
};

namespace detail {

// Golden-section maximization of f on [a, b].
template <typename F>
Peak golden_maximize(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace detail

/// Locates the two largest local maxima of g2_exact over delta_r, refined to 1e-3 MHz.
inline PeakPair find_peaks(const Params& p, double sz, const DetuningGrid& grid,
                           double tol = 1e-3) {
  validate_params(p);
  check_sz(sz);
  if (grid.count < 3 || !(grid.hi > grid.lo)) throw ParameterError("grid needs >= 3 points");

  auto g2_at = [&](double d) { return g2_exact(p.with_delta_r(d), sz); };
  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.count - 1);
  std::vector<double> values(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) values[i] = g2_at(grid.lo + step * i);

  // Flat stretches (g2 = 1 to rounding) are not maxima.
  constexpr double kProminence = 1e-9;
  std::vector<Peak> maxima;
  for (std::size_t i = 1; i + 1 < grid.count; ++i) {
    if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] - 1.0 > kProminence) {
      const double lo = grid.lo + step * (i - 1);
      maxima.push_back(detail::golden_maximize(g2_at, lo, lo + 2.0 * step, tol));
    }
  }
  std::sort(maxima.begin(), maxima.end(), [](const Peak& x, const Peak& y) { return x.g2 > y.g2; });

  if (maxima.size() < 2) {
    std::optional<Peak> single;
    if (!maxima.empty()) single = maxima.front();
    throw PeaksUnresolved("peaks unresolved", single);
  }
  // Order by position along the sign of chi: +chi lies further in that direction.
  Peak first = maxima[0];
  Peak second = maxima[1];
  const double orientation = p.chi >= 0.0 ? 1.0 : -1.0;
  if (orientation * first.delta_r < orientation * second.delta_r) std::swap(first, second);
  return {first, second};
}

}  // namespace cavg2::analytic

#endif  // CAVG2_ANALYTIC_HPP
