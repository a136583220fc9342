#ifndef CAVG2_TOOLS_FAULT_INJECTION_HPP
#define CAVG2_TOOLS_FAULT_INJECTION_HPP

// Deliberately broken closed forms for checking that `validate` catches them.

#include "cavg2/analytic.hpp"
#include "cavg2/validation.hpp"

#include <optional>
#include <string_view>

namespace cavg2::faults {

/// The closed form with the sign of B flipped.
inline double g2_b_sign_flipped(const Params& p, double sz) {
  using ld = long double;
  const ld chi = p.chi, dr = p.delta_r, s = sz;
  const ld k2 = (ld(p.kappa1) / 2) * (ld(p.kappa1) / 2);
  const ld A = 2 * chi * chi - 4 * s * chi * dr + 2 * dr * dr;
  const ld B = +4 * chi * dr * (chi * chi + dr * dr);
  const ld num = k2 * k2 + A * k2 + chi * chi * chi * chi + B * s + 6 * chi * chi * dr * dr + dr * dr * dr * dr;
  const ld base = 2 * s * chi * dr - k2 - chi * chi - dr * dr;
  return static_cast<double>(num / (base * base));
}

inline std::optional<validation::G2Function> lookup(std::string_view name) {
  if (name == "b-sign") return validation::G2Function(g2_b_sign_flipped);
  return std::nullopt;
}

}  // namespace cavg2::faults

#endif  // CAVG2_TOOLS_FAULT_INJECTION_HPP
