#ifndef CAVG2_VALIDATION_HPP
#define CAVG2_VALIDATION_HPP

// Cross-method validation suites: the closed form against the coherent-mixture
// oracle, the moment solver, and brute-force master-equation evolution.

#include "cavg2/analytic.hpp"
#include "cavg2/core.hpp"
#include "cavg2/lindblad.hpp"
#include "cavg2/moments.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cavg2::validation {

using G2Function = std::function<double(const Params&, double)>;

struct GridPoint {
  Params params;
  double sz = 0.0;
};

/// chi in [-50, 50], kappa1 in (0, 10], delta_r in [-100, 100], sz in [-1, 1], epsilon in (0, 1].
inline std::vector<GridPoint> random_grid(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GridPoint> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GridPoint g;
    g.params.chi = -50.0 + 100.0 * unit(rng);
    g.params.kappa1 = 10.0 * (1.0 - unit(rng));
    g.params.delta_r = -100.0 + 200.0 * unit(rng);
    g.params.epsilon = 1.0 - unit(rng);
    g.params.gamma1 = 0.0;
    g.sz = -1.0 + 2.0 * unit(rng);
    grid.push_back(g);
  }
  return grid;
}

inline std::string describe(const Params& p, double sz) {
  std::ostringstream os;
  os.precision(17);
  os << "chi=" << p.chi << " kappa1=" << p.kappa1 << " epsilon=" << p.epsilon
     << " delta_r=" << p.delta_r << " sz=" << sz;
  return os.str();
}

struct SuiteResult {
  std::string name;
  std::size_t points = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string worst_point;

  [[nodiscard]] bool passed() const { return max_deviation <= tolerance; }

  void record(double deviation, const std::string& where) {
    ++points;
    if (!(deviation <= max_deviation)) {  // NaN counts as worst
      max_deviation = std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation;
      worst_point = where;
    }
  }
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::vector<SuiteResult> suites;

  [[nodiscard]] bool passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
  }
};

/// Fixed points for the trajectory closure check: two at the figure parameters and
/// one with about one photon in the resonant sector.
inline std::vector<GridPoint> closure_points() {
  return {
      {{15.0, 1.0, 0.0, 0.1, 15.0}, 0.0},
      {{15.0, 1.0, 0.0, 0.1, -15.0}, 1.0 / 3.0},
      {{5.0, 2.0, 0.0, 1.0, -5.0}, -0.5},
  };
}

inline std::vector<BellLikeState> example_states() {
  const double h = 1.0 / std::sqrt(2.0);
  return {BellLikeState::psi(h, h), BellLikeState::phi(std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0))};
}

/// Max |moment difference| between the moment ODE and the master equation, both
/// from vacuum, over t in [0, 20 / kappa1].
inline double closure_deviation(const GridPoint& pt, int fock_cutoff = 12) {
  lindblad::LiouvillianSpec spec;
  spec.params = pt.params;
  spec.fock_cutoff = fock_cutoff;
  const double t_final = 20.0 / pt.params.kappa1;
  const double dt = moments::default_dt(pt.params);

  std::vector<MomentVector> from_moments;
  moments::evolve_moments(MomentVector::vacuum(pt.sz), pt.params, t_final, dt,
                          [&](double, const MomentVector& m) { from_moments.push_back(m); });
  double worst = 0.0;
  std::size_t k = 0;
  const DensityOperator rho0 = lindblad::initial_density(spec, lindblad::AtomDiagonal::from_sigma_z(pt.sz));
  lindblad::evolve_density(rho0, spec, t_final, dt, [&](double, const Eigen::MatrixXcd& rho) {
    const MomentVector m =
        lindblad::moments_from_density(DensityOperator(spec.atom_dim(), spec.fock_cutoff, rho), spec);
    worst = std::max(worst, (m.values - from_moments.at(k++).values).cwiseAbs().maxCoeff());
  });
  return worst;
}

struct ValidationOptions {
  std::uint64_t seed = 20221015;
  std::size_t grid_size = 10000;
  G2Function g2 = [](const Params& p, double sz) { return analytic::g2_exact(p, sz); };
  int fock_cutoff = 12;
};

inline ValidationReport run_validation(const ValidationOptions& opts) {
  ValidationReport report;
  report.seed = opts.seed;
  report.grid_size = opts.grid_size;
  const auto grid = random_grid(opts.seed, opts.grid_size);

  SuiteResult oracle{"oracle_identity", 0, 0.0, 1e-10, {}};
  SuiteResult lower{"g2_at_least_one", 0, 0.0, 1e-12, {}};
  SuiteResult symmetry{"detuning_inversion_symmetry", 0, 0.0, 1e-10, {}};
  SuiteResult eps_inv{"epsilon_invariance", 0, 0.0, 1e-9, {}};
  SuiteResult moments_vs{"moments_vs_exact", 0, 0.0, 1e-9, {}};

  for (const auto& pt : grid) {
    const std::string where = describe(pt.params, pt.sz);
    const double exact = opts.g2(pt.params, pt.sz);
    const double mix = analytic::g2_mixture(pt.params, pt.sz);
    oracle.record(std::abs(exact - mix) / mix, where);
    lower.record(std::max(0.0, 1.0 - exact), where);

    Params mirrored = pt.params.with_delta_r(-pt.params.delta_r);
    symmetry.record(std::abs(exact - opts.g2(mirrored, -pt.sz)) / exact, where);

    const double from_moments = moments::g2_from_moments(moments::steady_state_moments(pt.params, pt.sz));
    moments_vs.record(std::abs(from_moments - exact) / exact, where);

    // Two decades of drive strength around the drawn epsilon.
    double spread = 0.0;
    for (double scale : {0.1, 10.0}) {
      const Params p = pt.params.with_epsilon(pt.params.epsilon * scale);
      spread = std::max(spread, std::abs(moments::g2_from_moments(moments::steady_state_moments(p, pt.sz)) -
                                         from_moments) / from_moments);
    }
    eps_inv.record(spread, where);
  }

  // Brute-force suites use a few fixed points, capped by the grid size.
  SuiteResult closure{"moments_vs_lindblad_trajectory", 0, 0.0, 1e-6, {}};
  const auto cpoints = closure_points();
  for (std::size_t i = 0; i < std::min(opts.grid_size, cpoints.size()); ++i) {
    closure.record(closure_deviation(cpoints[i], opts.fock_cutoff), describe(cpoints[i].params, cpoints[i].sz));
  }

  SuiteResult steady{"lindblad_vs_exact", 0, 0.0, 1e-3, {}};
  SuiteResult location{"location_independence", 0, 0.0, 1e-6, {}};
  SuiteResult density_bounds{"density_operator_bounds", 0, 0.0, 0.0, {}};
  const auto states = example_states();
  const std::size_t n_states = std::min(opts.grid_size, states.size());
  for (std::size_t i = 0; i < n_states; ++i) {
    const BellLikeState& s = states[i];
    const double sz = analytic::sigma_z_of_state(s);
    for (double sign : {1.0, -1.0}) {
      const Params p = lindblad::with_default_drive(Params{15.0, 1.0, 0.0, 0.1, sign * 15.0});
      const std::string where = describe(p, sz) + " state=" + std::string(to_string(s.family()));

      lindblad::LiouvillianSpec single;
      single.params = p;
      single.fock_cutoff = opts.fock_cutoff;
      const DensityOperator rho_single =
          lindblad::steady_state_density(single, lindblad::AtomDiagonal::from_sigma_z(sz));
      const double g2_single = lindblad::g2_from_density(rho_single);

      lindblad::LiouvillianSpec joint = single;
      joint.atom_mode = lindblad::AtomMode::joint;
      const DensityOperator rho_joint = lindblad::steady_state_density(joint, s);
      const double g2_joint = lindblad::g2_from_density(rho_joint);

      const double exact = opts.g2(p, sz);
      steady.record(std::abs(g2_single - exact) / exact, where);
      location.record(std::abs(g2_joint - g2_single), where);
      density_bounds.record(density_violation(rho_single) || density_violation(rho_joint) ? 1.0 : 0.0, where);
    }
  }

  for (SuiteResult* s : {&oracle, &lower, &symmetry, &eps_inv, &moments_vs, &closure, &steady, &location,
                         &density_bounds}) {
    if (s->points > 0) report.suites.push_back(*s);
  }
  return report;
}

}  // namespace cavg2::validation

#endif  // CAVG2_VALIDATION_HPP
