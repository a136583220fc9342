#ifndef CAVG2_PIPELINE_HPP
#define CAVG2_PIPELINE_HPP

// Method dispatch, detuning sweeps, and the g2 -> concurrence measurement.

#include "cavg2/analytic.hpp"
#include "cavg2/core.hpp"
#include "cavg2/lindblad.hpp"
#include "cavg2/moments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace cavg2 {

struct MethodOptions {
  int fock_cutoff = 12;  ///< Lindblad truncation
};

/// g2 and nbar at one detuning for an atom with inversion sz.
///
/// The Lindblad route runs at the default drive epsilon = 0.1 kappa1; g2 does not
/// depend on epsilon, but its nbar does.
inline G2Point g2_point(Method method, const Params& p, double sz, const MethodOptions& opts = {}) {
  G2Point pt;
  pt.delta_r = p.delta_r;
  pt.method = method;
  switch (method) {
    case Method::analytic:
      pt.g2 = analytic::g2_exact(p, sz);
      pt.nbar = analytic::mixture_nbar(p, sz);
      break;
    case Method::mixture:
      pt.g2 = analytic::g2_mixture(p, sz);
      pt.nbar = analytic::mixture_nbar(p, sz);
      break;
    case Method::moments: {
      const MomentVector m = moments::steady_state_moments(p, sz);
      pt.g2 = moments::g2_from_moments(m);
      pt.nbar = moments::nbar_from_moments(m);
      break;
    }
    case Method::lindblad: {
      lindblad::LiouvillianSpec spec;
      spec.params = lindblad::with_default_drive(p);
      spec.params.gamma1 = 0.0;
      spec.fock_cutoff = opts.fock_cutoff;
      const DensityOperator rho =
          lindblad::steady_state_density(spec, lindblad::AtomDiagonal::from_sigma_z(sz));
      pt.g2 = lindblad::g2_from_density(rho);
      pt.nbar = lindblad::nbar_from_density(rho);
      break;
    }
  }
  return pt;
}

/// g2 at one detuning for a two-atom state. Lindblad simulates both atoms.
inline double g2_for_state(Method method, const Params& p, const BellLikeState& s,
                           const MethodOptions& opts = {}) {
  if (method == Method::lindblad) {
    return lindblad::joint_bell_state_g2(s, lindblad::with_default_drive(p), opts.fock_cutoff);
  }
  return g2_point(method, p, analytic::sigma_z_of_state(s), opts).g2;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRequest {
  Params params;  ///< delta_r is overwritten per row
  double sz = 0.0;
  double dmin = -40.0;
  double dmax = 40.0;
  std::size_t points = 801;
  std::vector<Method> methods{Method::analytic};
  MethodOptions options;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct SweepRow {
  double delta_r = 0.0;
  std::vector<double> g2;  ///< one per requested method, in request order
  double nbar = 0.0;       ///< from the first requested method
};

inline std::vector<double> detuning_grid(double dmin, double dmax, std::size_t points) {
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = dmin;
    return out;
  }
  const double step = (dmax - dmin) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = dmin + step * static_cast<double>(i);
  out.back() = dmax;
  return out;
}

/// Rows come back in detuning order whatever order the workers finish in.
inline std::vector<SweepRow> run_sweep(const SweepRequest& req) {
  validate_params(req.params);
  analytic::check_sz(req.sz);
  if (req.points == 0) throw ParameterError("points must be positive");
  if (!(req.dmax >= req.dmin) || !std::isfinite(req.dmin) || !std::isfinite(req.dmax)) {
    throw ParameterError("need finite dmin <= dmax");
  }
  if (req.methods.empty()) throw ParameterError("at least one method is required");

  const std::vector<double> grid = detuning_grid(req.dmin, req.dmax, req.points);
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        const Params p = req.params.with_delta_r(grid[i]);
        SweepRow row;
        row.delta_r = grid[i];
        for (std::size_t k = 0; k < req.methods.size(); ++k) {
          const G2Point pt = g2_point(req.methods[k], p, req.sz, req.options);
          row.g2.push_back(pt.g2);
          if (k == 0) row.nbar = pt.nbar;
        }
        rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.size();
      }
    }
  };

  unsigned n_threads = req.threads ? req.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, grid.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

// ---------------------------------------------------------------------------
// Concurrence

/// Measures g2 at delta_r = +chi and -chi and converts it to a concurrence estimate.
inline ConcurrenceReport measure_concurrence(const BellLikeState& s, const Params& p, Method method,
                                             const MethodOptions& opts = {}) {
  validate_params(p);
  ConcurrenceReport r;
  r.g2_plus = g2_for_state(method, p.with_delta_r(+p.chi), s, opts);
  r.g2_minus = g2_for_state(method, p.with_delta_r(-p.chi), s, opts);
  const auto est = analytic::concurrence_from_g2(r.g2_plus, r.g2_minus);
  r.c_raw = est.c_raw;
  r.c_clamped = est.c_clamped;
  r.c_wootters = analytic::wootters_concurrence(s);
  const double diff = std::abs(r.c_raw - r.c_wootters);
  r.rel_error = r.c_wootters > 0.0 ? diff / r.c_wootters : diff;

  if (std::norm(s.c0()) == 0.0 || std::norm(s.c1()) == 0.0) {
    r.warning = "product state: g2 is Poissonian at both detunings and the g2 product relation does "
                "not apply (it assumes two resolved peaks and both amplitudes nonzero)";
  } else if (r.c_raw > 1.01) {
    r.warning = "estimate exceeds 1 by more than 1%: peaks at +/-chi are not resolved "
                "(need (1 - |sz|) |chi| / kappa1 >> 1)";
  }
  return r;
}

}  // namespace cavg2

#endif  // CAVG2_PIPELINE_HPP
