// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cavg2.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cavg2;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0.0) out.require(elapsed < budget_s, "runtime budget " + std::to_string(budget_s) + " s");
  if (!out.passed) ++failures;
  std::printf("%s %d  %s  (%.2f s)%s\n", out.passed ? "PASS" : "FAIL", id, title, elapsed, out.detail.str().c_str());
  std::fflush(stdout);
}

Params fig3(double delta_r = 0.0) { return {15.0, 1.0, 0.0, 0.1, delta_r}; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int main() {
  criterion(1, "figure 3 peak values", 1.0, [](Outcome& o) {
    struct Case {
      double sz, delta_r, expect, approx;
    };
    const Case cases[] = {{0.0, 15.0, 1.99889, 2.0},
                          {0.0, -15.0, 1.99889, 2.0},
                          {1.0 / 3.0, 15.0, 2.99668, 3.0},
                          {1.0 / 3.0, -15.0, 1.49959, 1.5}};
    for (double sz : {0.0, 1.0 / 3.0}) {
      SweepRequest req;
      req.params = fig3();
      req.sz = sz;
      const auto rows = run_sweep(req);
      o.require(rows.size() == 801, "801 rows");
      for (const auto& c : cases) {
        if (c.sz != sz) continue;
        const auto& row = rows.at(static_cast<std::size_t>(std::lround((c.delta_r + 40.0) * 10.0)));
        const double g = row.g2.at(0);
        const double oracle = analytic::g2_mixture(fig3(c.delta_r), sz);
        o.require(std::abs(row.delta_r - c.delta_r) < 1e-12, "grid hits +/-15");
        o.require(std::abs(g - oracle) <= 1e-4, "oracle at " + std::to_string(c.delta_r));
        o.require(std::abs(g - c.expect) <= 1e-5, "printed value " + std::to_string(c.expect));
        o.require(rel(g, c.approx) <= 5e-3, "within 0.5% of " + std::to_string(c.approx));
        o.detail << " g2(" << c.delta_r << ", sz=" << sz << ")=" << g;
      }
    }
  });

  criterion(2, "flat lines at sz = +/-1", 60.0, [](Outcome& o) {
    double worst_analytic = 0.0;
    double worst_lindblad = 0.0;
    for (double sz : {1.0, -1.0}) {
      SweepRequest req;
      req.params = fig3();
      req.sz = sz;
      for (const auto& row : run_sweep(req)) worst_analytic = std::max(worst_analytic, std::abs(row.g2[0] - 1.0));
      for (double d : detuning_grid(-40.0, 40.0, 9)) {
        worst_lindblad = std::max(worst_lindblad, std::abs(g2_point(Method::lindblad, fig3(d), sz).g2 - 1.0));
      }
    }
    o.require(worst_analytic <= 1e-12, "analytic 1e-12");
    o.require(worst_lindblad <= 1e-3, "lindblad 1e-3");
    o.detail << " analytic " << worst_analytic << ", lindblad " << worst_lindblad;
  });

  criterion(3, "concurrence from g2", 0.0, [](Outcome& o) {
    const double h = 1.0 / std::sqrt(2.0);
    const auto one = measure_concurrence(BellLikeState::psi(h, h), fig3(), Method::analytic);
    o.require(std::abs(one.c_clamped - one.c_wootters) <= 1e-3, "Psi c_clamped vs Wootters");
    o.require(std::abs(one.c_wootters - 1.0) <= 1e-12, "Psi Wootters = 1");
    const auto two = measure_concurrence(BellLikeState::phi(std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0)), fig3(),
                                         Method::analytic);
    o.require(std::abs(two.c_raw - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-3, "Phi c_raw vs 0.942809");
    o.detail << " Psi c_raw=" << one.c_raw << " c_clamped=" << one.c_clamped << ", Phi c_raw=" << two.c_raw;
  });

  const auto grid = validation::random_grid(validation::ValidationOptions{}.seed, 10000);

  criterion(4, "closed form vs coherent-mixture oracle", 0.0, [&](Outcome& o) {
    double worst = 0.0;
    for (const auto& pt : grid) {
      const double mix = analytic::g2_mixture(pt.params, pt.sz);
      worst = std::max(worst, rel(analytic::g2_exact(pt.params, pt.sz), mix));
    }
    o.require(worst <= 1e-10, "1e-10");
    o.detail << " max rel deviation " << worst << " over " << grid.size() << " points";
  });

  criterion(5, "moment and master-equation solvers vs closed form", 300.0, [&](Outcome& o) {
    double worst_moments = 0.0;
    for (const auto& pt : grid) {
      const double m = moments::g2_from_moments(moments::steady_state_moments(pt.params, pt.sz));
      worst_moments = std::max(worst_moments, rel(m, analytic::g2_exact(pt.params, pt.sz)));
    }
    double worst_lindblad = 0.0;
    for (double sz : {0.0, 1.0 / 3.0}) {
      for (double d : {15.0, -15.0}) {
        const double g = g2_point(Method::lindblad, fig3(d), sz).g2;
        worst_lindblad = std::max(worst_lindblad, std::abs(g - analytic::g2_exact(fig3(d), sz)));
      }
    }
    o.require(worst_moments <= 1e-9, "moments 1e-9");
    o.require(worst_lindblad <= 1e-3, "lindblad 1e-3");
    o.detail << " moments " << worst_moments << ", lindblad " << worst_lindblad;
  });

  criterion(6, "moment closure along trajectories", 0.0, [](Outcome& o) {
    for (const auto& pt : validation::closure_points()) {
      const double dev = validation::closure_deviation(pt);
      o.require(dev <= 1e-6, validation::describe(pt.params, pt.sz));
      o.detail << " " << dev;
    }
  });

  criterion(7, "joint two-atom vs single-atom g2", 0.0, [](Outcome& o) {
    for (const auto& s : validation::example_states()) {
      for (double d : {15.0, -15.0}) {
        const double joint = g2_for_state(Method::lindblad, fig3(d), s);
        const double single = g2_point(Method::lindblad, fig3(d), analytic::sigma_z_of_state(s)).g2;
        o.require(std::abs(joint - single) <= 1e-6, std::string(to_string(s.family())) + " at " + std::to_string(d));
        o.detail << " " << std::abs(joint - single);
      }
    }
  });

  criterion(8, "atomic decay budget", 0.0, [](Outcome& o) {
    const double factor = std::exp(-0.2 * 0.05);
    o.require(std::abs(factor - 0.99005) <= 5e-6, "factor 0.99005");
    lindblad::LiouvillianSpec spec;
    spec.params = fig3(15.0);
    spec.params.gamma1 = 0.2;
    spec.include_atom_decay = true;
    const double sz0 = 1.0 / 3.0;
    const auto rho0 = lindblad::initial_density(spec, lindblad::AtomDiagonal::from_sigma_z(sz0));
    double worst = 0.0;
    lindblad::evolve_density(rho0, spec, 5.0, lindblad::default_dt(spec), [&](double t, const Eigen::MatrixXcd& rho) {
      const double sz = lindblad::sigma_z_from_density(DensityOperator(2, spec.fock_cutoff, rho), spec);
      worst = std::max(worst, std::abs(sz - analytic::sigma_z_decay(sz0, 0.2, t)));
    });
    o.require(worst <= 1e-6, "master equation vs closed form 1e-6");
    o.detail << " factor " << factor << ", max |sz deviation| " << worst << " over 5 us";
  });

  criterion(9, "property suite and full validate run", 600.0, [](Outcome& o) {
    const auto report = validation::run_validation({});
    for (const auto& s : report.suites) {
      o.require(s.passed(), s.name);
      o.detail << " " << s.name << "=" << s.max_deviation;
    }
    o.require(report.suites.size() == 9, "all suites ran");
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
