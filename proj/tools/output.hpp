#ifndef CAVG2_TOOLS_OUTPUT_HPP
#define CAVG2_TOOLS_OUTPUT_HPP

// CSV and JSON writers for the command-line tool.

#include "cavg2/pipeline.hpp"
#include "cavg2/validation.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace cavg2::io {

/// Nine significant digits, the fixed format of every numeric output.
inline std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// JSON number carrying exactly the nine-digit value written to CSV.
inline nlohmann::json num9(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(fmt9(x).c_str(), nullptr);
}

inline std::string sweep_csv(const std::vector<Method>& methods, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "delta_r_mhz";
  for (Method m : methods) os << ",g2_" << to_string(m);
  os << ",nbar\n";
  for (const auto& row : rows) {
    os << fmt9(row.delta_r);
    for (double g : row.g2) os << ',' << fmt9(g);
    os << ',' << fmt9(row.nbar) << '\n';
  }
  return os.str();
}

inline nlohmann::json sweep_json(const SweepRequest& req, const std::vector<SweepRow>& rows) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : req.methods) methods.push_back(std::string(to_string(m)));
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["delta_r_mhz"] = num9(row.delta_r);
    for (std::size_t k = 0; k < req.methods.size(); ++k) {
      r["g2_" + std::string(to_string(req.methods[k]))] = num9(row.g2[k]);
    }
    r["nbar"] = num9(row.nbar);
    out_rows.push_back(std::move(r));
  }
  return {
      {"chi", num9(req.params.chi)},
      {"kappa1", num9(req.params.kappa1)},
      {"epsilon", num9(req.params.epsilon)},
      {"sz", num9(req.sz)},
      {"fock_cutoff", req.options.fock_cutoff},
      {"methods", methods},
      {"rows", out_rows},
  };
}

inline nlohmann::json complex_json(complex z) { return nlohmann::json::array({num9(z.real()), num9(z.imag())}); }

inline nlohmann::json concurrence_json(const BellLikeState& s, const Params& p, Method method,
                                       const ConcurrenceReport& r) {
  nlohmann::json out = {
      {"state", {{"family", std::string(to_string(s.family()))}, {"c0", complex_json(s.c0())},
                 {"c1", complex_json(s.c1())}}},
      {"chi", num9(p.chi)},
      {"kappa1", num9(p.kappa1)},
      {"epsilon", num9(p.epsilon)},
      {"method", std::string(to_string(method))},
      {"g2_plus", num9(r.g2_plus)},
      {"g2_minus", num9(r.g2_minus)},
      {"c_raw", num9(r.c_raw)},
      {"c_clamped", num9(r.c_clamped)},
      {"c_wootters", num9(r.c_wootters)},
      {"rel_error", num9(r.rel_error)},
  };
  out["warning"] = r.warning.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.warning);
  return out;
}

inline nlohmann::json validation_json(const validation::ValidationReport& report) {
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : report.suites) {
    suites.push_back({
        {"name", s.name},
        {"points", s.points},
        {"max_deviation", s.max_deviation},
        {"tolerance", s.tolerance},
        {"passed", s.passed()},
        {"worst_point", s.worst_point},
    });
  }
  return {{"seed", report.seed}, {"grid_size", report.grid_size}, {"passed", report.passed()}, {"suites", suites}};
}

}  // namespace cavg2::io

#endif  // CAVG2_TOOLS_OUTPUT_HPP
