// cavg2: steady-state g2(0) sweeps, concurrence estimates and cross-method validation
// for a driven cavity dispersively coupled to one atom of an entangled pair.
//
// Exit codes: 0 success, 1 validation failure, 2 argument error, 3 solver error.

#include "cavg2.hpp"
#include "fault_injection.hpp"
#include "output.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cavg2;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitArgs = 2;
constexpr int kExitSolver = 3;

struct Options {
  double chi = 15.0;
  double kappa = 1.0;
  double epsilon = 0.1;
  double sz = 0.0;
  std::string state;
  std::string c0 = "0.7071067811865476";
  std::string c1 = "0.7071067811865476";
  bool normalize = false;
  double dmin = -40.0;
  double dmax = 40.0;
  std::size_t points = 801;
  std::string method = "analytic";
  int fock_cutoff = 12;
  std::string out = "-";
  std::string format = "csv";
  unsigned threads = 0;
  std::uint64_t seed = 20221015;
  std::size_t grid = 10000;
  std::string inject_fault;
  double gamma = 0.2;
  double time = 0.05;
};

/// "re,im" or "re".
complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw ParameterError("bad complex number '" + text + "' (expected re,im)");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw ParameterError("bad complex number '" + text + "' (expected re,im)");
  }
  std::string rest;
  if (in >> rest) throw ParameterError("bad complex number '" + text + "'");
  return {re, im};
}

std::vector<Method> parse_methods(const std::string& text, bool allow_many) {
  if (text == "all") {
    if (!allow_many) throw ParameterError("choose a single method");
    return {Method::analytic, Method::mixture, Method::moments, Method::lindblad};
  }
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto m = parse_method(item);
    if (!m) throw ParameterError("unknown method '" + item + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw ParameterError("no method given");
  if (!allow_many && out.size() != 1) throw ParameterError("choose a single method");
  return out;
}

Params params_from(const Options& o) {
  Params p;
  p.chi = o.chi;
  p.kappa1 = o.kappa;
  p.epsilon = o.epsilon;
  p.gamma1 = 0.0;
  return validate_params(p);
}

BellLikeState state_from(const Options& o) {
  const std::string family = o.state.empty() ? "psi" : o.state;
  if (family != "psi" && family != "phi") throw ParameterError("--state must be psi or phi");
  complex c0 = parse_complex(o.c0);
  complex c1 = parse_complex(o.c1);
  if (o.normalize) {
    const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    if (!(norm > 0.0)) throw ParameterError("cannot normalize a zero state");
    c0 /= norm;
    c1 /= norm;
  }
  return {family == "psi" ? BellFamily::Psi : BellFamily::Phi, c0, c1};
}

void emit(const Options& o, const std::string& text) {
  if (o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ParameterError("cannot open output file " + o.out);
  f << text;
}

void check_format(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw ParameterError("--format must be csv or json");
}

int cmd_sweep(const Options& o) {
  check_format(o);
  SweepRequest req;
  req.params = params_from(o);
  req.sz = o.state.empty() ? o.sz : analytic::sigma_z_of_state(state_from(o));
  req.dmin = o.dmin;
  req.dmax = o.dmax;
  req.points = o.points;
  req.methods = parse_methods(o.method, true);
  req.options.fock_cutoff = o.fock_cutoff;
  req.threads = o.threads;
  const auto rows = run_sweep(req);
  emit(o, o.format == "csv" ? io::sweep_csv(req.methods, rows) : io::sweep_json(req, rows).dump(2) + "\n");
  return kExitOk;
}

int cmd_concurrence(const Options& o) {
  const BellLikeState s = state_from(o);
  const Params p = params_from(o);
  const Method method = parse_methods(o.method, false).front();
  MethodOptions mo;
  mo.fock_cutoff = o.fock_cutoff;
  const ConcurrenceReport r = measure_concurrence(s, p, method, mo);
  if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
  emit(o, io::concurrence_json(s, p, method, r).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const Options& o) {
  validation::ValidationOptions vo;
  vo.seed = o.seed;
  vo.grid_size = o.grid;
  vo.fock_cutoff = o.fock_cutoff;
  if (!o.inject_fault.empty()) {
    auto fault = faults::lookup(o.inject_fault);
    if (!fault) throw ParameterError("unknown fault '" + o.inject_fault + "'");
    vo.g2 = *fault;
  }
  const auto report = validation::run_validation(vo);
  emit(o, io::validation_json(report).dump(2) + "\n");
  for (const auto& s : report.suites) {
    std::cerr << (s.passed() ? "PASS " : "FAIL ") << s.name << "  max deviation " << s.max_deviation
              << " (tolerance " << s.tolerance << ", " << s.points << " points)";
    if (!s.passed()) std::cerr << "  at " << s.worst_point;
    std::cerr << "\n";
  }
  return report.passed() ? kExitOk : kExitValidation;
}

int cmd_decay_budget(const Options& o) {
  if (!(o.gamma >= 0.0) || !(o.time >= 0.0)) throw ParameterError("--gamma and --time must be non-negative");
  const double factor = std::exp(-o.gamma * o.time);
  const double sz_t = analytic::sigma_z_decay(o.sz, o.gamma, o.time);
  if (o.format == "json") {
    nlohmann::json j = {{"gamma1", io::num9(o.gamma)}, {"t", io::num9(o.time)},  {"factor", io::num9(factor)},
                        {"sz0", io::num9(o.sz)},       {"sz_t", io::num9(sz_t)}};
    emit(o, j.dump(2) + "\n");
  } else {
    check_format(o);
    emit(o, "factor " + io::fmt9(factor) + "\nsz0 " + io::fmt9(o.sz) + "\nsz_t " + io::fmt9(sz_t) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state g2(0) of a dispersively coupled cavity and the concurrence estimate built on it"};
  app.set_config("--config", "", "key = value configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--chi", o.chi, "dispersive shift chi (MHz)")->capture_default_str();
  app.add_option("--kappa", o.kappa, "cavity decay rate kappa1 (MHz)")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "drive amplitude (MHz)")->capture_default_str();
  app.add_option("--sz", o.sz, "atom-1 inversion <sz> (initial value for decay-budget)")->capture_default_str();
  app.add_option("--state", o.state, "two-atom state family: psi or phi");
  app.add_option("--c0", o.c0, "first amplitude as re,im")->capture_default_str();
  app.add_option("--c1", o.c1, "second amplitude as re,im")->capture_default_str();
  app.add_flag("--normalize", o.normalize, "rescale c0, c1 to unit norm");
  app.add_option("--dmin", o.dmin, "sweep start delta_r (MHz)")->capture_default_str();
  app.add_option("--dmax", o.dmax, "sweep end delta_r (MHz)")->capture_default_str();
  app.add_option("--points", o.points, "sweep point count")->capture_default_str();
  app.add_option("--method", o.method, "analytic | mixture | moments | lindblad, comma list or 'all' for sweep")
      ->capture_default_str();
  app.add_option("--fock-cutoff", o.fock_cutoff, "Lindblad Fock truncation N")->capture_default_str();
  app.add_option("--out", o.out, "output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", o.format, "csv or json")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads for sweeps (0 = all cores)")->capture_default_str();
  app.add_option("--seed", o.seed, "validation grid seed")->capture_default_str();
  app.add_option("--grid", o.grid, "validation grid size")->capture_default_str();
  app.add_option("--gamma", o.gamma, "atomic decay rate gamma1 (MHz)")->capture_default_str();
  app.add_option("--time", o.time, "measurement time (us)")->capture_default_str();
  app.add_option("--inject-fault", o.inject_fault, "validate against a broken closed form (b-sign)")
      ->group("");

  auto* sweep = app.add_subcommand("sweep", "g2 versus delta_r for one or more methods");
  auto* conc = app.add_subcommand("concurrence", "concurrence estimate from g2 at delta_r = +/-chi");
  auto* validate = app.add_subcommand("validate", "cross-method validation suites");
  auto* decay = app.add_subcommand("decay-budget", "atomic decay during the measurement window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(o);
    if (conc->parsed()) return cmd_concurrence(o);
    if (validate->parsed()) return cmd_validate(o);
    if (decay->parsed()) return cmd_decay_budget(o);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitArgs;
}
