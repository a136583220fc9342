#ifndef CAVG2_LINDBLAD_HPP
#define CAVG2_LINDBLAD_HPP

// Master-equation evolution of atom(s) plus cavity 1 on a truncated Fock space.
//
// Basis index: atom_state * (N + 1) + n. One atom: g = 0, e = 1. Two atoms:
// 2 * s1 + s2, where atom 2 is a spectator with no Hamiltonian term and no decay.

#include "cavg2/analytic.hpp"
#include "cavg2/core.hpp"
#include "cavg2/moments.hpp"
#include "cavg2/rk4.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

namespace cavg2::lindblad {

using Matrix = Eigen::MatrixXcd;

enum class AtomMode {
  single,  ///< atom 1 only
  joint,   ///< atoms 1 and 2, cavity 1 only
};

struct LiouvillianSpec {
  Params params;
  int fock_cutoff = 12;
  AtomMode atom_mode = AtomMode::single;
  bool include_atom_decay = false;
  double omega_a1 = 0.0;  ///< atomic frequency in the omega_a1 sz / 2 term

  [[nodiscard]] int atom_dim() const { return atom_mode == AtomMode::single ? 2 : 4; }
  [[nodiscard]] int fock_dim() const { return fock_cutoff + 1; }
  [[nodiscard]] int dim() const { return atom_dim() * fock_dim(); }
};

inline void validate_spec(const LiouvillianSpec& spec) {
  validate_params(spec.params);
  if (spec.fock_cutoff < 2) throw ParameterError("fock_cutoff must be at least 2");
  if (!std::isfinite(spec.omega_a1)) throw ParameterError("omega_a1 must be finite");
}

/// Default drive for brute-force runs: epsilon = 0.1 kappa1.
inline Params with_default_drive(Params p) {
  p.epsilon = 0.1 * p.kappa1;
  return p;
}

inline int atom1_excited(const LiouvillianSpec& spec, int atom_state) {
  return spec.atom_mode == AtomMode::single ? atom_state : atom_state >> 1;
}

inline double atom1_sigma_z(const LiouvillianSpec& spec, int atom_state) {
  return atom1_excited(spec, atom_state) ? 1.0 : -1.0;
}

// ---------------------------------------------------------------------------
// Operators

/// Dense operators on the full truncated space.
struct Operators {
  Matrix a;             ///< cavity annihilation
  Matrix number;        ///< a+ a
  Matrix sigma_z1;      ///< |e1><e1| - |g1><g1|
  Matrix sigma_minus1;  ///< |g1><e1|
};

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

/// Truncated ladder operator on Fock levels 0..N.
inline Matrix annihilation(int fock_cutoff) {
  const int d = fock_cutoff + 1;
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Operators build_operators(const LiouvillianSpec& spec) {
  validate_spec(spec);
  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = -1.0;
  sz(1, 1) = 1.0;
  Matrix sm = Matrix::Zero(2, 2);
  sm(0, 1) = 1.0;
  Matrix atom_id = Matrix::Identity(spec.atom_dim(), spec.atom_dim());
  Matrix sz1 = sz;
  Matrix sm1 = sm;
  if (spec.atom_mode == AtomMode::joint) {
    sz1 = kron(sz, Matrix::Identity(2, 2));
    sm1 = kron(sm, Matrix::Identity(2, 2));
  }
  const Matrix a_cav = annihilation(spec.fock_cutoff);
  const Matrix cav_id = Matrix::Identity(spec.fock_dim(), spec.fock_dim());

  Operators ops;
  ops.a = kron(atom_id, a_cav);
  ops.number = kron(atom_id, Matrix(a_cav.adjoint() * a_cav));
  ops.sigma_z1 = kron(sz1, cav_id);
  ops.sigma_minus1 = kron(sm1, cav_id);
  return ops;
}

/// H = omega_a1 sz1 / 2 + (delta_r + chi sz1) a+ a + epsilon (a+ + a).
inline Matrix build_hamiltonian(const LiouvillianSpec& spec) {
  const Operators ops = build_operators(spec);
  const Params& p = spec.params;
  const Matrix id = Matrix::Identity(spec.dim(), spec.dim());
  return 0.5 * spec.omega_a1 * ops.sigma_z1 + (p.delta_r * id + p.chi * ops.sigma_z1) * ops.number +
         p.epsilon * (ops.a.adjoint() + ops.a);
}

// ---------------------------------------------------------------------------
// Right-hand side

/// Evaluates d rho / dt elementwise, exploiting that H is atom-diagonal and the
/// cavity operators only couple neighbouring Fock levels.
class Liouvillian {
public:
  explicit Liouvillian(const LiouvillianSpec& spec) : spec_(spec) {
    validate_spec(spec);
    const int dim = spec.dim();
    const int fd = spec.fock_dim();
    const Params& p = spec.params;
    photons_.resize(dim);
    energy_.resize(dim);
    excited1_.resize(dim);
    flip1_.resize(dim);
    const int flip_bit = spec.atom_mode == AtomMode::single ? 1 : 2;
    for (int i = 0; i < dim; ++i) {
      const int s = i / fd;
      const int n = i % fd;
      const double sz = atom1_sigma_z(spec, s);
      photons_[i] = n;
      energy_[i] = 0.5 * spec.omega_a1 * sz + (p.delta_r + p.chi * sz) * n;
      excited1_[i] = atom1_excited(spec, s);
      flip1_[i] = (s ^ flip_bit) * fd + n;
    }
    sqrt_.resize(fd + 1);
    for (int n = 0; n <= fd; ++n) sqrt_[n] = std::sqrt(static_cast<double>(n));
  }

  [[nodiscard]] const LiouvillianSpec& spec() const { return spec_; }

  [[nodiscard]] Matrix apply(const Matrix& rho) const {
    Matrix out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
  }

  void apply(const Matrix& rho, Matrix& out) const {
    const int dim = spec_.dim();
    const int top = spec_.fock_cutoff;
    const complex minus_i{0.0, -1.0};
    const double eps = spec_.params.epsilon;
    const double kappa = spec_.params.kappa1;
    const double gamma = spec_.include_atom_decay ? spec_.params.gamma1 : 0.0;
    const complex* r = rho.data();
    complex* o = out.data();
    auto at = [&](int i, int j) { return r[static_cast<std::ptrdiff_t>(j) * dim + i]; };

    for (int j = 0; j < dim; ++j) {
      const int nj = photons_[j];
      for (int i = 0; i < dim; ++i) {
        const int ni = photons_[i];
        const complex rij = at(i, j);
        // drive part of [H, rho]
        complex drive{0.0, 0.0};
        if (ni > 0) drive += sqrt_[ni] * at(i - 1, j);
        if (ni < top) drive += sqrt_[ni + 1] * at(i + 1, j);
        if (nj > 0) drive -= sqrt_[nj] * at(i, j - 1);
        if (nj < top) drive -= sqrt_[nj + 1] * at(i, j + 1);

        complex value = minus_i * ((energy_[i] - energy_[j]) * rij + eps * drive);
        value -= 0.5 * kappa * (ni + nj) * rij;
        if (ni < top && nj < top) value += kappa * sqrt_[ni + 1] * sqrt_[nj + 1] * at(i + 1, j + 1);
        if (gamma != 0.0) {
          if (!excited1_[i] && !excited1_[j]) value += gamma * at(flip1_[i], flip1_[j]);
          value -= 0.5 * gamma * (excited1_[i] + excited1_[j]) * rij;
        }
        o[static_cast<std::ptrdiff_t>(j) * dim + i] = value;
      }
    }
  }

  /// Largest |d rho / dt| over the atom-diagonal blocks, which carry every cavity
  /// observable and the atom populations.
  [[nodiscard]] double population_residual(const Matrix& rho) const {
    const Matrix d = apply(rho);
    const int fd = spec_.fock_dim();
    double worst = 0.0;
    for (int s = 0; s < spec_.atom_dim(); ++s) {
      worst = std::max(worst, d.block(s * fd, s * fd, fd, fd).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  /// Rough bound on the spectral radius, used to size explicit steps.
  [[nodiscard]] double spectral_bound() const {
    const Params& p = spec_.params;
    const double top = spec_.fock_cutoff;
    return std::abs(spec_.omega_a1) +
           top * (std::abs(p.delta_r + p.chi) + std::abs(p.delta_r - p.chi)) +
           4.0 * p.epsilon * std::sqrt(top + 1.0) + p.kappa1 * top + p.gamma1;
  }

private:
  LiouvillianSpec spec_;
  std::vector<int> photons_;
  std::vector<double> energy_;
  std::vector<int> excited1_;
  std::vector<int> flip1_;
  std::vector<double> sqrt_;
};

// ---------------------------------------------------------------------------
// Evolution

/// Rejects steps with dt * (|delta_r| + |chi| + kappa1 + |omega_a1| + gamma) >= 0.1.
inline void check_step(const LiouvillianSpec& spec, double dt, double t_final) {
  const Params& p = spec.params;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ParameterError("t_final must be >= 0");
  const double gamma = spec.include_atom_decay ? p.gamma1 : 0.0;
  const double scale = std::abs(p.delta_r) + std::abs(p.chi) + p.kappa1 + std::abs(spec.omega_a1) + gamma;
  if (dt * scale >= 0.1) {
    throw ParameterError("step size too large: need dt * (|delta_r| + |chi| + kappa1) < 0.1");
  }
}

inline double default_dt(const LiouvillianSpec& spec) {
  return moments::default_dt(spec.params);
}

inline void check_dimensions(const DensityOperator& rho, const LiouvillianSpec& spec) {
  if (rho.atom_dim() != spec.atom_dim() || rho.fock_cutoff() != spec.fock_cutoff) {
    throw ParameterError("density operator dimensions do not match the Liouvillian");
  }
}

/// RK4 evolution; observer(t, rho_matrix) sees t = 0 and every step.
template <typename Observer>
DensityOperator evolve_density(const DensityOperator& rho0, const LiouvillianSpec& spec, double t_final,
                               double dt, Observer&& observer) {
  validate_spec(spec);
  check_dimensions(rho0, spec);
  check_step(spec, dt, t_final);
  const Liouvillian L(spec);
  auto f = [&L](double, const Matrix& rho) { return L.apply(rho); };
  Matrix final = rk4_integrate(rho0.matrix(), t_final, dt, f, observer);
  return {spec.atom_dim(), spec.fock_cutoff, std::move(final)};
}

inline DensityOperator evolve_density(const DensityOperator& rho0, const LiouvillianSpec& spec,
                                      double t_final, double dt) {
  return evolve_density(rho0, spec, t_final, dt, [](double, const Matrix&) {});
}

// ---------------------------------------------------------------------------
// Initial states

/// Diagonal atom populations, in the atom basis order.
struct AtomDiagonal {
  std::vector<double> populations;

  /// Single atom with the given <sz>: (p_g, p_e) = ((1 - sz) / 2, (1 + sz) / 2).
  static AtomDiagonal from_sigma_z(double sz) { return {{(1.0 - sz) / 2.0, (1.0 + sz) / 2.0}}; }
  static AtomDiagonal excited() { return {{0.0, 1.0}}; }
  static AtomDiagonal ground() { return {{1.0, 0.0}}; }
};

using AtomInit = std::variant<AtomDiagonal, BellLikeState>;

/// Atom density matrix for the spec's atom mode. A Bell-like state on a single-atom
/// spec is reduced to atom 1 (diagonal for both families).
inline Matrix atom_density(const LiouvillianSpec& spec, const AtomInit& init, const Tolerances& tol = {}) {
  const int ad = spec.atom_dim();
  Matrix atom = Matrix::Zero(ad, ad);
  if (const auto* diag = std::get_if<AtomDiagonal>(&init)) {
    if (static_cast<int>(diag->populations.size()) != ad) {
      throw ParameterError("atom population count does not match atom mode");
    }
    double total = 0.0;
    for (int s = 0; s < ad; ++s) {
      const double w = diag->populations[s];
      if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("populations must be non-negative");
      atom(s, s) = w;
      total += w;
    }
    if (std::abs(total - 1.0) > tol.normalization) throw ParameterError("populations must sum to 1");
    return atom;
  }
  const auto& bell = std::get<BellLikeState>(init);
  const auto amp = bell.joint_amplitudes();
  if (spec.atom_mode == AtomMode::joint) {
    for (int s = 0; s < 4; ++s) {
      for (int t = 0; t < 4; ++t) atom(s, t) = amp[s] * std::conj(amp[t]);
    }
    return atom;
  }
  // Partial trace over atom 2.
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int t1 = 0; t1 < 2; ++t1) {
      complex acc{0.0, 0.0};
      for (int s2 = 0; s2 < 2; ++s2) acc += amp[2 * s1 + s2] * std::conj(amp[2 * t1 + s2]);
      atom(s1, t1) = acc;
    }
  }
  return atom;
}

inline DensityOperator initial_density(const LiouvillianSpec& spec, const AtomInit& init) {
  validate_spec(spec);
  return DensityOperator::product(atom_density(spec, init), spec.fock_cutoff, 0);
}

// ---------------------------------------------------------------------------
// Observables

/// <sz1^k a+^p a^q> for k in {0, 1}.
inline complex normal_ordered(const DensityOperator& rho, const LiouvillianSpec& spec, int p, int q,
                              bool with_sigma_z) {
  const int fd = rho.fock_dim();
  const auto& m = rho.matrix();
  complex acc{0.0, 0.0};
  for (int s = 0; s < rho.atom_dim(); ++s) {
    const double weight = with_sigma_z ? atom1_sigma_z(spec, s) : 1.0;
    for (int nl = q; nl < fd; ++nl) {
      const int ni = nl - q + p;
      if (ni >= fd) continue;
      // a^q |nl> = sqrt(nl! / (nl-q)!) |nl-q>, then a+^p raises to ni.
      double c = 1.0;
      for (int k = nl - q + 1; k <= nl; ++k) c *= std::sqrt(static_cast<double>(k));
      for (int k = nl - q + 1; k <= ni; ++k) c *= std::sqrt(static_cast<double>(k));
      acc += weight * c * m(s * fd + nl, s * fd + ni);
    }
  }
  return acc;
}

inline double nbar_from_density(const DensityOperator& rho) {
  const int fd = rho.fock_dim();
  double n = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) n += static_cast<double>(i % fd) * rho.matrix()(i, i).real();
  return n;
}

/// Tr(a+^2 a^2 rho) / Tr(a+ a rho)^2.
inline double g2_from_density(const DensityOperator& rho) {
  const int fd = rho.fock_dim();
  double n1 = 0.0;
  double n2 = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    const double n = static_cast<double>(i % fd);
    const double w = rho.matrix()(i, i).real();
    n1 += n * w;
    n2 += n * (n - 1.0) * w;
  }
  if (!(n1 > 0.0)) throw ParameterError("g2 undefined: empty cavity");
  return n2 / (n1 * n1);
}

inline double sigma_z_from_density(const DensityOperator& rho, const LiouvillianSpec& spec) {
  return normal_ordered(rho, spec, 0, 0, true).real();
}

/// All sixteen moments, read off the density matrix.
inline MomentVector moments_from_density(const DensityOperator& rho, const LiouvillianSpec& spec) {
  check_dimensions(rho, spec);
  using M = Moment;
  MomentVector m;
  auto put = [&](M which, int p, int q, bool sz) { m[which] = normal_ordered(rho, spec, p, q, sz); };
  put(M::n, 1, 1, false);
  put(M::a, 0, 1, false);
  put(M::ad, 1, 0, false);
  put(M::sz_a, 0, 1, true);
  put(M::sz_ad, 1, 0, true);
  put(M::sz, 0, 0, true);
  put(M::ad2_a2, 2, 2, false);
  put(M::ad2_a, 2, 1, false);
  put(M::ad_a2, 1, 2, false);
  put(M::ad2_a_sz, 2, 1, true);
  put(M::ad_a_sz, 1, 1, true);
  put(M::ad2_sz, 2, 0, true);
  put(M::ad_a2_sz, 1, 2, true);
  put(M::a2_sz, 0, 2, true);
  put(M::ad2, 2, 0, false);
  put(M::a2, 0, 2, false);
  return m;
}

// ---------------------------------------------------------------------------
// Steady state

struct SteadyStateOptions {
  double tol = 1e-10;           ///< max |d rho / dt| on the atom-diagonal blocks
  double t_max_per_kappa = 50;  ///< give up after t_max_per_kappa / kappa1
  int check_every = 25;         ///< steps between residual checks
};

/// Step used for steady-state searches: inside the evolve_density bound and the
/// RK4 stability region. The fixed point of an RK4 map on a linear system is the
/// kernel of the generator, so step size does not bias the result.
inline double steady_state_dt(const LiouvillianSpec& spec) {
  const Params& p = spec.params;
  const double gamma = spec.include_atom_decay ? p.gamma1 : 0.0;
  const double scale = std::abs(p.delta_r) + std::abs(p.chi) + p.kappa1 + std::abs(spec.omega_a1) + gamma;
  return std::min(0.09 / scale, 2.5 / Liouvillian(spec).spectral_bound());
}

/// Evolves atom_init x |0><0| until the atom-diagonal blocks are stationary.
///
/// With gamma1 = 0 every sz sector has its own steady state; the populations in
/// atom_init select the mixture. Coherences between sectors dephase slowly and are
/// not part of the convergence test.
inline DensityOperator steady_state_density(const LiouvillianSpec& spec, const AtomInit& atom_init,
                                            const SteadyStateOptions& opts = {}) {
  validate_spec(spec);
  const Liouvillian L(spec);
  const double dt = steady_state_dt(spec);
  const double t_max = opts.t_max_per_kappa / spec.params.kappa1;
  const auto max_steps = static_cast<std::size_t>(std::ceil(t_max / dt));
  auto f = [&L](double, const Matrix& rho) { return L.apply(rho); };

  Matrix rho = initial_density(spec, atom_init).matrix();
  for (std::size_t step = 0; step < max_steps; ++step) {
    rho = rk4_step(rho, dt * static_cast<double>(step), dt, f);
    if ((step + 1) % static_cast<std::size_t>(opts.check_every) == 0 &&
        L.population_residual(rho) < opts.tol) {
      return {spec.atom_dim(), spec.fock_cutoff, std::move(rho)};
    }
  }
  if (L.population_residual(rho) < opts.tol) return {spec.atom_dim(), spec.fock_cutoff, std::move(rho)};
  throw SolverError("steady state not reached");
}

/// Steady-state g2 with both atoms simulated, atom 2 a spectator.
inline double joint_bell_state_g2(const BellLikeState& s, const Params& p, int fock_cutoff = 12,
                                  const SteadyStateOptions& opts = {}) {
  LiouvillianSpec spec;
  spec.params = p;
  spec.params.gamma1 = 0.0;
  spec.fock_cutoff = fock_cutoff;
  spec.atom_mode = AtomMode::joint;
  spec.include_atom_decay = false;
  return g2_from_density(steady_state_density(spec, s, opts));
}

/// Steady coherent amplitude in the sz = sector subspace: -i eps / (i (delta_r + sector chi) + kappa1 / 2).
inline complex sector_amplitude(const Params& p, int sector) {
  validate_params(p);
  if (sector != 1 && sector != -1) throw ParameterError("sector must be +1 or -1");
  const complex i{0.0, 1.0};
  return -i * p.epsilon / (i * (p.delta_r + sector * p.chi) + p.kappa1 / 2.0);
}

}  // namespace cavg2::lindblad

#endif  // CAVG2_LINDBLAD_HPP
