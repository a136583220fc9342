#ifndef CAVG2_CORE_HPP
#define CAVG2_CORE_HPP

// Domain types shared by every solver.
//
// Units: frequencies and rates in MHz (angular, hbar = 1), time in microseconds.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cavg2 {

using complex = std::complex<double>;

/// Raised for invalid inputs (bad parameters, out-of-domain arguments).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a solver cannot produce a result (singular system, no convergence).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Library-wide tolerances. Every checker takes one, defaulted to these values.
struct Tolerances {
  double normalization = 1e-12;
  double trace = 1e-9;
  double hermiticity = 1e-9;
  double positivity_floor = -1e-8;
  double conjugate_pairing = 1e-9;
};

// ---------------------------------------------------------------------------
// Params

/// Physical parameters of the driven atom-cavity system.
struct Params {
  double chi = 15.0;     ///< dispersive shift
  double kappa1 = 1.0;   ///< cavity energy decay rate
  double gamma1 = 0.0;   ///< atomic decay rate
  double epsilon = 0.1;  ///< drive amplitude
  double delta_r = 0.0;  ///< cavity-drive detuning omega_c1 - omega_d

  [[nodiscard]] Params with_delta_r(double d) const {
    Params p = *this;
    p.delta_r = d;
    return p;
  }
  [[nodiscard]] Params with_epsilon(double e) const {
    Params p = *this;
    p.epsilon = e;
    return p;
  }
};

/// Returns a description of the first violated invariant, if any.
inline std::optional<std::string> params_violation(const Params& p) {
  for (double v : {p.chi, p.kappa1, p.gamma1, p.epsilon, p.delta_r}) {
    if (!std::isfinite(v)) return "parameters must be finite";
  }
  if (p.kappa1 <= 0.0) return "kappa1 must be positive";
  if (p.epsilon < 0.0) return "epsilon must be non-negative";
  if (p.gamma1 < 0.0) return "gamma1 must be non-negative";
  return std::nullopt;
}

inline const Params& validate_params(const Params& p) {
  if (auto why = params_violation(p)) throw ParameterError(*why);
  return p;
}

// ---------------------------------------------------------------------------
// RawFrequencies

/// Lab-frame frequencies, used only to derive (chi, delta_r).
struct RawFrequencies {
  double omega_a1 = 0.0;
  double omega_c1 = 0.0;
  double omega_d = 0.0;
  double g = 0.0;
  double Delta = 0.0;  ///< omega_a1 - omega_c1
};

inline std::optional<std::string> raw_frequencies_violation(const RawFrequencies& r,
                                                            double tol = 1e-9) {
  for (double v : {r.omega_a1, r.omega_c1, r.omega_d, r.g, r.Delta}) {
    if (!std::isfinite(v)) return "frequencies must be finite";
  }
  if (r.Delta == 0.0) return "Delta must be nonzero";
  const double expected = r.omega_a1 - r.omega_c1;
  if (std::abs(r.Delta - expected) > tol * std::max(1.0, std::abs(expected))) {
    return "Delta must equal omega_a1 - omega_c1";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// BellLikeState

enum class BellFamily {
  Psi,  ///< c0 |g1 g2> + c1 |e1 e2>
  Phi,  ///< c0 |e1 g2> + c1 |g1 e2>
};

inline std::string_view to_string(BellFamily f) { return f == BellFamily::Psi ? "psi" : "phi"; }

/// Pure two-atom state of Bell-like form. Amplitudes keep their phases.
class BellLikeState {
public:
  BellLikeState(BellFamily family, complex c0, complex c1, const Tolerances& tol = {})
      : family_(family), c0_(c0), c1_(c1) {
    if (!std::isfinite(c0.real()) || !std::isfinite(c0.imag()) || !std::isfinite(c1.real()) ||
        !std::isfinite(c1.imag())) {
      throw ParameterError("amplitudes must be finite");
    }
    const double norm = std::norm(c0) + std::norm(c1);
    if (std::abs(norm - 1.0) > tol.normalization) {
      throw ParameterError("Bell-like state is not normalized: |c0|^2 + |c1|^2 = " +
                           std::to_string(norm));
    }
  }

  static BellLikeState psi(complex c0, complex c1) { return {BellFamily::Psi, c0, c1}; }
  static BellLikeState phi(complex c0, complex c1) { return {BellFamily::Phi, c0, c1}; }

  [[nodiscard]] BellFamily family() const { return family_; }
  [[nodiscard]] complex c0() const { return c0_; }
  [[nodiscard]] complex c1() const { return c1_; }

  /// Amplitudes in the joint atom basis |s1 s2>, index 2*s1 + s2 with g = 0, e = 1.
  [[nodiscard]] std::array<complex, 4> joint_amplitudes() const {
    std::array<complex, 4> v{};
    if (family_ == BellFamily::Psi) {
      v[0] = c0_;  // |g g>
      v[3] = c1_;  // |e e>
    } else {
      v[2] = c0_;  // |e g>
      v[1] = c1_;  // |g e>
    }
    return v;
  }

private:
  BellFamily family_;
  complex c0_;
  complex c1_;
};

// ---------------------------------------------------------------------------
// MomentVector

/// Index of each operator expectation value in a MomentVector.
enum class Moment : std::size_t {
  n,         ///< <a+ a>
  a,         ///< <a>
  ad,        ///< <a+>
  sz_a,      ///< <sz a>
  sz_ad,     ///< <sz a+>
  sz,        ///< <sz>
  ad2_a2,    ///< <a+^2 a^2>
  ad2_a,     ///< <a+^2 a>
  ad_a2,     ///< <a+ a^2>
  ad2_a_sz,  ///< <a+^2 a sz>
  ad_a_sz,   ///< <a+ a sz>
  ad2_sz,    ///< <a+^2 sz>
  ad_a2_sz,  ///< <a+ a^2 sz>
  a2_sz,     ///< <a^2 sz>
  ad2,       ///< <a+^2>
  a2,        ///< <a^2>
};

inline constexpr std::size_t kMomentCount = 16;

inline constexpr std::array<std::string_view, kMomentCount> kMomentNames = {
    "<a+a>",    "<a>",      "<a+>",      "<sz a>",      "<sz a+>",  "<sz>",
    "<a+2a2>",  "<a+2a>",   "<a+a2>",    "<a+2a sz>",   "<a+a sz>", "<a+2 sz>",
    "<a+a2 sz>", "<a2 sz>", "<a+2>",     "<a2>"};

struct MomentVector {
  using Storage = Eigen::Matrix<complex, kMomentCount, 1>;
  Storage values = Storage::Zero();

  complex& operator[](Moment m) { return values(static_cast<Eigen::Index>(m)); }
  const complex& operator[](Moment m) const { return values(static_cast<Eigen::Index>(m)); }

  /// Vacuum cavity with the atom at the given <sz>.
  static MomentVector vacuum(double sz) {
    MomentVector m;
    m[Moment::sz] = sz;
    return m;
  }
};

inline std::optional<std::string> moment_violation(const MomentVector& m,
                                                   const Tolerances& tol = {}) {
  for (Eigen::Index i = 0; i < m.values.size(); ++i) {
    if (!std::isfinite(m.values(i).real()) || !std::isfinite(m.values(i).imag())) {
      return std::string("non-finite entry ") + std::string(kMomentNames[i]);
    }
  }
  const double t = tol.conjugate_pairing;
  auto paired = [&](Moment x, Moment y) { return std::abs(m[x] - std::conj(m[y])) <= t; };
  if (!paired(Moment::ad, Moment::a)) return "<a+> != conj <a>";
  if (!paired(Moment::sz_ad, Moment::sz_a)) return "<sz a+> != conj <sz a>";
  if (!paired(Moment::ad2_a, Moment::ad_a2)) return "<a+2a> != conj <a+a2>";
  if (!paired(Moment::ad2, Moment::a2)) return "<a+2> != conj <a2>";
  if (!paired(Moment::ad2_sz, Moment::a2_sz)) return "<a+2 sz> != conj <a2 sz>";
  if (!paired(Moment::ad2_a_sz, Moment::ad_a2_sz)) return "<a+2a sz> != conj <a+a2 sz>";
  auto real_nonneg = [&](Moment x) {
    return std::abs(m[x].imag()) <= t && m[x].real() >= -t;
  };
  if (!real_nonneg(Moment::n)) return "<a+a> must be real and non-negative";
  if (!real_nonneg(Moment::ad2_a2)) return "<a+2a2> must be real and non-negative";
  if (std::abs(m[Moment::sz].imag()) > t || std::abs(m[Moment::sz].real()) > 1.0 + t) {
    return "<sz> must be real in [-1, 1]";
  }
  if (std::abs(m[Moment::ad_a_sz].imag()) > t) return "<a+a sz> must be real";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DensityOperator

/// Joint density matrix on (atoms) x (cavity Fock levels 0..N).
///
/// Basis index is atom_state * (N + 1) + n. Atom states are g = 0, e = 1 for one
/// atom, and 2 * s1 + s2 for two atoms.
class DensityOperator {
public:
  using Matrix = Eigen::MatrixXcd;

  DensityOperator(int atom_dim, int fock_cutoff, Matrix entries)
      : atom_dim_(atom_dim), fock_cutoff_(fock_cutoff), entries_(std::move(entries)) {
    if (atom_dim != 2 && atom_dim != 4) throw ParameterError("atom_dim must be 2 or 4");
    if (fock_cutoff < 1) throw ParameterError("fock_cutoff must be at least 1");
    const Eigen::Index d = dim();
    if (entries_.rows() != d || entries_.cols() != d) {
      throw ParameterError("density matrix size does not match atom_dim * (N + 1)");
    }
  }

  [[nodiscard]] int atom_dim() const { return atom_dim_; }
  [[nodiscard]] int fock_cutoff() const { return fock_cutoff_; }
  [[nodiscard]] int fock_dim() const { return fock_cutoff_ + 1; }
  [[nodiscard]] Eigen::Index dim() const {
    return static_cast<Eigen::Index>(atom_dim_) * (fock_cutoff_ + 1);
  }
  [[nodiscard]] const Matrix& matrix() const { return entries_; }

  [[nodiscard]] complex trace() const { return entries_.trace(); }
  [[nodiscard]] double purity() const { return (entries_ * entries_).trace().real(); }

  /// Product state: atom density (atom_dim x atom_dim) times cavity Fock state |n><n|.
  static DensityOperator product(const Eigen::MatrixXcd& atom, int fock_cutoff, int n = 0) {
    const int ad = static_cast<int>(atom.rows());
    const int fd = fock_cutoff + 1;
    Matrix rho = Matrix::Zero(ad * fd, ad * fd);
    for (int s = 0; s < ad; ++s) {
      for (int t = 0; t < ad; ++t) rho(s * fd + n, t * fd + n) = atom(s, t);
    }
    return {ad, fock_cutoff, std::move(rho)};
  }

private:
  int atom_dim_;
  int fock_cutoff_;
  Matrix entries_;
};

inline std::optional<std::string> density_violation(const DensityOperator& rho,
                                                    const Tolerances& tol = {}) {
  const auto& m = rho.matrix();
  if (!m.allFinite()) return "non-finite entries";
  if (std::abs(rho.trace() - 1.0) > tol.trace) return "trace differs from 1";
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity) return "not Hermitian";
  const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < tol.positivity_floor) return "negative eigenvalue";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Results

enum class Method { analytic, mixture, moments, lindblad };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::mixture: return "mixture";
    case Method::moments: return "moments";
    case Method::lindblad: return "lindblad";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::analytic, Method::mixture, Method::moments, Method::lindblad}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

struct G2Point {
  double delta_r = 0.0;
  double g2 = 1.0;
  double nbar = 0.0;
  Method method = Method::analytic;
};

inline bool g2_point_valid(const G2Point& pt) {
  return std::isfinite(pt.g2) && pt.g2 > 0.0 && std::isfinite(pt.nbar) && pt.nbar >= 0.0;
}

struct ConcurrenceReport {
  double g2_plus = 0.0;   ///< g2 at delta_r = +chi
  double g2_minus = 0.0;  ///< g2 at delta_r = -chi
  double c_raw = 0.0;
  double c_clamped = 0.0;
  double c_wootters = 0.0;
  double rel_error = 0.0;  ///< |c_raw - c_wootters| / c_wootters (absolute when c_wootters = 0)
  std::string warning;     ///< empty unless the estimate is outside its regime of validity
};

}  // namespace cavg2

#endif  // CAVG2_CORE_HPP
