#include "cavg2/analytic.hpp"
#include "cavg2/lindblad.hpp"
#include "cavg2/moments.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace cavg2;
using namespace cavg2::lindblad;

Params fig3(double delta_r) { return {15.0, 1.0, 0.0, 0.1, delta_r}; }

LiouvillianSpec make_spec(const Params& p, AtomMode mode = AtomMode::single, int cutoff = 12) {
  LiouvillianSpec s;
  s.params = p;
  s.atom_mode = mode;
  s.fock_cutoff = cutoff;
  return s;
}

// Textbook dense form of the master equation, for checking the structured one.
Matrix dense_rhs(const LiouvillianSpec& spec, const Matrix& rho) {
  const Operators ops = build_operators(spec);
  const Matrix H = build_hamiltonian(spec);
  const complex i{0.0, 1.0};
  const Matrix& a = ops.a;
  const Matrix ad = a.adjoint();
  Matrix out = -i * (H * rho - rho * H);
  out += 0.5 * spec.params.kappa1 * (2.0 * a * rho * ad - ad * a * rho - rho * ad * a);
  if (spec.include_atom_decay) {
    const Matrix& sm = ops.sigma_minus1;
    const Matrix sp = sm.adjoint();
    out += 0.5 * spec.params.gamma1 * (2.0 * sm * rho * sp - sp * sm * rho - rho * sp * sm);
  }
  return out;
}

Matrix random_density(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = complex(n(rng), n(rng));
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

double hermiticity_error(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

TEST(Hamiltonian, DiagonalWithoutCouplingOrDrive) {
  const LiouvillianSpec spec = make_spec({0.0, 1.0, 0.0, 0.0, 2.5}, AtomMode::single, 6);
  const Matrix H = build_hamiltonian(spec);
  EXPECT_LT((H - Matrix(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n <= 6; ++n) EXPECT_NEAR(H(s * 7 + n, s * 7 + n).real(), 2.5 * n, 1e-14);
  }
}

TEST(Hamiltonian, Hermitian) {
  for (AtomMode mode : {AtomMode::single, AtomMode::joint}) {
    LiouvillianSpec spec = make_spec({-7.0, 0.3, 0.0, 1.7, 4.0}, mode, 9);
    spec.omega_a1 = 3.3;
    EXPECT_LT(hermiticity_error(build_hamiltonian(spec)), 1e-12);
  }
}

TEST(Hamiltonian, ExcitedSectorIsShiftedOscillator) {
  LiouvillianSpec spec = make_spec(fig3(4.0), AtomMode::single, 8);
  spec.omega_a1 = 2.0;
  const Matrix H = build_hamiltonian(spec);
  const int fd = spec.fock_dim();
  const Matrix a = annihilation(8);
  const Matrix expected = (4.0 + 15.0) * a.adjoint() * a + 0.1 * (a + a.adjoint()) +
                          1.0 * Matrix::Identity(fd, fd);
  EXPECT_LT((H.block(fd, fd, fd, fd) - expected).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(H.block(0, fd, fd, fd).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hamiltonian, JointModeLeavesAtomTwoAlone) {
  const LiouvillianSpec spec = make_spec(fig3(4.0), AtomMode::joint, 5);
  const Matrix H = build_hamiltonian(spec);
  const int fd = spec.fock_dim();
  // Blocks for |g1 g2>, |g1 e2> coincide, as do |e1 g2>, |e1 e2>.
  EXPECT_LT((H.block(0, 0, fd, fd) - H.block(fd, fd, fd, fd)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((H.block(2 * fd, 2 * fd, fd, fd) - H.block(3 * fd, 3 * fd, fd, fd)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Liouvillian, StructuredMatchesDense) {
  for (AtomMode mode : {AtomMode::single, AtomMode::joint}) {
    for (bool decay : {false, true}) {
      LiouvillianSpec spec = make_spec({9.0, 1.3, 0.7, 0.8, -2.0}, mode, 6);
      spec.include_atom_decay = decay;
      spec.omega_a1 = 1.5;
      const Matrix rho = random_density(spec.dim(), 42);
      const Matrix diff = Liouvillian(spec).apply(rho) - dense_rhs(spec, rho);
      EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12) << static_cast<int>(mode) << decay;
    }
  }
}

TEST(Liouvillian, TraceAndHermiticityOfGenerator) {
  LiouvillianSpec spec = make_spec({9.0, 1.3, 0.7, 0.8, -2.0}, AtomMode::joint, 6);
  spec.include_atom_decay = true;
  const Matrix d = Liouvillian(spec).apply(random_density(spec.dim(), 7));
  EXPECT_NEAR(std::abs(d.trace()), 0.0, 1e-12);
  EXPECT_LT(hermiticity_error(d), 1e-12);
}

TEST(Evolve, UnitaryLimitKeepsPurity) {
  // Params rejects kappa1 = 0; a vanishing rate gives the unitary limit.
  Params p{15.0, 1e-300, 0.0, 0.0, 3.0};
  LiouvillianSpec spec = make_spec(p, AtomMode::single, 6);
  // Pure superposition of cavity states |1>, |2> with the atom in a coherent superposition.
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(spec.dim());
  psi(1) = 0.6;
  psi(7 + 2) = complex(0.0, 0.8);
  const DensityOperator rho0(2, 6, psi * psi.adjoint());
  const DensityOperator rho = evolve_density(rho0, spec, 2.0, 1e-4);
  // RK4 is not exactly unitary; its purity loss scales like dt^5.
  EXPECT_NEAR(rho.purity(), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
}

TEST(Evolve, DrivenEmptyCavityBecomesCoherent) {
  const Params p{0.0, 1.0, 0.0, 0.1, 2.0};
  const LiouvillianSpec spec = make_spec(p);
  const DensityOperator rho0 = initial_density(spec, AtomDiagonal::ground());
  const DensityOperator rho = evolve_density(rho0, spec, 40.0, moments::default_dt(p));
  const complex alpha = sector_amplitude(p, -1);
  EXPECT_NEAR(std::abs(normal_ordered(rho, spec, 0, 1, false) - alpha), 0.0, 1e-8);
  EXPECT_NEAR(nbar_from_density(rho), std::norm(alpha), 1e-9);
  EXPECT_NEAR(g2_from_density(rho), 1.0, 1e-6);
}

TEST(Evolve, TraceHermiticityPositivityAlongTrajectory) {
  LiouvillianSpec spec = make_spec({15.0, 1.0, 0.3, 0.5, -15.0}, AtomMode::single, 10);
  spec.include_atom_decay = true;
  const DensityOperator rho0 = initial_density(spec, AtomDiagonal::from_sigma_z(0.4));
  std::size_t step = 0;
  evolve_density(rho0, spec, 10.0, moments::default_dt(spec.params), [&](double, const Matrix& rho) {
    EXPECT_LE(std::abs(rho.trace() - 1.0), 1e-8);
    EXPECT_LE(hermiticity_error(rho), 1e-8);
    if (step++ % 500 == 0) {
      Tolerances tol;
      tol.trace = 1e-8;
      tol.hermiticity = 1e-8;
      tol.positivity_floor = -1e-7;
      EXPECT_FALSE(density_violation(DensityOperator(2, 10, rho), tol));
    }
  });
}

TEST(Evolve, RejectsMismatchAndLargeSteps) {
  const LiouvillianSpec spec = make_spec(fig3(15.0));
  const DensityOperator wrong = DensityOperator::product(Matrix::Identity(2, 2) / 2.0, 8);
  EXPECT_THROW(evolve_density(wrong, spec, 1.0, 1e-3), ParameterError);
  const DensityOperator rho0 = initial_density(spec, AtomDiagonal::excited());
  EXPECT_THROW(evolve_density(rho0, spec, 1.0, 0.01), ParameterError);
  LiouvillianSpec tiny = spec;
  tiny.fock_cutoff = 1;
  EXPECT_THROW(validate_spec(tiny), ParameterError);
}

TEST(Evolve, SectorPopulationsConserved) {
  const LiouvillianSpec spec = make_spec(fig3(7.0));
  const DensityOperator rho0 = initial_density(spec, AtomDiagonal::from_sigma_z(0.3));
  const int fd = spec.fock_dim();
  evolve_density(rho0, spec, 10.0, moments::default_dt(spec.params), [&](double, const Matrix& rho) {
    EXPECT_NEAR(rho.block(fd, fd, fd, fd).trace().real(), 0.65, 1e-10);
  });
}

TEST(Evolve, AtomicDecayFollowsClosedForm) {
  LiouvillianSpec spec = make_spec({15.0, 1.0, 0.2, 0.1, 15.0});
  spec.include_atom_decay = true;
  const double sz0 = 1.0 / 3.0;
  const DensityOperator rho0 = initial_density(spec, AtomDiagonal::from_sigma_z(sz0));
  double worst = 0.0;
  evolve_density(rho0, spec, 5.0, moments::default_dt(spec.params), [&](double t, const Matrix& rho) {
    const double sz = sigma_z_from_density(DensityOperator(2, 12, rho), spec);
    worst = std::max(worst, std::abs(sz - analytic::sigma_z_decay(sz0, 0.2, t)));
  });
  EXPECT_LT(worst, 1e-6);
}

TEST(G2FromDensity, ReferenceStates) {
  const int N = 40;
  const int fd = N + 1;
  // Coherent state, |alpha|^2 = 0.5.
  const complex alpha(0.4, -0.58309518948453);
  Eigen::VectorXcd psi(2 * fd);
  psi.setZero();
  complex amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < fd; ++n) {
    psi(n) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  EXPECT_NEAR(g2_from_density(DensityOperator(2, N, psi * psi.adjoint())), 1.0, 1e-6);

  // Fock state |1>.
  Matrix one = Matrix::Zero(2 * fd, 2 * fd);
  one(fd + 1, fd + 1) = 1.0;
  EXPECT_EQ(g2_from_density(DensityOperator(2, N, one)), 0.0);

  // Thermal state with nbar = 0.5, expected value by direct sum.
  const double q = 0.5 / 1.5;
  Matrix thermal = Matrix::Zero(2 * fd, 2 * fd);
  double s1 = 0.0;
  double s2 = 0.0;
  for (int n = 0; n < fd; ++n) {
    const double pn = (1.0 - q) * std::pow(q, n);
    thermal(n, n) = pn;
    s1 += n * pn;
    s2 += n * (n - 1.0) * pn;
  }
  EXPECT_NEAR(s2 / (s1 * s1), 2.0, 1e-6);
  EXPECT_NEAR(g2_from_density(DensityOperator(2, N, thermal)), 2.0, 1e-6);

  EXPECT_THROW(g2_from_density(DensityOperator::product(Matrix::Identity(2, 2) / 2.0, 4)), ParameterError);
}

TEST(MomentsFromDensity, MatchesDenseOperators) {
  const LiouvillianSpec spec = make_spec(fig3(1.0), AtomMode::joint, 5);
  const DensityOperator rho(4, 5, random_density(spec.dim(), 3));
  const Operators ops = build_operators(spec);
  const Matrix& a = ops.a;
  const Matrix ad = a.adjoint();
  const Matrix& sz = ops.sigma_z1;
  const MomentVector m = moments_from_density(rho, spec);
  auto tr = [&](const Matrix& op) { return (op * rho.matrix()).trace(); };
  EXPECT_NEAR(std::abs(m[Moment::n] - tr(ad * a)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::sz_ad] - tr(sz * ad)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::ad2_a2] - tr(ad * ad * a * a)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::ad2_a] - tr(ad * ad * a)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::ad_a2_sz] - tr(ad * a * a * sz)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::ad2_sz] - tr(ad * ad * sz)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::a2] - tr(a * a)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(m[Moment::sz] - tr(sz)), 0.0, 1e-13);
}

TEST(SteadyState, FigureTwoAndThreeValues) {
  const LiouvillianSpec plus = make_spec(fig3(15.0));
  EXPECT_NEAR(g2_from_density(steady_state_density(plus, AtomDiagonal::excited())), 1.0, 1e-3);
  EXPECT_NEAR(g2_from_density(steady_state_density(plus, AtomDiagonal::from_sigma_z(0.0))), 1.99889, 1e-3);
  const LiouvillianSpec minus = make_spec(fig3(-15.0));
  const DensityOperator rho = steady_state_density(minus, AtomDiagonal{{1.0 / 3.0, 2.0 / 3.0}});
  EXPECT_NEAR(g2_from_density(rho), 1.49959, 1e-3);
  EXPECT_NEAR(g2_from_density(rho), analytic::g2_exact(fig3(-15.0), 1.0 / 3.0), 1e-8);
  EXPECT_FALSE(density_violation(rho));
}

TEST(SteadyState, SectorAmplitudeMatchesBruteForce) {
  const Params p = fig3(-15.0);
  const LiouvillianSpec spec = make_spec(p);
  const DensityOperator rho = steady_state_density(spec, AtomDiagonal::excited());
  EXPECT_NEAR(nbar_from_density(rho), std::norm(sector_amplitude(p, +1)), 1e-6);
  EXPECT_NEAR(std::abs(normal_ordered(rho, spec, 0, 1, false) - sector_amplitude(p, +1)), 0.0, 1e-8);
}

TEST(SteadyState, ReportsNonConvergence) {
  const LiouvillianSpec spec = make_spec(fig3(15.0));
  SteadyStateOptions opts;
  opts.t_max_per_kappa = 2.0;
  EXPECT_THROW(steady_state_density(spec, AtomDiagonal::excited(), opts), SolverError);
}

TEST(SteadyState, InitialStateValidation) {
  const LiouvillianSpec spec = make_spec(fig3(15.0));
  EXPECT_THROW(initial_density(spec, AtomDiagonal{{0.5, 0.6}}), ParameterError);
  EXPECT_THROW(initial_density(spec, AtomDiagonal{{0.25, 0.25, 0.25, 0.25}}), ParameterError);
  EXPECT_THROW(initial_density(spec, AtomDiagonal{{1.5, -0.5}}), ParameterError);
}

TEST(SteadyState, BellStateReducesToDiagonalAtom) {
  const LiouvillianSpec spec = make_spec(fig3(15.0));
  const auto s = BellLikeState::phi(std::sqrt(2.0 / 3.0), complex(0.0, std::sqrt(1.0 / 3.0)));
  const Matrix atom = atom_density(spec, s);
  EXPECT_NEAR(atom(1, 1).real(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(atom(0, 0).real(), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(atom(0, 1), complex(0.0));
}

TEST(SectorAmplitude, Examples) {
  EXPECT_EQ(sector_amplitude(Params{15.0, 1.0, 0.0, 0.0, 3.0}, 1), complex(0.0));
  const complex resonant = sector_amplitude(fig3(-15.0), +1);
  EXPECT_NEAR(std::abs(resonant - complex(0.0, -0.2)), 0.0, 1e-15);
  EXPECT_NEAR(std::norm(sector_amplitude(fig3(15.0), -1)), analytic::sector_population(fig3(15.0), -1), 1e-15);
  EXPECT_THROW(sector_amplitude(fig3(0.0), 0), ParameterError);
}

TEST(Joint, LocationIndependence) {
  const double h = 1.0 / std::sqrt(2.0);
  const BellLikeState psi = BellLikeState::psi(h, h);
  const BellLikeState phi = BellLikeState::phi(std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0));
  for (const auto& [state, d, expected] : {std::tuple{psi, 15.0, 1.99889}, std::tuple{phi, 15.0, 2.99668},
                                           std::tuple{phi, -15.0, 1.49959}}) {
    const Params p = fig3(d);
    const double joint = joint_bell_state_g2(state, p);
    const DensityOperator single =
        steady_state_density(make_spec(p), AtomDiagonal::from_sigma_z(analytic::sigma_z_of_state(state)));
    EXPECT_NEAR(joint, g2_from_density(single), 1e-6);
    EXPECT_NEAR(joint, expected, 1e-3);
    EXPECT_NEAR(joint, analytic::g2_exact(p, analytic::sigma_z_of_state(state)), 1e-3);
  }
}

TEST(Joint, ProductStateIsPoissonian) {
  EXPECT_NEAR(joint_bell_state_g2(BellLikeState::psi(0.0, 1.0), fig3(15.0)), 1.0, 1e-6);
}

TEST(Joint, AmplitudePhasesDoNotMatter) {
  const double h = 1.0 / std::sqrt(2.0);
  const double a = joint_bell_state_g2(BellLikeState::psi(h, h), fig3(15.0), 8);
  const double b = joint_bell_state_g2(BellLikeState::psi(h, std::polar(h, 1.1)), fig3(15.0), 8);
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(Truncation, DoublingCutoffChangesLittle) {
  // Resonant sector holds nbar = 0.25, so N >= nbar + 8 sqrt(nbar) + 8 gives N = 13.
  const Params p{5.0, 2.0, 0.0, 0.5, -5.0};
  const double nmax = std::norm(sector_amplitude(p, +1));
  const int N = static_cast<int>(std::ceil(nmax + 8.0 * std::sqrt(nmax) + 8.0));
  const double g_small = g2_from_density(steady_state_density(make_spec(p, AtomMode::single, N),
                                                              AtomDiagonal::from_sigma_z(0.2)));
  const double g_big = g2_from_density(steady_state_density(make_spec(p, AtomMode::single, 2 * N),
                                                            AtomDiagonal::from_sigma_z(0.2)));
  EXPECT_LT(std::abs(g_small - g_big), 1e-6);
}

}  // namespace
