// test_dynamics.cpp — master equation, dark states, single-excitation dynamics, disorder

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "somc/somc.hpp"

using namespace somc;

namespace {

// Operators built from 2x2 blocks; qubit 0 is the leftmost Kronecker factor.
ComplexMatrix embed(const Eigen::Matrix2cd& op, int m, int n) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        const ComplexMatrix f = q == m ? ComplexMatrix(op) : ComplexMatrix::Identity(2, 2);
        ComplexMatrix k(out.rows() * 2, out.cols() * 2);
        for (int i = 0; i < out.rows(); ++i)
            for (int j = 0; j < out.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
        out = k;
    }
    return out;
}

ComplexMatrix sm(int m, int n) {
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 1) = 1.0; // |g><e|, g = 0
    return embed(s, m, n);
}

ComplexMatrix sz(int m, int n) {
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return embed(s, m, n);
}

ComplexMatrix D(const ComplexMatrix& O, const ComplexMatrix& r) {
    const ComplexMatrix OdO = O.adjoint() * O;
    return O * r * O.adjoint() - 0.5 * (OdO * r + r * OdO);
}

ComplexMatrix comm(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

// Generator written term by term; spin i feeds spin j > i through gamma1.
ComplexMatrix reference_rhs(const ComplexMatrix& r, const DriveConfig& d, const ChiralBathConfig& b, int n) {
    const int D2 = 1 << n;
    ComplexMatrix H = ComplexMatrix::Zero(D2, D2);
    for (int m = 0; m < n; ++m)
        H += -0.5 * d.delta[m] * sz(m, n) + d.Omega[m] * sm(m, n) + std::conj(d.Omega[m]) * sm(m, n).adjoint();
    for (int m = 0; m + 1 < n; ++m) {
        const ComplexMatrix x = sm(m, n) * sm(m + 1, n).adjoint();
        H += b.g_s * (x + x.adjoint());
    }
    ComplexMatrix out = cd(0.0, -1.0) * comm(H, r);
    for (int m = 0; m < n; ++m) out += (b.gamma1 + b.gamma2) * D(sm(m, n), r) + b.gamma_s * D(sz(m, n), r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double c = i < j ? b.gamma1 * (1.0 - b.eta1) : b.gamma2 * (1.0 - b.eta2);
            out += c * (comm(sm(i, n) * r, sm(j, n).adjoint()) + comm(sm(j, n), r * sm(i, n).adjoint()));
        }
    return out;
}

ComplexMatrix random_density(std::mt19937_64& rng, int D2) {
    std::normal_distribution<double> n;
    ComplexMatrix A(D2, D2);
    for (int i = 0; i < D2; ++i)
        for (int j = 0; j < D2; ++j) A(i, j) = cd(n(rng), n(rng));
    ComplexMatrix r = A * A.adjoint();
    return r / r.trace().real();
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

DriveConfig uniform_drive(int n, double O, std::vector<double> delta) {
    DriveConfig d;
    d.Omega.assign(n, cd(O));
    d.delta = std::move(delta);
    return d;
}

ComplexMatrix ground(int n) { return projector(ops::basis_state(0, 1 << n)); }

} // namespace

TEST(Master, MatchesTermByTermGenerator) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n : {1, 2, 3}) {
        for (int t = 0; t < 5; ++t) {
            DriveConfig d;
            for (int m = 0; m < n; ++m) {
                d.Omega.emplace_back(u(rng), u(rng) - 0.5);
                d.delta.push_back(u(rng) - 0.5);
            }
            ChiralBathConfig b;
            b.gamma2 = 0.3 * u(rng);
            b.eta1 = 0.5 * u(rng);
            b.eta2 = u(rng);
            b.g_s = 0.2 * u(rng);
            b.gamma_s = 0.1 * u(rng);
            const auto r = random_density(rng, 1 << n);
            ChiralMasterEquation me(n, d, b);
            const ComplexMatrix out = me.rhs(r);
            EXPECT_LE((out - reference_rhs(r, d, b, n)).cwiseAbs().maxCoeff(), 1e-13) << n;
            EXPECT_NEAR(std::abs(out.trace()), 0.0, 1e-12);
            EXPECT_LE((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
            EXPECT_LE((lindblad_rhs(r, d, b) - out).cwiseAbs().maxCoeff(), 0.0);
        }
    }
}

TEST(Master, SuperoperatorMatchesRhs) {
    std::mt19937_64 rng(11);
    const auto d = uniform_drive(3, 0.5, {0.3, -0.1, 0.2});
    ChiralBathConfig b;
    b.eta1 = 0.01;
    b.gamma_s = 0.001;
    b.g_s = 0.01;
    ChiralMasterEquation me(3, d, b);
    const ComplexMatrix L = me.superoperator();
    const auto r = random_density(rng, 8);
    const ComplexVector v = Eigen::Map<const ComplexVector>(r.data(), 64);
    const ComplexVector w = L * v;
    const ComplexMatrix out = Eigen::Map<const ComplexMatrix>(w.data(), 8, 8);
    EXPECT_LE((out - me.rhs(r)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Master, CascadedDecayEmptiesTheRegister) {
    const auto d = uniform_drive(2, 0.0, {0.0, 0.0});
    ChiralBathConfig b;
    b.gamma2 = 0.0;
    const ComplexMatrix ee = projector(ops::basis_state(3, 4));
    const auto tr = evolve_master(ee, d, b, linear_grid(30.0, 31), MasterOptions{});
    EXPECT_GT(tr.populations.back()[0], -1e-12);
    EXPECT_LT(tr.populations.back()[0] + tr.populations.back()[1], 1e-10);
    for (double e : tr.trace_err) EXPECT_LE(e, 1e-9);
}

TEST(Master, DarkVacuumWithoutDrive) {
    const auto d = uniform_drive(3, 0.0, {0.2, -0.3, 0.1});
    ChiralBathConfig b;
    b.gamma_s = 0.01;
    MasterOptions o;
    o.store_states = true;
    const auto tr = evolve_master(ground(3), d, b, linear_grid(10.0, 11), o);
    for (const auto& r : tr.rho) EXPECT_LE((r - ground(3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Master, DimerSteadyStateAgreesWithLongIntegration) {
    const double tau = steady_time(0.5, 0.0, 1.0, 0.02);
    const auto d = uniform_drive(2, 0.5, {0.0, 0.0});
    ChiralBathConfig b;
    ChiralMasterEquation me(2, d, b);
    const auto target = dimer_target(0.5, 0.0, 1.0, 0.02);
    MasterOptions o;
    o.target = target;
    const auto tr = evolve_master(me, ground(2), linear_grid(20.0 * tau, 401), o);
    const ComplexMatrix ss = steady_state(me);
    EXPECT_GE(fidelity(ss, target), 0.99);
    EXPECT_NEAR(tr.fidelity.back(), fidelity(ss, target), 1e-6);
    EXPECT_NEAR(ss.trace().real(), 1.0, 1e-12);
    for (double e : tr.trace_err) EXPECT_LE(e, 1e-9);
    for (double e : tr.min_eigenvalue) EXPECT_GE(e, -1e-7);
}

TEST(Master, IdealDimerFidelityHighByThreeTau) {
    for (double d1 : {0.0, 0.4}) {
        const double tau = steady_time(0.5, d1, 1.0, 0.02);
        MasterOptions o;
        o.target = dimer_target(0.5, d1, 1.0, 0.02);
        const auto tr = evolve_master(ground(2), uniform_drive(2, 0.5, {d1, -d1}), ChiralBathConfig{},
                                      linear_grid(3.0 * tau, 61), o);
        EXPECT_GE(tr.fidelity.back(), 0.99) << d1;
    }
}

TEST(Master, IdealTargetsAreDark) {
    ChiralBathConfig b;
    const ComplexMatrix dimer = projector(dimer_target(0.5, 0.3, 1.0, 0.02));
    EXPECT_LE(lindblad_rhs(dimer, uniform_drive(2, 0.5, {0.3, -0.3}), b).cwiseAbs().maxCoeff(), 1e-14);
    const ComplexMatrix tet = projector(tetramer_target(0.5, 0.6, 0.4, 1.0, 0.02));
    EXPECT_LE(lindblad_rhs(tet, uniform_drive(4, 0.5, {0.6, 0.4, -0.6, -0.4}), b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Master, NoisyDimerConcurrence) {
    ChiralBathConfig b;
    b.eta1 = 0.01;
    b.gamma_s = 0.001;
    const ComplexMatrix ss = steady_state(2, uniform_drive(2, 0.5, {0.0, 0.0}), b);
    const double c = concurrence(reduced_pair(ss, 0, 1));
    EXPECT_NEAR(c, 0.64112, 5e-5);
    EXPECT_LT(c, 0.6756);
}

TEST(Master, Errors) {
    const auto d = uniform_drive(2, 0.5, {0.0, 0.0});
    EXPECT_THROW(evolve_master(ground(2), d, ChiralBathConfig{}, {0.0, 1.0, 1.0}), Error);
    EXPECT_THROW(evolve_master(ground(2), d, ChiralBathConfig{}, {0.5, 1.0}), Error);
    try {
        ChiralMasterEquation(3, d, ChiralBathConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(SteadyTime, FormulaCases) {
    EXPECT_NEAR(steady_time(0.5, 0.0, 1.0, 0.02), 9.4939719680599, 1e-10);
    EXPECT_NEAR(steady_time(0.0, 0.3, 1.0, 0.02), pi / 1.02, 1e-14);
    double prev = 0.0;
    for (double O : {0.0, 0.1, 0.3, 0.5, 1.0}) {
        const double t = steady_time(O, 0.2, 1.0, 0.02);
        EXPECT_GT(t, prev);
        prev = t;
    }
    try {
        steady_time(0.5, 0.0, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularCoefficient);
    }
}

// Characteristic time of the trajectory: first t with F(t) >= (1 - 1/e) F_steady.
TEST(SteadyTime, AgreesWithTrajectoryWithinFactorTwo) {
    const double tau = steady_time(0.5, 0.0, 1.0, 0.02);
    const auto d = uniform_drive(2, 0.5, {0.0, 0.0});
    ChiralMasterEquation me(2, d, ChiralBathConfig{});
    const auto target = dimer_target(0.5, 0.0, 1.0, 0.02);
    MasterOptions o;
    o.target = target;
    const auto tr = evolve_master(me, ground(2), linear_grid(5.0 * tau, 2001), o);
    const double f_ss = fidelity(steady_state(me), target);
    double t_e = -1.0;
    for (std::size_t i = 0; i < tr.times.size() && t_e < 0.0; ++i)
        if (tr.fidelity[i] >= (1.0 - std::exp(-1.0)) * f_ss) t_e = tr.times[i];
    ASSERT_GT(t_e, 0.0);
    EXPECT_GE(t_e, 0.5 * tau);
    EXPECT_LE(t_e, 2.0 * tau);
}

TEST(Targets, Dimer) {
    const auto v = dimer_target(0.5, 0.0, 1.0, 0.02);
    EXPECT_NEAR(v.norm(), 1.0, 1e-15);
    const double a2 = 2.0 / (0.98 * 0.98);
    EXPECT_NEAR(std::norm(v(1)) + std::norm(v(2)), a2 / (1.0 + a2), 1e-14);
    EXPECT_NEAR(concurrence(projector(v)), a2 / (1.0 + a2), 1e-9);
    EXPECT_NEAR(concurrence(projector(v)), 0.6756, 0.005);
    EXPECT_NEAR(std::abs(v(1) + v(2)), 0.0, 1e-15); // singlet
    EXPECT_NEAR(std::abs(dimer_target(0.0, 0.0, 1.0, 0.02)(0)), 1.0, 1e-15);
    EXPECT_GT(std::abs(dimer_target(0.5, 1e6, 1.0, 0.02)(0)), 1.0 - 1e-9);
}

TEST(Targets, Tetramer) {
    const auto v = tetramer_target(0.5, 0.6, 0.4, 1.0, 0.02);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    const ComplexMatrix r = projector(v);
    double best = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double c = concurrence(reduced_pair(r, i, j));
            EXPECT_GE(c, 0.0);
            EXPECT_LE(c, 1.0);
            best = std::max(best, c);
        }
    EXPECT_GT(best, 0.1);
    EXPECT_NEAR(std::abs(tetramer_target(0.0, 0.6, 0.4, 1.0, 0.02)(0)), 1.0, 1e-15);
    try {
        tetramer_target(0.5, 0.0, 0.0, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularCoefficient);
    }
}

TEST(Measures, FidelityAndConcurrence) {
    const auto v = dimer_target(0.5, 0.2, 1.0, 0.02);
    EXPECT_NEAR(fidelity(projector(v), v), 1.0, 1e-14);
    ComplexVector singlet = ComplexVector::Zero(4);
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    EXPECT_NEAR(concurrence(projector(singlet)), 1.0, 1e-12);
    EXPECT_NEAR(concurrence(ground(2)), 0.0, 1e-15);
    EXPECT_NEAR(concurrence(ComplexMatrix::Identity(4, 4) / 4.0), 0.0, 1e-15);
    EXPECT_THROW(concurrence(ground(3)), Error);
    EXPECT_THROW(fidelity(ground(2), ops::basis_state(0, 8)), Error);
}

TEST(Schrodinger, Rk4MatchesExactPropagation) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n;
    const int D2 = 20;
    ComplexMatrix A(D2, D2);
    for (int i = 0; i < D2; ++i)
        for (int j = 0; j < D2; ++j) A(i, j) = cd(n(rng), n(rng));
    const ComplexMatrix H = 0.5 * (A + A.adjoint());
    ComplexVector psi = ComplexVector::Zero(D2);
    psi(3) = 1.0;
    const auto grid = linear_grid(5.0, 51);
    const auto a = evolve_single_excitation(H, psi, grid);
    const auto b = propagate_exact(H, psi, grid);
    EXPECT_LE(max_population_deviation(a, b), 1e-9);
    for (double e : a.trace_err) EXPECT_LE(e, 1e-9);
}

TEST(Schrodinger, DiagonalHamiltonianKeepsPopulations) {
    ComplexMatrix H = ComplexMatrix::Zero(4, 4);
    H.diagonal() << 0.3, -1.0, 2.0, 0.7;
    ComplexVector psi(4);
    psi << 0.5, cd(0.0, 0.5), -0.5, 0.5;
    const auto tr = evolve_single_excitation(H, psi, linear_grid(10.0, 21));
    for (const auto& p : tr.populations)
        for (double x : p) EXPECT_NEAR(x, 0.25, 1e-9);
}

TEST(Schrodinger, TwoSpinRabiPeriod) {
    const cd g(0.03, 0.0);
    SpinCouplingMatrix c{ComplexMatrix::Zero(2, 2), {0, 1}};
    c.g(0, 1) = g;
    const auto Hs = build_spin_hamiltonian(c, 2, Sector::SingleExcitation);
    const double T = pi / std::abs(g);
    const auto tr = evolve_effective(Hs, ops::basis_state(0, 2), {0.0, 0.5 * T, T, 2.0 * T});
    EXPECT_NEAR(tr.populations[1][0], 0.0, 1e-9);
    EXPECT_NEAR(tr.populations[1][1], 1.0, 1e-9);
    EXPECT_NEAR(tr.populations[2][0], 1.0, 1e-9);
    EXPECT_NEAR(tr.populations[3][0], 1.0, 1e-9);
}

TEST(Schrodinger, MirrorSymmetricThreeSpins) {
    LatticeParams p;
    SpinConfig s;
    s.positions = {-1, 0, 1};
    const auto g = effective_couplings(bound_amplitudes(p, s.g_eff, 0.0), s);
    const auto Hs = build_spin_hamiltonian(g, 3, Sector::SingleExcitation);
    const double T = 4.0 * pi / std::abs(g.g(0, 1));
    const auto tr = evolve_effective(Hs, ops::basis_state(1, 3), linear_grid(T, 101));
    for (const auto& pop : tr.populations) EXPECT_NEAR(pop[0], pop[2], 1e-12);
}

TEST(Schrodinger, EvenNeighboursFilledByTwoHops) {
    LatticeParams p;
    SpinConfig s;
    s.positions = {-2, -1, 0, 1, 2};
    const auto g = effective_couplings(bound_amplitudes(p, s.g_eff, 0.0), s);
    const auto Hs = build_spin_hamiltonian(g, 5, Sector::SingleExcitation);
    const double t = 0.01 / std::abs(g.g(0, 1));
    const auto tr = propagate_exact(Hs, ops::basis_state(2, 5), {0.0, t, 2.0 * t});
    // amplitude on spins 0 and 4 grows as t^2, on the odd neighbours as t
    EXPECT_NEAR(tr.populations[2][0] / tr.populations[1][0], 16.0, 0.05);
    EXPECT_NEAR(tr.populations[2][4] / tr.populations[1][4], 16.0, 0.05);
    EXPECT_NEAR(tr.populations[2][1] / tr.populations[1][1], 4.0, 0.01);
}

TEST(Disorder, SamplingContract) {
    DisorderSpec z{DisorderKind::OnsiteOptical, 0.0, 3};
    for (double v : sample(z, 10).onsite_photon) EXPECT_EQ(v, 0.0);
    DisorderSpec s{DisorderKind::OffdiagMechanical, 0.5, 42};
    const auto a = sample(s, 30), b = sample(s, 30);
    EXPECT_EQ(a.hop_phonon, b.hop_phonon);
    EXPECT_EQ(a.hop_phonon.size(), 29u);
    EXPECT_EQ(sample(s, 30, Boundary::Periodic).hop_phonon.size(), 30u);
    EXPECT_EQ(sample(DisorderSpec{DisorderKind::OnsiteMechanical, 1.0, 1}, 30).onsite_phonon.size(), 30u);
    s.seed = 43;
    EXPECT_NE(sample(s, 30).hop_phonon, a.hop_phonon);
    for (double v : a.hop_phonon) {
        EXPECT_GE(v, -0.25);
        EXPECT_LT(v, 0.25);
    }
    EXPECT_THROW(sample(s, 1), Error);
    EXPECT_THROW(sample(DisorderSpec{DisorderKind::OnsiteOptical, -1.0, 1}, 10), Error);
    const std::vector<DisorderSpec> both{{DisorderKind::OffdiagOptical, 10.0, 5}, {DisorderKind::OffdiagMechanical, 0.5, 5}};
    EXPECT_EQ(sample(both, 20, Boundary::Open, 7).hop_photon, sample(both, 20, Boundary::Open, 7).hop_photon);
    EXPECT_NE(sample(both, 20, Boundary::Open, 7).hop_photon, sample(both, 20, Boundary::Open, 8).hop_photon);
}

TEST(Disorder, UniformMoments) {
    const double W = 3.0;
    const int n = 10000;
    const auto d = uniform_draws(99, n, W);
    double m = 0.0, v = 0.0;
    for (double x : d) m += x;
    m /= n;
    for (double x : d) v += (x - m) * (x - m);
    v /= n - 1;
    EXPECT_LE(std::abs(m), 3.0 * W / std::sqrt(12.0 * n));
    EXPECT_NEAR(v, W * W / 12.0, 0.05 * W * W / 12.0);
}

TEST(Disorder, LocalizationEstimate) {
    EXPECT_DOUBLE_EQ(localization_estimate(20.0, 20.0).cells, 100.0);
    EXPECT_DOUBLE_EQ(localization_estimate(20.0, 200.0).cells, 1.0);
    EXPECT_TRUE(localization_estimate(20.0, 0.0).unbounded);
    EXPECT_FALSE(localization_estimate(20.0, 1.0).unbounded);
}

TEST(Disorder, OffDiagonalKeepsAlternation) {
    LatticeParams p;
    SpinConfig s;
    const std::vector<DisorderSpec> specs{{DisorderKind::OffdiagOptical, 0.5 * p.J, 11},
                                          {DisorderKind::OffdiagMechanical, 0.5 * p.K, 12}};
    const auto rep = robustness_sweep(p, s, specs, 20);
    EXPECT_LE(rep.max_alt_residual, 1e-8);
    EXPECT_LE(rep.max_hermiticity, 1e-12);
    EXPECT_GT(rep.min_spin_weight, 0.1);
    EXPECT_EQ(rep.fraction_gap_open, 1.0);
    for (const auto& r : rep.results) {
        EXPECT_EQ(r.W_C, 0.5 * p.J);
        EXPECT_EQ(r.W_M, 0.5 * p.K);
    }
}

TEST(Disorder, OnsiteOpticalBoundStateSurvives) {
    LatticeParams p;
    SpinConfig s;
    const auto rep = robustness_sweep(p, s, {{DisorderKind::OnsiteOptical, 0.5 * p.J, 21}}, 100);
    EXPECT_GT(rep.min_spin_weight, 0.1);
    EXPECT_LE(rep.max_hermiticity, 1e-12);
}

TEST(Disorder, SmallArrays) {
    for (int N : {3, 7, 11}) {
        LatticeParams p;
        p.N = N;
        const auto rep = robustness_sweep(p, SpinConfig{}, {{DisorderKind::OffdiagMechanical, 0.5, 31}}, 5);
        EXPECT_LE(rep.max_alt_residual, 1e-8) << N;
        EXPECT_GT(rep.min_spin_weight, 0.1) << N;
    }
}

TEST(Disorder, SpinDetuningWithinTenthOfGap) {
    LatticeParams p;
    const double eps = band_metrics(p).eps2;
    const std::vector<DisorderSpec> specs{{DisorderKind::OffdiagOptical, 0.5 * p.J, 41},
                                          {DisorderKind::OffdiagMechanical, 0.5 * p.K, 42}};
    for (int i = -4; i <= 4; ++i) {
        SpinConfig s;
        s.omega0 = 0.1 * eps * i / 4.0;
        const auto rep = robustness_sweep(p, s, specs, 10);
        EXPECT_GT(rep.min_spin_weight, 0.1) << s.omega0;
    }
}

TEST(Disorder, GapDetectorAndUniformLimitEstimate) {
    LatticeParams p;
    DisorderRealization clean;
    clean.N = p.N;
    EXPECT_TRUE(gap_open(p, clean, band_metrics(p).gap_center));
    EXPECT_NEAR(critical_disorder_estimate(p, DisorderKind::OffdiagOptical, 200.0), 2.1 * p.J, 1e-6);
    EXPECT_NEAR(critical_disorder_estimate(p, DisorderKind::OffdiagMechanical, 200.0), 2.1 * p.K, 1e-6);
    EXPECT_EQ(critical_disorder_estimate(p, DisorderKind::OffdiagMechanical, 1.0), INFINITY);
}
