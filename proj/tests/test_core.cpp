// test_core.cpp — numerics, lattice model and band structure

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "somc/bands.hpp"
#include "somc/model.hpp"
#include "somc/numerics/optimize.hpp"
#include "somc/numerics/polynomial.hpp"
#include "somc/numerics/quadrature.hpp"

using namespace somc;

namespace {

LatticeParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> J(2.0, 40.0), G(0.2, 6.0), th(-pi, pi);
    LatticeParams p;
    p.J = J(rng);
    p.G = G(rng);
    p.theta = th(rng);
    return p;
}

double max_abs_diff(const std::vector<cd>& a, std::vector<cd> b) {
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cd u, cd v) { return std::abs(u - x) < std::abs(v - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

} // namespace

TEST(Polynomial, RootsOfUnity) {
    const std::vector<cd> c{1.0, 0.0, 0.0, 0.0, -1.0};
    const auto r = numerics::polynomial_roots(c);
    EXPECT_LE(max_abs_diff(r, {1.0, -1.0, cd(0, 1), cd(0, -1)}), 1e-12);
}

TEST(Polynomial, FactoredQuartic) {
    const std::vector<cd> c{1.0, -10.0, 35.0, -50.0, 24.0};
    EXPECT_LE(max_abs_diff(numerics::polynomial_roots(c), {1.0, 2.0, 3.0, 4.0}), 1e-10);
}

TEST(Polynomial, RandomMonicQuarticsReconstruct) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<cd> c{1.0};
        for (int i = 0; i < 4; ++i) c.emplace_back(n(rng), n(rng));
        const auto back = numerics::coefficients_from_roots(numerics::polynomial_roots(c), 1.0);
        for (int i = 0; i < 5; ++i) EXPECT_LE(std::abs(back[i] - c[i]), 1e-9) << "trial " << t;
    }
}

TEST(Polynomial, ZeroLeadingCoefficientFails) {
    const std::vector<cd> c{0.0, 1.0, 2.0};
    try {
        numerics::polynomial_roots(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RootFindingFailed);
    }
}

TEST(Quadrature, SmoothAndPeakedIntegrands) {
    auto r = numerics::integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, std::exp(1.0) - 1.0, 1e-13);
    // Lorentzian of width 1e-4 centered on a breakpoint
    const double w = 1e-4;
    const std::array<double, 1> br{0.3};
    auto l = numerics::integrate_adaptive([w](double x) { return w / ((x - 0.3) * (x - 0.3) + w * w); }, -1.0, 1.0, br);
    EXPECT_TRUE(l.converged);
    EXPECT_NEAR(l.value, std::atan(0.7 / w) + std::atan(1.3 / w), 1e-9);
}

TEST(Quadrature, ZeroIntegralConverges) {
    auto r = numerics::integrate_adaptive([](double k) { return std::sin(3.0 * k) / (2.0 + std::cos(k)); }, -pi, pi);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.0, 1e-13);
}

TEST(Quadrature, PeriodicRuleIsSpectral) {
    const double v = numerics::integrate_periodic([](double k) { return 1.0 / (2.0 + std::cos(k)); }, 64);
    EXPECT_NEAR(v, two_pi / std::sqrt(3.0), 1e-13);
}

TEST(Optimize, GoldenAndBisect) {
    EXPECT_NEAR(numerics::golden_section_min([](double x) { return (x - 0.7) * (x - 0.7); }, 0.0, 2.0), 0.7, 1e-8);
    EXPECT_NEAR(numerics::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0), std::sqrt(2.0), 1e-11);
}

TEST(Bloch, ExplicitEntries) {
    LatticeParams p;
    const auto h = build_bloch(p, pi / 2);
    EXPECT_NEAR(std::abs(h(0, 0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(h(1, 1)), 0.0, 1e-14);
    EXPECT_EQ(h(0, 1), cd(-2.0));
    const auto h0 = build_bloch(p, 0.0);
    EXPECT_NEAR(h0(0, 0).real(), 40.0, 1e-13);
    EXPECT_NEAR(h0(1, 1).real(), -2.0, 1e-13);
}

TEST(Bloch, PeriodicAndTimeReversal) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(-pi, pi);
    for (int t = 0; t < 50; ++t) {
        LatticeParams p = random_params(rng);
        const double kk = k(rng);
        EXPECT_LE((build_bloch(p, kk) - build_bloch(p, kk + two_pi)).cwiseAbs().maxCoeff(), 1e-12);
        for (double th : {0.0, pi}) {
            p.theta = th;
            EXPECT_LE((build_bloch(p, kk) - build_bloch(p, -kk)).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Bloch, EigenvaluesMatchDispersion) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> k(-pi, pi), th(-pi, pi);
    LatticeParams p;
    for (int t = 0; t < 64; ++t) {
        p.theta = th(rng);
        const double kk = k(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(build_bloch(p, kk));
        const auto d = dispersion(p, kk);
        EXPECT_NEAR(es.eigenvalues()(1), d.upper, 1e-10);
        EXPECT_NEAR(es.eigenvalues()(0), d.lower, 1e-10);
    }
}

TEST(RealSpace, TwoCellRing) {
    LatticeParams p;
    p.N = 2;
    p.theta = 0.0;
    p.boundary = Boundary::Periodic;
    const auto H = build_realspace(p, SpinConfig{0.0, 0.0, {}, 0.0});
    EXPECT_EQ(H(0, 1), cd(-2.0 * p.J));
    EXPECT_EQ(H(2, 3), cd(-2.0 * p.K));
}

TEST(RealSpace, OpenEqualsPeriodicWithoutWrap) {
    LatticeParams p;
    p.N = 9;
    p.theta = 1.1 * pi;
    SpinConfig s{0.3, 0.08, {-1, 2}, 0.0};
    const auto open = build_realspace(p, s);
    p.boundary = Boundary::Periodic;
    auto ring = build_realspace(p, s);
    ring(0, 8) = ring(8, 0) = 0.0;
    ring(9, 17) = ring(17, 9) = 0.0;
    EXPECT_LE((open - ring).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RealSpace, LayoutAndCouplingPhases) {
    LatticeParams p;
    p.N = 7;
    p.theta = 1.1 * pi;
    SpinConfig s{0.25, 0.1, {0}, 0.0};
    const auto H = build_realspace(p, s);
    const auto L = layout(p, s);
    EXPECT_EQ(L.dim(), 15);
    EXPECT_EQ(L.first, -3);
    EXPECT_EQ(H(L.spin(0), L.spin(0)), cd(0.25));
    EXPECT_EQ(H(L.spin(0), L.phonon(0)), cd(0.1));
    for (int n = -3; n <= 3; ++n)
        EXPECT_LE(std::abs(H(L.photon(n), L.phonon(n)) - (-p.G * std::polar(1.0, -n * p.theta))), 1e-14);
}

TEST(RealSpace, HermitianForRandomDraws) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> N(2, 30);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        LatticeParams p = random_params(rng);
        p.N = N(rng);
        p.boundary = t % 2 ? Boundary::Periodic : Boundary::Open;
        SpinConfig s{u(rng), std::abs(u(rng)), {first_cell(p.N)}, 0.0};
        DisorderRealization r;
        r.N = p.N;
        const int bonds = p.boundary == Boundary::Periodic ? p.N : p.N - 1;
        for (int i = 0; i < p.N; ++i) r.onsite_photon.push_back(u(rng));
        for (int i = 0; i < bonds; ++i) r.hop_phonon.push_back(u(rng));
        const auto H = build_realspace(p, s, r);
        ComplexMatrix Hd = ComplexMatrix(H.adjoint());
        double worst = 0.0;
        for (int i = 0; i < H.rows(); ++i)
            for (int j = 0; j < H.cols(); ++j) worst = std::max(worst, std::abs(H(i, j) - Hd(i, j)));
        EXPECT_LE(worst, 1e-12);
        EXPECT_LE(hermiticity_residual(H), 1e-12);
    }
}

TEST(RealSpace, Errors) {
    LatticeParams p;
    p.N = 5;
    try {
        build_realspace(p, SpinConfig{0.0, 0.1, {3}, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PositionOutOfRange);
    }
    DisorderRealization r;
    r.N = 5;
    r.onsite_photon.assign(4, 0.0);
    try {
        build_realspace(p, SpinConfig{0.0, 0.1, {0}, 0.0}, r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Dispersion, ReferencePoints) {
    LatticeParams p;
    auto d = dispersion(p, pi / 2);
    EXPECT_NEAR(d.upper, 2.0, 1e-12);
    EXPECT_NEAR(d.lower, -2.0, 1e-12);
    d = dispersion(p, 0.0);
    EXPECT_NEAR(d.upper, 19.0 + std::sqrt(445.0), 1e-12);
    EXPECT_NEAR(d.lower, 19.0 - std::sqrt(445.0), 1e-12);
    p.G = 0.0;
    p.theta = 0.0;
    for (double k : {-2.0, 0.3, 1.7}) {
        d = dispersion(p, k);
        const double a = -2.0 * p.J * std::cos(k), b = -2.0 * p.K * std::cos(k);
        EXPECT_NEAR(d.upper, std::max(a, b), 1e-12);
        EXPECT_NEAR(d.lower, std::min(a, b), 1e-12);
    }
}

TEST(Dispersion, SpectralMirror) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> k(-pi, pi);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_params(rng);
        const double kk = k(rng);
        for (double shift : {pi, -pi}) {
            EXPECT_NEAR(dispersion(p, kk + shift).upper, -dispersion(p, kk).lower, 1e-10);
            EXPECT_NEAR(phonon_weight(p, kk + shift, Band::Upper), phonon_weight(p, kk, Band::Lower), 1e-10);
        }
    }
}

TEST(MixingAngles, SymmetricPoint) {
    LatticeParams p;
    const auto m = mixing_angles(p, pi / 2);
    EXPECT_NEAR(m.sin_theta * m.sin_theta, 0.5, 1e-12);
    EXPECT_NEAR(m.cos_theta * m.cos_theta, 0.5, 1e-12);
    EXPECT_LT(m.sin_theta, 0.0);
    EXPECT_LT(m.cos_theta, 0.0);
}

// Oracle: photon weight of the upper-band eigenvector of the numerically diagonalized H(k).
TEST(MixingAngles, MatchEigenvectorsAndUnitarity) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> k(-pi, pi);
    for (int t = 0; t < 1000; ++t) {
        const auto p = random_params(rng);
        const double kk = k(rng);
        const auto m = mixing_angles(p, kk);
        EXPECT_NEAR(m.sin_theta * m.sin_theta + m.cos_theta * m.cos_theta, 1.0, 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(build_bloch(p, kk));
        EXPECT_NEAR(std::norm(es.eigenvectors()(0, 1)), m.sin_theta * m.sin_theta, 1e-10);
    }
}

TEST(MixingAngles, TransformDiagonalizes) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> k(-pi, pi);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_params(rng);
        const double kk = k(rng);
        const Eigen::Matrix2d P = polariton_transform(p, kk);
        const Eigen::Matrix2d H = build_bloch(p, kk).real();
        const auto d = dispersion(p, kk);
        Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
        D(0, 0) = d.upper;
        D(1, 1) = d.lower;
        EXPECT_LE((P * H * P.transpose() - D).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(MixingAngles, DegenerateCouplingThrows) {
    LatticeParams p;
    p.G = 0.0;
    try {
        mixing_angles(p, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateCoupling);
    }
    EXPECT_EQ(phonon_weight(p, 0.1, Band::Upper) + phonon_weight(p, 0.1, Band::Lower), 1.0);
}

// Upper band at theta = pi: photon weight is smallest at the zone edge and tiny there.
TEST(MixingAngles, PhotonWeightSmallestAtZoneEdge) {
    LatticeParams p;
    const double at_edge = 1.0 - phonon_weight(p, pi, Band::Upper);
    EXPECT_LT(at_edge, 0.01);
    for (int i = 0; i < 256; ++i) {
        const double k = -pi + two_pi * i / 256;
        EXPECT_GE(1.0 - phonon_weight(p, k, Band::Upper), at_edge - 1e-15) << k;
    }
    LatticeParams q = p;
    q.G = 4.0;
    EXPECT_GT(1.0 - phonon_weight(q, pi, Band::Upper), at_edge);
}

TEST(GroupVelocity, AnalyticMatchesFiniteDifference) {
    LatticeParams p;
    EXPECT_NEAR(group_velocity(p, pi / 2, Band::Upper), -19.0, 1e-10);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> k(-pi, pi);
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        const auto q = random_params(rng);
        const double kk = k(rng);
        for (Band b : {Band::Upper, Band::Lower}) {
            const double fd = (band_energy(q, kk + h, b) - band_energy(q, kk - h, b)) / (2 * h);
            EXPECT_NEAR(group_velocity(q, kk, b), fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(GroupVelocity, StationaryAtExtremaAndOddAtPi) {
    LatticeParams p;
    p.theta = 1.07 * pi;
    const auto m = band_metrics(p);
    EXPECT_NEAR(group_velocity(p, m.k_min_u, Band::Upper), 0.0, 1e-8);
    p.theta = pi;
    for (double k : {0.3, 1.1, 2.9}) EXPECT_NEAR(group_velocity(p, k, Band::Upper), -group_velocity(p, -k, Band::Upper), 1e-12);
}

TEST(BandMetrics, FrozenValues) {
    LatticeParams p;
    auto m = band_metrics(p);
    EXPECT_NEAR(m.eps2, 1.70367083999984, 1e-9);
    EXPECT_NEAR(m.eps1, 0.0, 1e-9);
    EXPECT_NEAR(m.gap_center, 0.0, 1e-9);
    p.theta = 1.1 * pi;
    m = band_metrics(p);
    EXPECT_NEAR(m.eps2, 0.513988124067918, 1e-9);
    EXPECT_NEAR(m.eps1, 1.15397930759872, 1e-9);
}

TEST(BandMetrics, GapMaximalAtPiAndClosesNear114) {
    LatticeParams p;
    double best = -1.0, best_theta = 0.0, first_zero = 0.0;
    for (int i = -20; i <= 40; ++i) {
        p.theta = pi + 0.005 * pi * i;
        const double e = band_metrics(p).eps2;
        if (e > best) { best = e; best_theta = p.theta; }
        if (i > 0 && first_zero == 0.0 && e <= 0.0) first_zero = p.theta;
    }
    EXPECT_NEAR(best_theta, pi, 0.005 * pi);
    EXPECT_NEAR(first_zero / pi, 1.14, 0.01);
}

TEST(BandMetrics, GapDecreasesInJ) {
    for (double G : {1.0, 2.0, 4.0}) {
        double prev = INFINITY;
        for (int i = 0; i < 10; ++i) {
            LatticeParams p;
            p.G = G;
            p.J = 5.0 + 45.0 * i / 9;
            const double e = band_metrics(p).eps2;
            EXPECT_LT(e, prev) << "G=" << G << " J=" << p.J;
            prev = e;
        }
    }
}

TEST(BandMetrics, AsymmetricAreaPeaksAtGapClosing) {
    LatticeParams p;
    double best = -1.0, best_theta = 0.0;
    for (int i = 0; i <= 40; ++i) {
        p.theta = pi + 0.005 * pi * i;
        const double e = band_metrics(p).eps1;
        if (e > best) { best = e; best_theta = p.theta; }
    }
    EXPECT_NEAR(best_theta / pi, 1.14, 0.01);
}

TEST(BandMetrics, SmallGridRejected) {
    EXPECT_THROW(band_metrics(LatticeParams{}, 100), Error);
}

TEST(ResonantModes, PairsAtPiAndDirectionsAt11) {
    LatticeParams p;
    auto modes = resonant_modes(p, 1.5, Band::Upper);
    ASSERT_EQ(modes.size() % 2, 0u);
    ASSERT_GE(modes.size(), 2u);
    // sorted by k, so mode i pairs with mode n-1-i
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& a = modes[i];
        const auto& b = modes[modes.size() - 1 - i];
        EXPECT_NEAR(a.k, -b.k, 1e-10);
        EXPECT_NEAR(a.vg, -b.vg, 1e-9);
    }
    p.theta = 1.1 * pi;
    modes = resonant_modes(p, 0.5, Band::Upper);
    ASSERT_EQ(modes.size(), 2u);
    EXPECT_LT(std::min(modes[0].vg, modes[1].vg), 0.0);
    EXPECT_GT(std::max(modes[0].vg, modes[1].vg), 0.0);
    for (const auto& m : modes) EXPECT_NEAR(band_energy(p, m.k, Band::Upper), 0.5, 1e-10);
}

TEST(ResonantModes, AboveBandThrows) {
    try {
        resonant_modes(LatticeParams{}, 100.0, Band::Upper);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoResonantMode);
    }
}
