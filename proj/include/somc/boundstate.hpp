// boundstate.hpp — single-spin photon–phonon bound state, infinite lattice and finite arrays

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "somc/bands.hpp"
#include "somc/error.hpp"
#include "somc/greens.hpp"
#include "somc/model.hpp"
#include "somc/numerics/optimize.hpp"
#include "somc/numerics/quadrature.hpp"

namespace somc {

// Amplitudes on consecutive cell labels first .. first + size - 1; zero outside.
struct SiteAmplitudes {
    int first{0};
    std::vector<cd> values;

    bool contains(int j) const { return j >= first && j < first + static_cast<int>(values.size()); }
    cd at(int j) const { return contains(j) ? values[j - first] : cd(0.0); }
    int last() const { return first + static_cast<int>(values.size()) - 1; }
    double norm2() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return s;
    }
};

struct BoundState {
    double E_BS{0.0};
    cd C_e{1.0};
    SiteAmplitudes C_a; // photon, labels relative to the spin's cell
    SiteAmplitudes C_b; // phonon
    double localization_length{0.0};
    double fit_r2{0.0};
    double spin_weight{0.0};

    double norm() const { return std::norm(C_e) + C_a.norm2() + C_b.norm2(); }
};

struct EnvelopeFit {
    double length;
    double r2;
    int points;
};

namespace detail {

inline bool in_band(const BandMetrics& m, double E, double tol) {
    return (E >= m.min_upper - tol && E <= m.max_upper + tol) || (E >= m.min_lower - tol && E <= m.max_lower + tol);
}

inline double self_energy_unchecked(const LatticeParams& p, double g, double E, const BandMetrics& m) {
    if (g == 0.0) return 0.0;
    const std::array<double, 2> breaks{m.k_min_u, m.k_max_l};
    auto f = [&](double k) { return bloch_gbb(p, k, cd(E, 0.0)).real(); };
    numerics::QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    opt.max_intervals = 100000;
    const auto r = numerics::integrate_adaptive(f, -pi, pi, breaks, opt);
    if (!r.converged) fail(ErrorKind::QuadratureNotConverged, "self-energy error " + std::to_string(r.error));
    return g * g / two_pi * r.value;
}

} // namespace detail

inline double self_energy(const LatticeParams& p, double g_eff, double E) {
    const auto m = band_metrics(p);
    if (detail::in_band(m, E, 1e-9)) fail(ErrorKind::EnergyInBand, "E = " + std::to_string(E) + " lies in a band");
    return detail::self_energy_unchecked(p, g_eff, E, m);
}

inline double solve_bound_energy(const LatticeParams& p, double g_eff, double omega0) {
    const auto m = band_metrics(p);
    if (!(m.eps2 > 0.0)) fail(ErrorKind::NoGapSolution, "bandgap is closed");
    if (!(omega0 > m.max_lower && omega0 < m.min_upper))
        fail(ErrorKind::NoGapSolution, "omega0 = " + std::to_string(omega0) + " outside the gap");
    auto f = [&](double E) { return E - omega0 - detail::self_energy_unchecked(p, g_eff, E, m); };
    const double f0 = f(omega0);
    if (f0 == 0.0) return omega0;
    // close enough to the edges for the self-energy divergence to win, far enough for
    // E - omega(k) to be resolved
    const double margin = 1e-5 * m.eps2;
    double a = m.max_lower + margin, b = m.min_upper - margin;
    if (f0 > 0.0) b = omega0;
    else a = omega0;
    const double fa = f(a), fb = f(b);
    if (!(fa < 0.0 && fb > 0.0)) fail(ErrorKind::NoGapSolution, "pole equation has no sign change in the gap");
    return numerics::bisect(f, a, b, 1e-15, 1e-12);
}

// (C_{k,a}, C_{k,b}) for C_e = 1.
inline std::pair<cd, cd> k_amplitudes(const LatticeParams& p, double g_eff, double E, double k) {
    const double ea = E + 2.0 * p.J * std::cos(k - p.theta);
    const double eb = E + 2.0 * p.K * std::cos(k);
    const double det = ea * eb - p.G * p.G;
    return {-p.G * g_eff / det, ea * g_eff / det};
}

// Least-squares line through log|C_b| against |j| over odd j away from the spin.
inline EnvelopeFit fit_envelope(const SiteAmplitudes& Cb) {
    double peak = 0.0;
    for (const auto& v : Cb.values) peak = std::max(peak, std::abs(v));
    std::vector<std::pair<double, double>> pts;
    for (int j = Cb.first; j <= Cb.last(); ++j) {
        if (j == 0 || std::abs(j) % 2 == 0) continue;
        const double a = std::abs(Cb.at(j));
        if (a > 1e-9 * peak) pts.emplace_back(std::abs(j), std::log(a));
    }
    EnvelopeFit out{0.0, 0.0, static_cast<int>(pts.size())};
    if (pts.size() < 3) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (auto [x, y] : pts) {
        ss_res += std::pow(y - (icpt + slope * x), 2);
        ss_tot += std::pow(y - sy / n, 2);
    }
    out.length = slope < 0.0 ? -1.0 / slope : INFINITY;
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

inline BoundState bound_amplitudes(const LatticeParams& p, double g_eff, double E_BS, int M = 4096) {
    const auto m = band_metrics(p);
    if (detail::in_band(m, E_BS, 1e-9)) fail(ErrorKind::EnergyInBand, "E_BS = " + std::to_string(E_BS) + " lies in a band");

    std::vector<double> ks(M);
    std::vector<cd> ca(M), cb(M);
    for (int i = 0; i < M; ++i) {
        ks[i] = -pi + two_pi * i / M;
        std::tie(ca[i], cb[i]) = k_amplitudes(p, g_eff, E_BS, ks[i]);
    }
    auto synth = [&](int j, cd& a, cd& b) {
        a = 0.0;
        b = 0.0;
        for (int i = 0; i < M; ++i) {
            b += std::polar(1.0, ks[i] * j) * cb[i];
            a += std::polar(1.0, (ks[i] - p.theta) * j) * ca[i];
        }
        a /= M;
        b /= M;
    };

    std::vector<cd> pa, pb, na, nb; // j >= 0 and j < 0
    int quiet = 0;
    for (int j = 0; j < M / 4 && quiet < 2; ++j) {
        cd a, b, a2, b2;
        synth(j, a, b);
        pa.push_back(a);
        pb.push_back(b);
        double mx = std::max(std::abs(a), std::abs(b));
        if (j > 0) {
            synth(-j, a2, b2);
            na.push_back(a2);
            nb.push_back(b2);
            mx = std::max({mx, std::abs(a2), std::abs(b2)});
        }
        quiet = (j > 0 && mx < 1e-12) ? quiet + 1 : 0;
    }
    const int jmax = static_cast<int>(pa.size()) - 1;

    BoundState bs;
    bs.E_BS = E_BS;
    bs.C_a.first = bs.C_b.first = -jmax;
    bs.C_a.values.resize(2 * jmax + 1);
    bs.C_b.values.resize(2 * jmax + 1);
    for (int j = 0; j <= jmax; ++j) {
        bs.C_a.values[jmax + j] = pa[j];
        bs.C_b.values[jmax + j] = pb[j];
        if (j > 0) {
            bs.C_a.values[jmax - j] = na[j - 1];
            bs.C_b.values[jmax - j] = nb[j - 1];
        }
    }
    const double ce = 1.0 / std::sqrt(1.0 + bs.C_a.norm2() + bs.C_b.norm2());
    bs.C_e = ce;
    for (auto& v : bs.C_a.values) v *= ce;
    for (auto& v : bs.C_b.values) v *= ce;
    bs.spin_weight = ce * ce;
    const auto fit = fit_envelope(bs.C_b);
    bs.localization_length = fit.length;
    bs.fit_r2 = fit.r2;
    return bs;
}

// Largest of |C_b| on even and |C_a| on odd labels.
inline double alternation_residual(const BoundState& bs) {
    double r = 0.0;
    for (int j = bs.C_b.first; j <= bs.C_b.last(); ++j)
        if (std::abs(j) % 2 == 0) r = std::max(r, std::abs(bs.C_b.at(j)));
    for (int j = bs.C_a.first; j <= bs.C_a.last(); ++j)
        if (std::abs(j) % 2 == 1) r = std::max(r, std::abs(bs.C_a.at(j)));
    return r;
}

// In-gap eigenvector of a finite array: the one carrying the most spin weight. Amplitudes
// are labelled relative to reference_cell and phased so that spin 0 is real positive.
inline BoundState finite_bound_state(const ComplexMatrix& H, const Layout& L, int reference_cell, double omega0) {
    if (H.rows() != L.dim() || H.cols() != L.dim())
        fail(ErrorKind::DimensionMismatch, "Hamiltonian does not match the layout");
    if (L.spins < 1) fail(ErrorKind::DimensionMismatch, "finite_bound_state needs at least one spin");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();

    int best = -1;
    double best_w = -1.0;
    for (int n = 0; n < L.dim(); ++n) {
        double w = 0.0;
        for (int m = 0; m < L.spins; ++m) w += std::norm(vecs(L.spin(m), n));
        const bool tie = best >= 0 && std::abs(w - best_w) <= 1e-12;
        if (w > best_w + 1e-12 || (tie && std::abs(vals(n) - omega0) < std::abs(vals(best) - omega0))) {
            best = n;
            best_w = w;
        }
    }
    if (best_w < 0.1) fail(ErrorKind::NoLocalizedState, "largest spin weight " + std::to_string(best_w));

    ComplexVector v = vecs.col(best);
    cd c0 = v(L.spin(0));
    if (std::abs(c0) > 0.0) v *= std::conj(c0) / std::abs(c0);

    BoundState bs;
    bs.E_BS = vals(best);
    bs.C_e = v(L.spin(0));
    bs.spin_weight = best_w;
    bs.C_a.first = bs.C_b.first = L.first - reference_cell;
    bs.C_a.values.resize(L.cells);
    bs.C_b.values.resize(L.cells);
    for (int i = 0; i < L.cells; ++i) {
        bs.C_a.values[i] = v(i);
        bs.C_b.values[i] = v(L.cells + i);
    }
    const auto fit = fit_envelope(bs.C_b);
    bs.localization_length = fit.length;
    bs.fit_r2 = fit.r2;
    return bs;
}

inline BoundState finite_bound_state(const LatticeParams& p, const SpinConfig& s,
                                     const std::optional<DisorderRealization>& disorder = std::nullopt) {
    const auto H = build_realspace(p, s, disorder);
    if (s.positions.empty()) fail(ErrorKind::DimensionMismatch, "finite_bound_state needs at least one spin");
    return finite_bound_state(H, layout(p, s), s.positions.front(), s.omega0);
}

} // namespace somc
