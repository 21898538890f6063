// greens.hpp — collective couplings Gamma_ij by quadrature and by residues, chiral rates

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "somc/bands.hpp"
#include "somc/error.hpp"
#include "somc/model.hpp"
#include "somc/numerics/polynomial.hpp"
#include "somc/numerics/quadrature.hpp"

namespace somc {

struct ChiralRates {
    double gamma1{0.0}; // left movers, v_g < 0
    double gamma2{0.0}; // right movers, v_g > 0
    double k1{0.0};
    double k2{0.0};
    double ratio{0.0};  // gamma2 / gamma1
};

struct ResonantPart {
    double k;
    double gamma;
    double vg;
    cd contribution; // gamma e^{ikx} Theta(x / v_g), Theta(0) = 1/2
};

struct Pole {
    cd y;
    cd residue;  // i g^2 y^|x| N(y) / P'(y)
    bool inside;
    bool on_shell;
};

struct GreensResult {
    cd gamma_ij{};
    cd pv_part{};
    std::vector<ResonantPart> resonant_parts;
    int x_ij{0};
    double s_used{0.0};
    std::vector<Pole> poles;
};

struct ResidueOptions {
    double s{1e-8};
    double classify_s{1e-4};
    double on_shell_tol{1e-6};
    double degenerate_tol{1e-9};
};

// Rates g^2 w / |v| summed per direction over an arbitrary mode list.
inline ChiralRates rates_from_modes(const std::vector<ResonantMode>& modes, double g) {
    ChiralRates r;
    double best1 = -1.0, best2 = -1.0;
    for (const auto& m : modes) {
        if (m.vg == 0.0) continue;
        const double rate = g * g * m.weight / std::abs(m.vg);
        if (m.vg < 0.0) {
            r.gamma1 += rate;
            if (rate > best1) { best1 = rate; r.k1 = m.k; }
        } else {
            r.gamma2 += rate;
            if (rate > best2) { best2 = rate; r.k2 = m.k; }
        }
    }
    r.ratio = r.gamma1 > 0.0 ? r.gamma2 / r.gamma1 : 0.0;
    return r;
}

inline std::vector<ResonantMode> all_resonant_modes(const LatticeParams& p, double omega0) {
    std::vector<ResonantMode> modes;
    for (Band b : {Band::Upper, Band::Lower}) {
        try {
            auto m = resonant_modes(p, omega0, b);
            modes.insert(modes.end(), m.begin(), m.end());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoResonantMode) throw;
        }
    }
    return modes;
}

inline ChiralRates gamma_rates(const LatticeParams& p, const SpinConfig& spins, double omega0) {
    resonant_modes(p, omega0, Band::Upper); // throws NoResonantMode
    const auto modes = all_resonant_modes(p, omega0);
    if (modes.size() > 2)
        fail(ErrorKind::MoreThanTwoModes, std::to_string(modes.size()) + " resonant modes at omega0 = " +
                                              std::to_string(omega0));
    return rates_from_modes(modes, spins.g_eff);
}

// Phonon-phonon element of the Bloch resolvent at complex z.
inline cd bloch_gbb(const LatticeParams& p, double k, cd z) {
    const cd a = z + 2.0 * p.J * std::cos(k - p.theta);
    const cd b = z + 2.0 * p.K * std::cos(k);
    return a / (a * b - p.G * p.G);
}

inline cd gamma_ij_quadrature(const LatticeParams& p, const SpinConfig& spins, double omega0, int x_ij,
                              double s, double rel_tol = 1e-10) {
    if (!(s > 0.0)) fail(ErrorKind::ValidationError, "regularization s must be > 0");
    const cd z(omega0, s);
    std::vector<double> breaks;
    for (const auto& m : all_resonant_modes(p, omega0)) breaks.push_back(m.k);
    auto f = [&](double k) { return std::polar(1.0, k * x_ij) * bloch_gbb(p, k, z); };
    numerics::QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-15;
    opt.max_intervals = 200000;
    const auto r = numerics::integrate_adaptive(f, -pi, pi, breaks, opt);
    if (!r.converged)
        fail(ErrorKind::QuadratureNotConverged, "achieved error " + std::to_string(r.error) + " on |value| " +
                                                    std::to_string(std::abs(r.value)));
    const double g2 = spins.g_eff * spins.g_eff;
    return cd(0.0, 1.0) * g2 / two_pi * r.value;
}

// Quadrature at s = 1e-4, 1e-5, 1e-6, extrapolated to s -> 0 by a quadratic in s.
inline cd gamma_ij_extrapolated(const LatticeParams& p, const SpinConfig& spins, double omega0, int x_ij) {
    const std::array<double, 3> s{1e-4, 1e-5, 1e-6};
    std::array<cd, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = gamma_ij_quadrature(p, spins, omega0, x_ij, s[i]);
    cd out = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= s[j] / (s[j] - s[i]);
        out += w * v[i];
    }
    return out;
}

namespace detail {

struct Quartic {
    std::array<cd, 5> c;
    double theta_eff;
    cd z;
};

inline Quartic greens_quartic(const LatticeParams& p, double omega0, double s, bool negative_x) {
    const double th = negative_x ? -p.theta : p.theta;
    const cd z(omega0, s);
    const cd em = std::polar(1.0, -th), ep = std::polar(1.0, th);
    Quartic q;
    q.theta_eff = th;
    q.z = z;
    q.c = {p.J * p.K * em, z * (p.J * em + p.K), z * z - p.G * p.G + 2.0 * p.J * p.K * std::cos(th),
           z * (p.J * ep + p.K), p.J * p.K * ep};
    return q;
}

inline cd residue_weight(const LatticeParams& p, const Quartic& q, cd y) {
    const cd num = y * q.z + p.J * (y * y * std::polar(1.0, -q.theta_eff) + std::polar(1.0, q.theta_eff));
    return num / numerics::horner_derivative(q.c, y);
}

inline std::vector<cd> quartic_roots(const Quartic& q) { return numerics::polynomial_roots(q.c); }

} // namespace detail

inline GreensResult gamma_ij_residue(const LatticeParams& p, const SpinConfig& spins, double omega0, int x_ij,
                                     const ResidueOptions& opt = {}) {
    const bool neg = x_ij < 0;
    const int n = std::abs(x_ij);
    const double g2 = spins.g_eff * spins.g_eff;
    const auto q = detail::greens_quartic(p, omega0, opt.s, neg);
    const auto roots = detail::quartic_roots(q);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(roots[i] - roots[j]) < opt.degenerate_tol)
                fail(ErrorKind::DegenerateRoot, "quartic roots coincide within " + std::to_string(opt.degenerate_tol));

    std::vector<cd> shifted;
    bool need_shift = false;
    for (const auto& y : roots) need_shift |= std::abs(std::abs(y) - 1.0) < opt.on_shell_tol;
    if (need_shift) shifted = detail::quartic_roots(detail::greens_quartic(p, omega0, opt.classify_s, neg));

    GreensResult out;
    out.x_ij = x_ij;
    out.s_used = opt.s;
    for (const auto& y : roots) {
        Pole pole;
        pole.y = y;
        pole.on_shell = std::abs(std::abs(y) - 1.0) < opt.on_shell_tol;
        if (pole.on_shell) {
            // follow the root to larger s, where the circle test is unambiguous
            auto it = std::min_element(shifted.begin(), shifted.end(),
                                       [&](cd a, cd b) { return std::abs(a - y) < std::abs(b - y); });
            pole.inside = std::abs(*it) < 1.0;
        } else {
            pole.inside = std::abs(y) < 1.0;
        }
        const cd w = detail::residue_weight(p, q, y);
        pole.residue = cd(0.0, 1.0) * g2 * std::pow(y, n) * w;
        if (pole.inside) out.gamma_ij += pole.residue;
        if (pole.on_shell) {
            ResonantPart rp;
            rp.k = wrap_k(neg ? -std::arg(y) : std::arg(y));
            rp.gamma = g2 * std::abs(w);
            const auto d = dispersion(p, rp.k);
            const Band b = std::abs(d.upper - omega0) <= std::abs(d.lower - omega0) ? Band::Upper : Band::Lower;
            rp.vg = group_velocity(p, rp.k, b);
            const double theta_step = x_ij == 0 ? 0.5 : ((x_ij > 0) == (rp.vg > 0.0) ? 1.0 : 0.0);
            rp.contribution = theta_step * rp.gamma * std::polar(1.0, rp.k * x_ij);
            out.resonant_parts.push_back(rp);
        }
        out.poles.push_back(pole);
    }
    out.pv_part = out.gamma_ij;
    for (const auto& rp : out.resonant_parts) out.pv_part -= rp.contribution;
    return out;
}

// Residue route with the quadrature as fallback when roots coincide.
inline cd gamma_ij(const LatticeParams& p, const SpinConfig& spins, double omega0, int x_ij) {
    try {
        return gamma_ij_residue(p, spins, omega0, x_ij).gamma_ij;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateRoot) throw;
        return gamma_ij_extrapolated(p, spins, omega0, x_ij);
    }
}

inline cd pv_part(const LatticeParams& p, const SpinConfig& spins, double omega0, int x_ij) {
    return gamma_ij_residue(p, spins, omega0, x_ij).pv_part;
}

// Off-shell residue sum continued to real x (y^x on the principal branch); equals
// pv_part at every nonzero integer x.
inline cd pv_part_continuous(const LatticeParams& p, const SpinConfig& spins, double omega0, double x,
                             const ResidueOptions& opt = {}) {
    if (x == 0.0) return pv_part(p, spins, omega0, 0);
    const bool neg = x < 0.0;
    const double ax = std::abs(x);
    const double g2 = spins.g_eff * spins.g_eff;
    const auto q = detail::greens_quartic(p, omega0, opt.s, neg);
    cd sum = 0.0;
    for (const auto& y : detail::quartic_roots(q)) {
        if (std::abs(std::abs(y) - 1.0) < opt.on_shell_tol || std::abs(y) >= 1.0) continue;
        sum += cd(0.0, 1.0) * g2 * std::exp(ax * std::log(y)) * detail::residue_weight(p, q, y);
    }
    return sum;
}

} // namespace somc
