// bands.hpp — polariton dispersion, mixing angles, band metrics and resonant modes

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "somc/error.hpp"
#include "somc/model.hpp"
#include "somc/numerics/optimize.hpp"

namespace somc {

enum class Band { Upper, Lower };

struct Dispersion {
    double upper;
    double lower;
};

struct MixingAngles {
    double sin_theta; // photon amplitude of the upper band
    double cos_theta; // phonon amplitude of the upper band
};

struct BandPoint {
    double k{};
    double omega_u{}, omega_l{};
    double sin_theta_k{}, cos_theta_k{};
    double vg_u{}, vg_l{};
};

struct BandMetrics {
    double eps1{0.0};
    double eps2{0.0};
    double gap_center{0.0};
    double k_min_u{0.0};
    double k_max_l{0.0};
    double min_upper{0.0}, max_upper{0.0};
    double min_lower{0.0}, max_lower{0.0};
};

struct ResonantMode {
    double k;
    double vg;
    double weight; // phonon weight of the band at k
    Band band;
};

inline double wrap_k(double k) {
    double r = std::remainder(k, two_pi); // (-pi, pi]
    if (r <= -pi) r += two_pi;
    return r;
}

inline Dispersion dispersion(const LatticeParams& p, double k) {
    const double Jk = p.J * std::cos(k - p.theta);
    const double Kk = p.K * std::cos(k);
    const double r = std::hypot(Kk - Jk, p.G);
    return {-Jk - Kk + r, -Jk - Kk - r};
}

inline double band_energy(const LatticeParams& p, double k, Band b) {
    const auto d = dispersion(p, k);
    return b == Band::Upper ? d.upper : d.lower;
}

// Both amplitudes are negative; sin^2 is the photon weight of the upper band.
inline MixingAngles mixing_angles(const LatticeParams& p, double k) {
    if (p.G == 0.0) fail(ErrorKind::DegenerateCoupling, "mixing angles undefined at G = 0");
    const auto d = dispersion(p, k);
    const double Kk2 = 2.0 * p.K * std::cos(k);
    const double s = -p.G / std::hypot(p.G, d.lower + Kk2);
    const double c = -p.G / std::hypot(p.G, d.upper + Kk2);
    return {s, c};
}

// Rows are the upper and lower polariton in the (a_{k-theta}, b_k) basis.
inline Eigen::Matrix2d polariton_transform(const LatticeParams& p, double k) {
    const auto m = mixing_angles(p, k);
    Eigen::Matrix2d P;
    P << -m.sin_theta, m.cos_theta,
          m.cos_theta, m.sin_theta;
    return P;
}

inline double phonon_weight(const LatticeParams& p, double k, Band b) {
    if (p.G == 0.0) {
        const double ea = -2.0 * p.J * std::cos(k - p.theta);
        const double eb = -2.0 * p.K * std::cos(k);
        if (ea == eb) return 0.5;
        const bool phonon_on_top = eb > ea;
        return (b == Band::Upper) == phonon_on_top ? 1.0 : 0.0;
    }
    const auto m = mixing_angles(p, k);
    return b == Band::Upper ? m.cos_theta * m.cos_theta : m.sin_theta * m.sin_theta;
}

inline double group_velocity(const LatticeParams& p, double k, Band b) {
    const double Jk = p.J * std::cos(k - p.theta);
    const double Kk = p.K * std::cos(k);
    const double dJ = -p.J * std::sin(k - p.theta);
    const double dK = -p.K * std::sin(k);
    const double r = std::hypot(Kk - Jk, p.G);
    const double dr = r > 0.0 ? (Kk - Jk) * (dK - dJ) / r : 0.0;
    return -dJ - dK + (b == Band::Upper ? dr : -dr);
}

inline BandPoint band_point(const LatticeParams& p, double k) {
    BandPoint bp;
    bp.k = k;
    const auto d = dispersion(p, k);
    bp.omega_u = d.upper;
    bp.omega_l = d.lower;
    if (p.G > 0.0) {
        const auto m = mixing_angles(p, k);
        bp.sin_theta_k = m.sin_theta;
        bp.cos_theta_k = m.cos_theta;
    } else {
        bp.cos_theta_k = -std::sqrt(phonon_weight(p, k, Band::Upper));
        bp.sin_theta_k = -std::sqrt(1.0 - bp.cos_theta_k * bp.cos_theta_k);
    }
    bp.vg_u = group_velocity(p, k, Band::Upper);
    bp.vg_l = group_velocity(p, k, Band::Lower);
    return bp;
}

struct Extremum {
    double k;
    double value;
};

// All local minima of a 2pi-periodic f: grid scan, then golden-section polish.
template <class F>
std::vector<Extremum> periodic_minima(F&& f, int grid, double tol = 1e-10) {
    const double h = two_pi / grid;
    std::vector<double> v(grid);
    for (int i = 0; i < grid; ++i) v[i] = f(-pi + h * i);
    std::vector<Extremum> out;
    for (int i = 0; i < grid; ++i) {
        const double l = v[(i + grid - 1) % grid], c = v[i], r = v[(i + 1) % grid];
        if (c <= l && c < r) {
            const double k0 = -pi + h * i;
            const double k = numerics::golden_section_min(f, k0 - h, k0 + h, tol);
            out.push_back({wrap_k(k), f(k)});
        }
    }
    // flat plateaus can report the same minimum twice
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.k < b.k; });
    std::vector<Extremum> uniq;
    for (const auto& e : out)
        if (uniq.empty() || std::abs(e.k - uniq.back().k) > 2.0 * h) uniq.push_back(e);
    if (uniq.size() > 1 && std::abs(uniq.front().k + two_pi - uniq.back().k) <= 2.0 * h) uniq.pop_back();
    return uniq;
}

template <class F>
Extremum periodic_global_min(F&& f, int grid) {
    auto mins = periodic_minima(f, grid);
    return *std::min_element(mins.begin(), mins.end(), [](auto& a, auto& b) { return a.value < b.value; });
}

struct Window {
    double lo;
    double hi;
    bool empty() const { return !(hi > lo); }
    double width() const { return std::max(0.0, hi - lo); }
};

namespace detail {

inline Window one_sided_window(const LatticeParams& p, double max_lower, int grid) {
    auto mins = periodic_minima([&](double k) { return dispersion(p, k).upper; }, grid);
    std::sort(mins.begin(), mins.end(), [](auto& a, auto& b) { return a.value < b.value; });
    if (mins.size() < 2) return {0.0, 0.0};
    const Window w{std::max(mins[0].value, max_lower), mins[1].value};
    // mirror-image minima (theta = pi) differ only by rounding
    if (w.hi - w.lo <= 1e-12 * (1.0 + std::abs(w.hi))) return {0.0, 0.0};
    return w;
}

} // namespace detail

// Frequencies above the lower band where the upper band is met on only one of its
// phonon-like flanks: from the global minimum of the upper band to its next local minimum.
inline Window asymmetric_window(const LatticeParams& p, int grid = 2048) {
    const double max_l = -periodic_global_min([&](double k) { return -dispersion(p, k).lower; }, grid).value;
    return detail::one_sided_window(p, max_l, grid);
}

namespace detail {

// Golden-section leaves k uncertain at the sqrt(eps) level; bisect on v_g instead.
// Returns the stationary k; the caller re-evaluates the band there.
inline double polish_stationary(const LatticeParams& p, double k0, Band b) {
    const double w = 1e-5;
    auto vg = [&](double k) { return group_velocity(p, k, b); };
    if ((vg(k0 - w) < 0.0) == (vg(k0 + w) < 0.0)) return k0;
    return wrap_k(numerics::bisect(vg, k0 - w, k0 + w, 1e-15));
}

} // namespace detail

inline BandMetrics band_metrics(const LatticeParams& p, int k_grid_size = 2048) {
    if (k_grid_size < 256) fail(ErrorKind::ValidationError, "k_grid_size must be >= 256");
    BandMetrics m;
    const auto up = [&](double k) { return dispersion(p, k).upper; };
    const auto lo = [&](double k) { return dispersion(p, k).lower; };
    const auto min_u = periodic_global_min(up, k_grid_size);
    const auto max_u = periodic_global_min([&](double k) { return -up(k); }, k_grid_size);
    const auto min_l = periodic_global_min(lo, k_grid_size);
    const auto max_l = periodic_global_min([&](double k) { return -lo(k); }, k_grid_size);
    m.min_upper = min_u.value;
    m.max_upper = -max_u.value;
    m.min_lower = min_l.value;
    m.max_lower = -max_l.value;
    m.k_min_u = detail::polish_stationary(p, min_u.k, Band::Upper);
    m.k_max_l = detail::polish_stationary(p, max_l.k, Band::Lower);
    m.min_upper = std::min(m.min_upper, up(m.k_min_u));
    m.max_lower = std::max(m.max_lower, lo(m.k_max_l));
    m.eps2 = std::max(0.0, m.min_upper - m.max_lower);
    m.gap_center = 0.5 * (m.min_upper + m.max_lower);
    m.eps1 = detail::one_sided_window(p, m.max_lower, k_grid_size).width();
    return m;
}

// Roots of omega_band(k) = omega0 on (-pi, pi].
inline std::vector<ResonantMode> resonant_modes(const LatticeParams& p, double omega0, Band band,
                                                int grid = 2048) {
    auto f = [&](double k) { return band_energy(p, k, band) - omega0; };
    // band extrema join the grid so tangential crossings near an extremum are bracketed
    std::vector<double> ks;
    const double h = two_pi / grid;
    for (int i = 0; i <= grid; ++i) ks.push_back(-pi + h * i);
    for (const auto& e : periodic_minima(f, grid)) ks.push_back(e.k);
    for (const auto& e : periodic_minima([&](double k) { return -f(k); }, grid)) ks.push_back(e.k);
    std::sort(ks.begin(), ks.end());

    std::vector<ResonantMode> modes;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const double a = ks[i], b = ks[i + 1];
        if (b <= a) continue;
        const double fa = f(a), fb = f(b);
        double k;
        if (fa == 0.0) k = a;
        else if (fa * fb < 0.0) k = numerics::bisect(f, a, b, 1e-12);
        else continue;
        k = wrap_k(k);
        if (!modes.empty() && std::abs(wrap_k(k - modes.back().k)) < 1e-10) continue;
        modes.push_back({k, group_velocity(p, k, band), phonon_weight(p, k, band), band});
    }
    if (modes.size() > 1 && std::abs(wrap_k(modes.front().k - modes.back().k)) < 1e-10) modes.pop_back();
    if (modes.empty())
        fail(ErrorKind::NoResonantMode, "omega0 = " + std::to_string(omega0) + " outside the " +
                                            (band == Band::Upper ? "upper" : "lower") + " band");
    return modes;
}

} // namespace somc
