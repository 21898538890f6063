// polynomial.hpp — Durand–Kerner simultaneous root finder for complex polynomials

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "somc/error.hpp"

namespace somc::numerics {

using cd = std::complex<double>;

struct RootOptions {
    double tol{1e-13};   // max update, scaled by max(1, |root|)
    int max_iter{500};
    int polish_steps{3}; // Newton steps on the undeflated polynomial
};

// Horner evaluation; coeffs ordered from the highest power down.
inline cd horner(std::span<const cd> coeffs, cd y) {
    cd v = 0.0;
    for (const auto& c : coeffs) v = v * y + c;
    return v;
}

inline cd horner_derivative(std::span<const cd> coeffs, cd y) {
    const auto n = coeffs.size() - 1;
    cd v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v = v * y + coeffs[i] * static_cast<double>(n - i);
    return v;
}

inline std::vector<cd> polynomial_roots(std::span<const cd> coeffs, const RootOptions& opt = {}) {
    if (coeffs.size() < 2) fail(ErrorKind::DimensionMismatch, "polynomial needs degree >= 1");
    if (std::abs(coeffs[0]) == 0.0) fail(ErrorKind::RootFindingFailed, "leading coefficient is zero");
    const int n = static_cast<int>(coeffs.size()) - 1;

    std::vector<cd> monic(coeffs.begin(), coeffs.end());
    for (auto& c : monic) c /= coeffs[0];

    // Fujiwara-style bound sets the radius of the starting circle
    double radius = 0.0;
    for (int i = 1; i <= n; ++i)
        radius = std::max(radius, std::pow(std::abs(monic[i]), 1.0 / i));
    radius = std::max(radius, 1e-3);

    std::vector<cd> z(n);
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(radius, 2.0 * M_PI * k / n + 0.4);

    bool converged = false;
    for (int it = 0; it < opt.max_iter && !converged; ++it) {
        double max_step = 0.0;
        for (int k = 0; k < n; ++k) {
            cd denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != k) denom *= (z[k] - z[j]);
            if (std::abs(denom) == 0.0) denom = 1e-300;
            const cd step = horner(monic, z[k]) / denom;
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
        }
        if (!std::isfinite(max_step)) break;
        converged = max_step <= opt.tol;
    }
    if (!converged) fail(ErrorKind::RootFindingFailed, "Durand-Kerner did not converge in " + std::to_string(opt.max_iter) + " iterations");

    for (auto& r : z) {
        for (int s = 0; s < opt.polish_steps; ++s) {
            const cd d = horner_derivative(monic, r);
            if (std::abs(d) == 0.0) break;
            const cd next = r - horner(monic, r) / d;
            if (std::abs(horner(monic, next)) < std::abs(horner(monic, r))) r = next;
            else break;
        }
    }
    return z;
}

// Coefficients (highest power first) of lead * prod (y - r).
inline std::vector<cd> coefficients_from_roots(std::span<const cd> roots, cd lead = 1.0) {
    std::vector<cd> c{lead};
    for (const auto& r : roots) {
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
    }
    return c;
}

} // namespace somc::numerics
