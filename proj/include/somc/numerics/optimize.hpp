// optimize.hpp — golden-section search and bracketing bisection

#pragma once

#include <cmath>

namespace somc::numerics {

// Minimizer of a unimodal f on [a, b].
template <class F>
double golden_section_min(F&& f, double a, double b, double tol = 1e-10, int max_iter = 200) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Root of f in [a, b] given f(a), f(b) of opposite sign. Stops when the bracket is
// narrower than xtol, or when |f| <= ftol, or when the bracket stops shrinking.
template <class F>
double bisect(F&& f, double a, double b, double xtol = 1e-12, double ftol = 0.0, int max_iter = 400) {
    double fa = f(a);
    double m = 0.5 * (a + b);
    for (int i = 0; i < max_iter; ++i) {
        m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0 || std::abs(fm) <= ftol) return m;
        if ((fm < 0.0) == (fa < 0.0)) { a = m; fa = fm; }
        else b = m;
        if (b - a <= xtol) break;
    }
    return 0.5 * (a + b);
}

} // namespace somc::numerics
