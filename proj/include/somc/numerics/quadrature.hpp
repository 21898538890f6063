// quadrature.hpp — globally adaptive Gauss–Kronrod and periodic trapezoid rules

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

namespace somc::numerics {

template <class T>
struct QuadratureResult {
    T value{};
    double error{0.0};
    int intervals{0};
    bool converged{false};
};

struct QuadratureOptions {
    double rel_tol{1e-10};
    double abs_tol{1e-300};
    int max_intervals{40000};
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule
inline constexpr std::array<double, 8> kronrod_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    double floor; // rounding level of this segment
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Error estimate follows QUADPACK: the raw |K - G| difference is rescaled by the
// integrand's spread, which is far less pessimistic for smooth integrands.
template <class F, class T>
Segment<T> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kronrod_x[i]);
        fv[14 - i] = f(c + h * kronrod_x[i]);
    }
    T k = fv[7] * kronrod_w[7];
    T g = fv[7] * gauss_w[3];
    for (int i = 0; i < 7; ++i) {
        const T s = fv[i] + fv[14 - i];
        k += s * kronrod_w[i];
        if (i % 2 == 1) g += s * gauss_w[i / 2];
    }
    const T mean = k * 0.5;
    double asc = std::abs(fv[7] - mean) * kronrod_w[7];
    for (int i = 0; i < 7; ++i) asc += kronrod_w[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    asc *= std::abs(h);
    double err = std::abs((k - g) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    double absk = 0.0;
    for (const auto& v : fv) absk += std::abs(v);
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * absk / 15.0 * std::abs(2.0 * h);
    return {a, b, k * h, std::max(err, floor), floor};
}

} // namespace detail

// Integrates f over [a, b], splitting first at the given interior breakpoints,
// then always bisecting the segment with the largest error estimate.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints = {},
                        const QuadratureOptions& opt = {}) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    std::vector<double> pts{a};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::priority_queue<detail::Segment<T>> heap;
    T total{};
    double err = 0.0, floor = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto s = detail::gk15<F, T>(f, pts[i], pts[i + 1]);
        total += s.value;
        err += s.error;
        floor += s.floor;
        heap.push(s);
    }

    QuadratureResult<T> out;
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        // below 2x the rounding floor further bisection cannot help
        if (err <= target || err <= 2.0 * floor) { out.converged = true; break; }
        if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { heap.push(worst); break; }
        auto left = detail::gk15<F, T>(f, worst.a, mid);
        auto right = detail::gk15<F, T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
    }
    // recompute the sums from the leaves to shed accumulated rounding
    total = T{};
    err = 0.0;
    floor = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        floor += heap.top().floor;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    if (!out.converged) out.converged = err <= std::max({opt.abs_tol, opt.rel_tol * std::abs(total), 2.0 * floor});
    return out;
}

// Uniform M-point rule on one period [-pi, pi); spectrally accurate for smooth periodic f.
template <class F>
auto integrate_periodic(F&& f, int M) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    T sum{};
    const double h = 2.0 * M_PI / M;
    for (int m = 0; m < M; ++m) sum += f(-M_PI + h * m);
    return sum * h;
}

} // namespace somc::numerics
