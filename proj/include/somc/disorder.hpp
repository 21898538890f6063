// disorder.hpp — disorder realizations, robustness sweeps and localization estimates

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "somc/bands.hpp"
#include "somc/boundstate.hpp"
#include "somc/error.hpp"
#include "somc/model.hpp"

namespace somc {

enum class DisorderKind { OnsiteOptical, OnsiteMechanical, OffdiagOptical, OffdiagMechanical };

struct DisorderSpec {
    DisorderKind kind{DisorderKind::OffdiagOptical};
    double W{0.0};          // full width of the uniform distribution [K]
    std::uint64_t seed{1};
};

inline std::string to_string(DisorderKind k) {
    switch (k) {
    case DisorderKind::OnsiteOptical: return "onsite_optical";
    case DisorderKind::OnsiteMechanical: return "onsite_mechanical";
    case DisorderKind::OffdiagOptical: return "offdiag_optical";
    case DisorderKind::OffdiagMechanical: return "offdiag_mechanical";
    }
    return "?";
}

inline bool optical(DisorderKind k) { return k == DisorderKind::OnsiteOptical || k == DisorderKind::OffdiagOptical; }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-realization seed; mt19937_64 is then seeded with it.
inline std::uint64_t realization_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index));
}

// Uniform draws on [-W/2, W/2) from the top 53 bits of mt19937_64, which the standard
// fixes bit-for-bit; std::uniform_real_distribution is avoided for that reason.
inline std::vector<double> uniform_draws(std::uint64_t seed, int count, double W) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(count);
    for (auto& v : out) v = W * (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5);
    return out;
}

inline void add_disorder(DisorderRealization& r, const DisorderSpec& spec, Boundary b, std::uint64_t seed) {
    if (spec.W < 0.0) fail(ErrorKind::ValidationError, "disorder width W must be >= 0");
    const int bonds = b == Boundary::Periodic ? r.N : r.N - 1;
    std::vector<double>* target = nullptr;
    int count = r.N;
    switch (spec.kind) {
    case DisorderKind::OnsiteOptical: target = &r.onsite_photon; break;
    case DisorderKind::OnsiteMechanical: target = &r.onsite_phonon; break;
    case DisorderKind::OffdiagOptical: target = &r.hop_photon; count = bonds; break;
    case DisorderKind::OffdiagMechanical: target = &r.hop_phonon; count = bonds; break;
    }
    const auto d = uniform_draws(seed, count, spec.W);
    if (target->empty()) target->assign(count, 0.0);
    for (int i = 0; i < count; ++i) (*target)[i] += d[i];
}

inline DisorderRealization sample(const DisorderSpec& spec, int N, Boundary b = Boundary::Open) {
    if (N < 2) fail(ErrorKind::ValidationError, "N must be >= 2");
    DisorderRealization r;
    r.N = N;
    add_disorder(r, spec, b, spec.seed);
    return r;
}

// Realization `index` of a combined disorder model; each spec draws from its own stream.
inline DisorderRealization sample(const std::vector<DisorderSpec>& specs, int N, Boundary b, std::uint64_t index) {
    if (N < 2) fail(ErrorKind::ValidationError, "N must be >= 2");
    DisorderRealization r;
    r.N = N;
    for (const auto& s : specs) add_disorder(r, s, b, realization_seed(s.seed, index));
    return r;
}

struct LocalizationEstimate {
    double cells;
    bool unbounded;
};

inline LocalizationEstimate localization_estimate(double J_c, double W) {
    if (W <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {100.0 * J_c * J_c / (W * W), false};
}

struct RealizationResult {
    int index{0};
    double W_C{0.0};
    double W_M{0.0};
    bool gap_open{true};
    bool localized{true};
    double spin_weight{0.0};
    double alt_residual{0.0};
    double loc_length{0.0};
    double E_BS{0.0};
    double hermiticity{0.0};
};

struct RobustnessReport {
    std::vector<RealizationResult> results;
    double mean_alt_residual{0.0};
    double max_alt_residual{0.0};
    double fraction_gap_open{0.0};
    double min_spin_weight{0.0};
    double max_hermiticity{0.0};
};

// Gap detector: a spin-free disordered spectrum with an eigenvalue within tol of
// the clean gap center counts as closed.
inline bool gap_open(const LatticeParams& p, const DisorderRealization& r, double clean_center, double tol = 1e-3) {
    const auto H = build_realspace(p, SpinConfig{0.0, 0.0, {}, 0.0}, r);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i) - clean_center) < tol) return false;
    return true;
}

inline double widths(const std::vector<DisorderSpec>& specs, bool want_optical) {
    double w = 0.0;
    for (const auto& s : specs)
        if (optical(s.kind) == want_optical) w = std::max(w, s.W);
    return w;
}

inline RealizationResult analyze_realization(const LatticeParams& p, const SpinConfig& spins,
                                             const std::vector<DisorderSpec>& specs, int index, double clean_center) {
    RealizationResult res;
    res.index = index;
    res.W_C = widths(specs, true);
    res.W_M = widths(specs, false);
    const auto r = sample(specs, p.N, p.boundary, static_cast<std::uint64_t>(index));
    res.gap_open = gap_open(p, r, clean_center);
    const auto H = build_realspace(p, spins, r);
    res.hermiticity = hermiticity_residual(H);
    try {
        const auto bs = finite_bound_state(H, layout(p, spins), spins.positions.front(), spins.omega0);
        res.spin_weight = bs.spin_weight;
        res.alt_residual = alternation_residual(bs);
        res.loc_length = bs.localization_length;
        res.E_BS = bs.E_BS;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoLocalizedState) throw;
        res.localized = false;
        res.alt_residual = std::numeric_limits<double>::quiet_NaN();
        res.loc_length = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

inline RobustnessReport summarize(std::vector<RealizationResult> results) {
    RobustnessReport rep;
    rep.results = std::move(results);
    rep.min_spin_weight = 1.0;
    int open = 0, counted = 0;
    for (const auto& r : rep.results) {
        open += r.gap_open ? 1 : 0;
        rep.min_spin_weight = std::min(rep.min_spin_weight, r.localized ? r.spin_weight : 0.0);
        rep.max_hermiticity = std::max(rep.max_hermiticity, r.hermiticity);
        if (r.localized) {
            rep.mean_alt_residual += r.alt_residual;
            rep.max_alt_residual = std::max(rep.max_alt_residual, r.alt_residual);
            ++counted;
        }
    }
    if (counted > 0) rep.mean_alt_residual /= counted;
    if (!rep.results.empty()) rep.fraction_gap_open = static_cast<double>(open) / rep.results.size();
    return rep;
}

inline RobustnessReport robustness_sweep(const LatticeParams& p, const SpinConfig& spins,
                                         const std::vector<DisorderSpec>& specs, int n_realizations) {
    if (n_realizations < 1) fail(ErrorKind::ValidationError, "n_realizations must be >= 1");
    if (spins.positions.empty()) fail(ErrorKind::DimensionMismatch, "robustness_sweep needs a spin");
    const double center = band_metrics(p).gap_center;
    std::vector<RealizationResult> out;
    for (int i = 0; i < n_realizations; ++i) out.push_back(analyze_realization(p, spins, specs, i, center));
    return summarize(std::move(out));
}

// Gap of the clean lattice with the random term frozen to a uniform value u.
inline Window uniform_shift_gap(const LatticeParams& p, DisorderKind kind, double u, int grid = 1024) {
    LatticeParams q = p;
    double da = 0.0, db = 0.0;
    switch (kind) {
    case DisorderKind::OnsiteOptical: da = u; break;
    case DisorderKind::OnsiteMechanical: db = u; break;
    case DisorderKind::OffdiagOptical: q.J = p.J - u; break;   // hop -J + u
    case DisorderKind::OffdiagMechanical: q.K = p.K - u; break;
    }
    auto bands = [&](double k) {
        const double ha = -2.0 * q.J * std::cos(k - q.theta) + da;
        const double hb = -2.0 * q.K * std::cos(k) + db;
        const double r = std::hypot(0.5 * (ha - hb), q.G);
        return std::pair{0.5 * (ha + hb) + r, 0.5 * (ha + hb) - r};
    };
    const double lo = -periodic_global_min([&](double k) { return -bands(k).second; }, grid).value;
    const double hi = periodic_global_min([&](double k) { return bands(k).first; }, grid).value;
    return {lo, hi};
}

// Smallest W at which the gaps of the two extreme uniform limits (+W/2 and -W/2) stop
// sharing any frequency: beyond it no frequency is gapped everywhere along the chain.
inline double critical_disorder_estimate(const LatticeParams& p, DisorderKind kind, double W_max) {
    auto closed = [&](double W) {
        const auto a = uniform_shift_gap(p, kind, 0.5 * W);
        const auto b = uniform_shift_gap(p, kind, -0.5 * W);
        return std::min(a.hi, b.hi) <= std::max(a.lo, b.lo);
    };
    if (closed(0.0)) return 0.0;
    if (!closed(W_max)) return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = W_max;
    for (int i = 0; i < 60 && hi - lo > 1e-9 * W_max; ++i) {
        const double m = 0.5 * (lo + hi);
        (closed(m) ? hi : lo) = m;
    }
    return hi;
}

} // namespace somc
