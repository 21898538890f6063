// runner.hpp — subcommand implementations producing named CSV tables

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "somc/config.hpp"
#include "somc/csv.hpp"
#include "somc/somc.hpp"

namespace somc {

using TableSet = std::map<std::string, CsvTable>; // file name -> table

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"bands",    "chirality", "greens",         "boundstate", "couplings",
                                            "dimer",    "tetramer",  "array-dynamics", "disorder",   "sweep"};
    return s;
}

namespace run_detail {

inline double& sweep_field(RunConfig& c, const std::string& name) {
    if (name == "lattice.J") return c.lattice.J;
    if (name == "lattice.K") return c.lattice.K;
    if (name == "lattice.G") return c.lattice.G;
    if (name == "lattice.theta") return c.lattice.theta;
    if (name == "spins.omega0") return c.spins.omega0;
    if (name == "spins.g_eff") return c.spins.g_eff;
    fail(ErrorKind::ValidationError, "sweep.parameter '" + name + "' is not a sweepable field");
}

inline BoundState infinite_bound_state(const RunConfig& c) {
    const double E = c.options.E_BS ? *c.options.E_BS : solve_bound_energy(c.lattice, c.spins.g_eff, c.spins.omega0);
    return bound_amplitudes(c.lattice, c.spins.g_eff, E);
}

inline ChiralBathConfig bath_or_default(const RunConfig& c) { return c.bath ? *c.bath : ChiralBathConfig{}; }

inline DriveConfig drive_or_default(const RunConfig& c, int n) {
    if (c.drive) {
        if (static_cast<int>(c.drive->Omega.size()) != n)
            fail(ErrorKind::ValidationError, "drive needs " + std::to_string(n) + " spins");
        return *c.drive;
    }
    DriveConfig d;
    d.Omega.assign(n, 0.5);
    d.delta = n == 2 ? std::vector<double>{0.0, 0.0} : std::vector<double>{0.6, 0.4, -0.6, -0.4};
    return d;
}

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

inline void check_uniform_drive(const DriveConfig& d) {
    for (const auto& o : d.Omega)
        if (std::abs(o - d.Omega.front()) > 1e-12)
            fail(ErrorKind::ValidationError, "dark-state targets need equal drive amplitudes on all spins");
}

inline TableSet master_run(const RunConfig& c, int n, const DriveConfig& d, const ComplexVector& target, double tau) {
    const auto bath = bath_or_default(c);
    ChiralMasterEquation me(n, d, bath);
    int start = 0;
    if (const auto& st = c.options.initial_state) {
        if (static_cast<int>(st->size()) != n)
            fail(ErrorKind::ValidationError, "options.initial_state needs " + std::to_string(n) + " characters");
        for (int m = 0; m < n; ++m)
            if ((*st)[m] == 'e') start |= 1 << (n - 1 - m);
    }
    const ComplexVector psi0 = ops::basis_state(start, 1 << n);
    const ComplexMatrix rho0 = psi0 * psi0.adjoint();
    MasterOptions opt;
    opt.target = target;
    const auto tr = evolve_master(me, rho0, linear_grid(c.options.t_end_tau * tau, c.options.t_points), opt);

    TableSet out;
    CsvTable t({"t", "fidelity", "concurrence", "trace_err", "min_eigenvalue"});
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        t.add({tr.times[i], tr.fidelity[i], tr.concurrence[i], tr.trace_err[i], tr.min_eigenvalue[i]});
    out.emplace("trajectory.csv", std::move(t));

    const ComplexMatrix ss = steady_state(me);
    CsvTable s({"tau", "fidelity_steady", "concurrence_steady", "fidelity_final", "target_concurrence"});
    ComplexMatrix tgt = target * target.adjoint();
    s.add({tau, fidelity(ss, target), concurrence(reduced_pair(ss, 0, 1)), tr.fidelity.back(),
           concurrence(reduced_pair(tgt, 0, 1))});
    out.emplace("steady.csv", std::move(s));
    return out;
}

} // namespace run_detail

inline TableSet run_bands(const RunConfig& c) {
    const auto& p = c.lattice;
    CsvTable t({"k", "omega_u", "omega_l", "sin2", "cos2"});
    const int M = c.options.k_points;
    for (int i = 0; i < M; ++i) {
        const double k = -pi + two_pi * i / M;
        const auto bp = band_point(p, k);
        t.add({k, bp.omega_u, bp.omega_l, bp.sin_theta_k * bp.sin_theta_k, bp.cos_theta_k * bp.cos_theta_k});
    }
    const auto m = band_metrics(p);
    CsvTable s({"eps1", "eps2", "gap_center", "min_upper", "max_upper", "min_lower", "max_lower"});
    s.add({m.eps1, m.eps2, m.gap_center, m.min_upper, m.max_upper, m.min_lower, m.max_lower});
    TableSet out;
    out.emplace("bands.csv", std::move(t));
    out.emplace("band_metrics.csv", std::move(s));
    return out;
}

// omega0 grid at cell midpoints of [omega_min, omega_max), so neither band edge is sampled.
// The default range is the one-directional window.
inline std::vector<double> chirality_grid(const RunConfig& c) {
    const auto win = asymmetric_window(c.lattice);
    if (win.empty() && !(c.options.omega_min && c.options.omega_max))
        fail(ErrorKind::NoResonantMode, "no one-directional window at this theta; set options.omega_min/omega_max");
    const double lo = c.options.omega_min.value_or(win.lo);
    const double hi = c.options.omega_max.value_or(win.hi);
    if (!(hi > lo)) fail(ErrorKind::ValidationError, "chirality needs omega_max > omega_min");
    const int n = c.options.points;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = lo + (hi - lo) * (i + 0.5) / n;
    return w;
}

inline TableSet run_chirality(const RunConfig& c) {
    const auto grid = chirality_grid(c);
    const auto rates = parallel_map(static_cast<int>(grid.size()), resolve_threads(c.threads),
                                    [&](int i) { return gamma_rates(c.lattice, c.spins, grid[i]); });
    CsvTable t({"omega0", "gamma1", "gamma2", "ratio", "k1", "k2"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.add({grid[i], rates[i].gamma1, rates[i].gamma2, rates[i].ratio, rates[i].k1, rates[i].k2});
    TableSet out;
    out.emplace("chirality.csv", std::move(t));
    return out;
}

inline TableSet run_greens(const RunConfig& c) {
    const int X = c.options.x_max;
    const int th = resolve_threads(c.threads);
    const auto res = parallel_map(2 * X + 1, th, [&](int i) {
        return gamma_ij_residue(c.lattice, c.spins, c.spins.omega0, i - X);
    });
    CsvTable t({"x", "re_gamma", "im_gamma", "re_pv", "im_pv", "abs_pv"});
    for (const auto& r : res)
        t.add({static_cast<long long>(r.x_ij), r.gamma_ij.real(), r.gamma_ij.imag(), r.pv_part.real(),
               r.pv_part.imag(), std::abs(r.pv_part)});
    const int P = c.options.pv_points;
    const auto pv = parallel_map(P, th, [&](int i) {
        const double x = -X + 2.0 * X * i / (P - 1);
        return std::pair{x, pv_part_continuous(c.lattice, c.spins, c.spins.omega0, x)};
    });
    CsvTable u({"x", "re_pv", "im_pv", "abs_pv"});
    for (const auto& [x, v] : pv) u.add({x, v.real(), v.imag(), std::abs(v)});
    TableSet out;
    out.emplace("greens.csv", std::move(t));
    out.emplace("pv_continuous.csv", std::move(u));
    return out;
}

inline TableSet run_boundstate(const RunConfig& c) {
    const BoundState bs = c.options.finite ? finite_bound_state(c.lattice, c.spins) : run_detail::infinite_bound_state(c);
    CsvTable t({"j", "re_Ca", "im_Ca", "re_Cb", "im_Cb"});
    for (int j = bs.C_a.first; j <= bs.C_a.last(); ++j) {
        const cd a = bs.C_a.at(j), b = bs.C_b.at(j);
        t.add({static_cast<long long>(j), a.real(), a.imag(), b.real(), b.imag()});
    }
    CsvTable s({"E_BS", "re_Ce", "im_Ce", "loc_length", "fit_r2", "spin_weight", "norm", "alt_residual"});
    s.add({bs.E_BS, bs.C_e.real(), bs.C_e.imag(), bs.localization_length, bs.fit_r2, bs.spin_weight, bs.norm(),
           alternation_residual(bs)});
    TableSet out;
    out.emplace("boundstate.csv", std::move(t));
    out.emplace("boundstate_summary.csv", std::move(s));
    return out;
}

inline TableSet run_couplings(const RunConfig& c) {
    const auto bs = run_detail::infinite_bound_state(c);
    const cd g1 = c.spins.g_eff * bs.C_b.at(1) / bs.C_e;
    CsvTable t({"dx", "re_g", "im_g", "abs_g", "ratio"});
    for (int dx = 1; dx <= c.options.dx_max; ++dx) {
        const cd g = c.spins.g_eff * bs.C_b.at(dx) / bs.C_e;
        t.add({static_cast<long long>(dx), g.real(), g.imag(), std::abs(g), std::abs(g) / std::abs(g1)});
    }
    TableSet out;
    out.emplace("couplings.csv", std::move(t));
    return out;
}

inline TableSet run_dimer(const RunConfig& c) {
    const auto d = run_detail::drive_or_default(c, 2);
    run_detail::check_uniform_drive(d);
    if (!run_detail::close(d.delta[1], -d.delta[0]))
        fail(ErrorKind::ValidationError, "dimer target needs detunings (delta1, -delta1)");
    const auto b = run_detail::bath_or_default(c);
    const double O = d.Omega[0].real();
    if (d.Omega[0].imag() != 0.0) fail(ErrorKind::ValidationError, "dimer target needs a real drive amplitude");
    return run_detail::master_run(c, 2, d, dimer_target(O, d.delta[0], b.gamma1, b.gamma2),
                                  steady_time(O, d.delta[0], b.gamma1, b.gamma2));
}

// Detuning profile (d1, -d1, d2, -d2) targets two dimers, (d1, d2, -d1, -d2) the tetramer.
inline TableSet run_tetramer(const RunConfig& c) {
    const auto d = run_detail::drive_or_default(c, 4);
    run_detail::check_uniform_drive(d);
    const auto b = run_detail::bath_or_default(c);
    if (d.Omega[0].imag() != 0.0) fail(ErrorKind::ValidationError, "tetramer target needs a real drive amplitude");
    const double O = d.Omega[0].real();
    const auto& x = d.delta;
    using run_detail::close;
    if (close(x[1], -x[0]) && close(x[3], -x[2])) {
        const auto tgt = product_state(dimer_target(O, x[0], b.gamma1, b.gamma2), dimer_target(O, x[2], b.gamma1, b.gamma2));
        const double tau = std::max(steady_time(O, x[0], b.gamma1, b.gamma2), steady_time(O, x[2], b.gamma1, b.gamma2));
        return run_detail::master_run(c, 4, d, tgt, tau);
    }
    if (close(x[2], -x[0]) && close(x[3], -x[1])) {
        const double tau = std::max(steady_time(O, x[0], b.gamma1, b.gamma2), steady_time(O, x[1], b.gamma1, b.gamma2));
        return run_detail::master_run(c, 4, d, tetramer_target(O, x[0], x[1], b.gamma1, b.gamma2), tau);
    }
    fail(ErrorKind::ValidationError, "detunings match neither (d1,-d1,d2,-d2) nor (d1,d2,-d1,-d2)");
}

struct ArrayDynamics {
    Trajectory full;
    Trajectory effective;
    cd g12;
};

inline ArrayDynamics array_dynamics(const RunConfig& c) {
    const auto& s = c.spins;
    const int ns = static_cast<int>(s.positions.size());
    if (ns < 2) fail(ErrorKind::DimensionMismatch, "array-dynamics needs at least two spins");
    const int start = c.options.initial_spin.value_or(ns / 2);
    if (start < 0 || start >= ns) fail(ErrorKind::ValidationError, "options.initial_spin out of range");

    const auto H = build_realspace(c.lattice, s);
    const auto L = layout(c.lattice, s);
    const auto bs = run_detail::infinite_bound_state(c);
    const auto g = effective_couplings(bs, s);
    const auto Hs = build_spin_hamiltonian(g, ns, Sector::SingleExcitation);

    cd g12 = 0.0;
    for (int j = 1; j < ns && g12 == 0.0; ++j) g12 = g.g(0, j);
    if (g12 == 0.0) fail(ErrorKind::SingularCoefficient, "nearest coupling vanishes");
    const double t_end = c.options.t_end.value_or(4.0 * pi / std::abs(g12));
    const auto grid = linear_grid(t_end, c.options.t_points);

    SchrodingerOptions full_opt, eff_opt;
    for (int m = 0; m < ns; ++m) full_opt.observe.push_back(L.spin(m));
    ArrayDynamics out;
    out.full = evolve_single_excitation(H, ops::basis_state(L.spin(start), L.dim()), grid, full_opt);
    out.effective = evolve_effective(Hs, ops::basis_state(start, ns), grid, eff_opt);
    out.g12 = g12;
    return out;
}

inline TableSet run_array_dynamics(const RunConfig& c) {
    const auto r = array_dynamics(c);
    const int ns = static_cast<int>(c.spins.positions.size());
    std::vector<std::string> cols{"t"};
    for (int m = 1; m <= ns; ++m) cols.push_back("pop_spin_" + std::to_string(m));
    for (int m = 1; m <= ns; ++m) cols.push_back("pop_markov_" + std::to_string(m));
    cols.push_back("norm_err");
    cols.push_back("max_dev_markov");
    CsvTable t(cols);
    for (std::size_t i = 0; i < r.full.times.size(); ++i) {
        std::vector<Cell> row{r.full.times[i]};
        double dev = 0.0;
        for (int m = 0; m < ns; ++m) row.emplace_back(r.full.populations[i][m]);
        for (int m = 0; m < ns; ++m) {
            row.emplace_back(r.effective.populations[i][m]);
            dev = std::max(dev, std::abs(r.full.populations[i][m] - r.effective.populations[i][m]));
        }
        row.emplace_back(r.full.trace_err[i]);
        row.emplace_back(dev);
        t.add(std::move(row));
    }
    TableSet out;
    out.emplace("array_dynamics.csv", std::move(t));
    return out;
}

inline std::vector<DisorderSpec> resolved_disorder(const RunConfig& c) {
    auto specs = c.disorder;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].seed == 0) specs[i].seed = realization_seed(c.seed, 0x5eed0000ULL + i);
    return specs;
}

// Realizations without a localized state, or with a non-decaying envelope, leave the
// alternation and length cells empty.
inline TableSet run_disorder(const RunConfig& c) {
    if (c.spins.positions.empty()) fail(ErrorKind::DimensionMismatch, "disorder needs a spin");
    const auto specs = resolved_disorder(c);
    const double center = band_metrics(c.lattice).gap_center;
    const auto res = parallel_map(c.options.realizations, resolve_threads(c.threads), [&](int i) {
        return analyze_realization(c.lattice, c.spins, specs, i, center);
    });
    CsvTable t({"realization", "W_C", "W_M", "gap_open", "localized", "spin_weight", "alt_residual", "loc_length",
                "E_BS", "hermiticity"});
    auto opt_cell = [](bool ok, double v) -> Cell { return ok && std::isfinite(v) ? Cell{v} : Cell{std::string{}}; };
    for (const auto& r : res)
        t.add({static_cast<long long>(r.index), r.W_C, r.W_M, static_cast<long long>(r.gap_open),
               static_cast<long long>(r.localized), r.spin_weight, opt_cell(r.localized, r.alt_residual),
               opt_cell(r.localized, r.loc_length), opt_cell(r.localized, r.E_BS), r.hermiticity});
    const auto rep = summarize(res);
    CsvTable s({"realizations", "fraction_gap_open", "mean_alt_residual", "max_alt_residual", "min_spin_weight",
                "max_hermiticity"});
    s.add({static_cast<long long>(res.size()), rep.fraction_gap_open, rep.mean_alt_residual, rep.max_alt_residual,
           rep.min_spin_weight, rep.max_hermiticity});
    TableSet out;
    out.emplace("disorder.csv", std::move(t));
    out.emplace("disorder_summary.csv", std::move(s));
    return out;
}

inline double sweep_quantity(const RunConfig& c, const std::string& q) {
    if (q == "eps1" || q == "eps2" || q == "gap_center") {
        const auto m = band_metrics(c.lattice);
        return q == "eps1" ? m.eps1 : q == "eps2" ? m.eps2 : m.gap_center;
    }
    if (q == "gamma1" || q == "gamma2" || q == "ratio") {
        const auto r = gamma_rates(c.lattice, c.spins, c.spins.omega0);
        return q == "gamma1" ? r.gamma1 : q == "gamma2" ? r.gamma2 : r.ratio;
    }
    if (q == "ratio3" || q == "ratio5" || q == "ratio7")
        return coupling_ratios(c.lattice, c.spins.g_eff, {q.back() - '0'}).front();
    const auto bs = run_detail::infinite_bound_state(c);
    if (q == "E_BS") return bs.E_BS;
    if (q == "C_e") return std::abs(bs.C_e);
    if (q == "loc_length") return bs.localization_length;
    if (q == "abs_g12") return std::abs(c.spins.g_eff * bs.C_b.at(1) / bs.C_e);
    fail(ErrorKind::ValidationError, "sweep quantity '" + q + "' is unknown");
}

inline TableSet run_sweep(const RunConfig& c) {
    if (!c.sweep) fail(ErrorKind::ValidationError, "sweep subcommand needs a 'sweep' section");
    const auto& ax = *c.sweep;
    const int n = ax.steps;
    const auto rows = parallel_map(n, resolve_threads(c.threads), [&](int i) {
        RunConfig ci = c;
        const double v = n == 1 ? ax.start : ax.start + (ax.stop - ax.start) * i / (n - 1);
        run_detail::sweep_field(ci, ax.parameter) = v;
        std::vector<double> row{v};
        for (const auto& q : ax.quantities) row.push_back(sweep_quantity(ci, q));
        return row;
    });
    std::vector<std::string> cols{"index", ax.parameter};
    for (const auto& q : ax.quantities) cols.push_back(q);
    CsvTable t(cols);
    for (int i = 0; i < n; ++i) {
        std::vector<Cell> row{static_cast<long long>(i)};
        for (double v : rows[i]) row.emplace_back(v);
        t.add(std::move(row));
    }
    TableSet out;
    out.emplace("sweep.csv", std::move(t));
    return out;
}

inline TableSet run_command(const std::string& name, const RunConfig& c) {
    if (name == "bands") return run_bands(c);
    if (name == "chirality") return run_chirality(c);
    if (name == "greens") return run_greens(c);
    if (name == "boundstate") return run_boundstate(c);
    if (name == "couplings") return run_couplings(c);
    if (name == "dimer") return run_dimer(c);
    if (name == "tetramer") return run_tetramer(c);
    if (name == "array-dynamics") return run_array_dynamics(c);
    if (name == "disorder") return run_disorder(c);
    if (name == "sweep") return run_sweep(c);
    fail(ErrorKind::ValidationError, "unknown subcommand '" + name + "'");
}

} // namespace somc
