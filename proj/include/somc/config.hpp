// config.hpp — run configuration: JSON parsing, validation, flag overrides, serialization

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "somc/disorder.hpp"
#include "somc/dynamics.hpp"
#include "somc/error.hpp"
#include "somc/model.hpp"

namespace somc {

using json = nlohmann::json;

inline constexpr const char* tool_version = "somc 1.0.0";

struct SweepAxis {
    std::string parameter{"lattice.theta"};
    double start{pi};
    double stop{1.14 * pi};
    int steps{50};
    std::vector<std::string> quantities{"eps1", "eps2"};
};

// Knobs that only some subcommands read.
struct RunOptions {
    int k_points{1024};
    int points{20};                  // chirality omega0 grid
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    int x_max{40};                   // greens lattice separations
    int pv_points{801};              // dense P.V. curve
    bool finite{false};              // boundstate from the finite array
    std::optional<double> E_BS;      // boundstate energy, instead of solving the pole equation
    int dx_max{15};                  // couplings table
    double t_end_tau{20.0};          // dimer/tetramer horizon in units of steady_time
    int t_points{401};
    std::optional<double> t_end;     // array-dynamics horizon; default 4 pi / |g12|
    std::optional<int> initial_spin; // array-dynamics, default middle spin
    std::optional<std::string> initial_state; // dimer/tetramer product state, one 'g'/'e' per spin
    int realizations{100};
};

struct RunConfig {
    LatticeParams lattice;
    SpinConfig spins;
    std::optional<DriveConfig> drive;
    std::optional<ChiralBathConfig> bath;
    std::vector<DisorderSpec> disorder; // a spec with seed 0 draws from the run seed
    std::optional<SweepAxis> sweep;
    RunOptions options;
    std::string output_path{"out"};
    std::uint64_t seed{1};
    int threads{0};
};

namespace detail {

inline std::string boundary_name(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

inline json complex_to_json(cd z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

// Collects every violation before failing, so one run reports them all.
class Reader {
public:
    std::vector<std::string> errors;

    void allow(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
        if (!obj.is_object()) {
            errors.push_back(where + " must be an object");
            return;
        }
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!ok.count(it.key())) errors.push_back("unknown key '" + join(where, it.key()) + "'");
    }

    template <class T>
    void get(const json& obj, const std::string& where, const char* key, T& out) {
        if (!obj.is_object() || !obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back("'" + join(where, key) + "' has the wrong type");
        }
    }

    template <class T>
    void get(const json& obj, const std::string& where, const char* key, std::optional<T>& out) {
        if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return;
        T v{};
        get(obj, where, key, v);
        out = v;
    }

    void get_complex_list(const json& obj, const std::string& where, const char* key, std::vector<cd>& out) {
        if (!obj.is_object() || !obj.contains(key)) return;
        const auto& a = obj.at(key);
        if (!a.is_array()) { errors.push_back("'" + join(where, key) + "' must be an array"); return; }
        out.clear();
        for (const auto& e : a) {
            if (e.is_number()) out.emplace_back(e.get<double>(), 0.0);
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                out.emplace_back(e[0].get<double>(), e[1].get<double>());
            else { errors.push_back("'" + join(where, key) + "' entries must be numbers or [re, im]"); return; }
        }
    }

    void check(bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    }

    static std::string join(const std::string& where, const std::string& key) {
        return where.empty() ? key : where + "." + key;
    }
};

inline DisorderKind parse_kind(const std::string& s, Reader& r) {
    if (s == "onsite_optical") return DisorderKind::OnsiteOptical;
    if (s == "onsite_mechanical") return DisorderKind::OnsiteMechanical;
    if (s == "offdiag_optical") return DisorderKind::OffdiagOptical;
    if (s == "offdiag_mechanical") return DisorderKind::OffdiagMechanical;
    r.errors.push_back("unknown disorder kind '" + s + "'");
    return DisorderKind::OffdiagOptical;
}

inline const std::set<std::string>& sweep_quantities() {
    static const std::set<std::string> q{"eps1", "eps2", "gap_center", "gamma1", "gamma2", "ratio", "E_BS",
                                          "C_e", "loc_length", "abs_g12", "ratio3", "ratio5", "ratio7"};
    return q;
}

} // namespace detail

inline json to_json(const RunConfig& c) {
    json j;
    const auto& L = c.lattice;
    j["lattice"] = {{"J", L.J}, {"K", L.K}, {"G", L.G}, {"theta", L.theta}, {"N", L.N},
                    {"boundary", detail::boundary_name(L.boundary)}};
    json doc = json::object();
    detail::put_opt(doc, "g0", L.drive.g0);
    detail::put_opt(doc, "alpha", L.drive.alpha);
    detail::put_opt(doc, "omega_L", L.drive.omega_L);
    detail::put_opt(doc, "omega_c", L.drive.omega_c);
    detail::put_opt(doc, "omega_M", L.drive.omega_M);
    if (!doc.empty()) j["lattice"]["drive"] = doc;
    j["spins"] = {{"omega0", c.spins.omega0}, {"g_eff", c.spins.g_eff}, {"positions", c.spins.positions},
                  {"gamma_s", c.spins.gamma_s}};
    if (c.drive) {
        json om = json::array();
        for (const auto& z : c.drive->Omega) om.push_back(detail::complex_to_json(z));
        j["drive"] = {{"nu", c.drive->nu}, {"Omega", om}, {"delta", c.drive->delta}};
    }
    if (c.bath) {
        const auto& b = *c.bath;
        j["bath"] = {{"gamma1", b.gamma1}, {"gamma2", b.gamma2}, {"eta1", b.eta1}, {"eta2", b.eta2},
                     {"g_s", b.g_s},       {"gamma_s", b.gamma_s}, {"N_p", b.N_p}};
    }
    json dis = json::array();
    for (const auto& d : c.disorder) dis.push_back({{"kind", to_string(d.kind)}, {"W", d.W}, {"seed", d.seed}});
    j["disorder"] = dis;
    if (c.sweep) {
        const auto& s = *c.sweep;
        j["sweep"] = {{"parameter", s.parameter}, {"start", s.start}, {"stop", s.stop}, {"steps", s.steps},
                      {"quantities", s.quantities}};
    }
    const auto& o = c.options;
    json opt = {{"k_points", o.k_points}, {"points", o.points}, {"x_max", o.x_max}, {"pv_points", o.pv_points},
                {"finite", o.finite}, {"dx_max", o.dx_max}, {"t_end_tau", o.t_end_tau}, {"t_points", o.t_points},
                {"realizations", o.realizations}};
    detail::put_opt(opt, "omega_min", o.omega_min);
    detail::put_opt(opt, "omega_max", o.omega_max);
    detail::put_opt(opt, "E_BS", o.E_BS);
    detail::put_opt(opt, "t_end", o.t_end);
    detail::put_opt(opt, "initial_spin", o.initial_spin);
    detail::put_opt(opt, "initial_state", o.initial_state);
    j["options"] = opt;
    j["output_path"] = c.output_path;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

inline RunConfig from_json(const json& j) {
    detail::Reader r;
    RunConfig c;
    if (j.is_null()) return c;
    r.allow(j, "", {"lattice", "spins", "drive", "bath", "disorder", "sweep", "options", "output_path", "seed", "threads"});
    if (!r.errors.empty() && !j.is_object()) fail(ErrorKind::ValidationError, r.errors.front());

    if (j.contains("lattice")) {
        const auto& l = j["lattice"];
        r.allow(l, "lattice", {"J", "K", "G", "theta", "N", "boundary", "drive"});
        r.get(l, "lattice", "J", c.lattice.J);
        r.get(l, "lattice", "K", c.lattice.K);
        r.get(l, "lattice", "G", c.lattice.G);
        r.get(l, "lattice", "theta", c.lattice.theta);
        r.get(l, "lattice", "N", c.lattice.N);
        std::string b = detail::boundary_name(c.lattice.boundary);
        r.get(l, "lattice", "boundary", b);
        if (b == "open") c.lattice.boundary = Boundary::Open;
        else if (b == "periodic") c.lattice.boundary = Boundary::Periodic;
        else r.errors.push_back("lattice.boundary must be 'open' or 'periodic'");
        if (l.is_object() && l.contains("drive")) {
            const auto& d = l["drive"];
            r.allow(d, "lattice.drive", {"g0", "alpha", "omega_L", "omega_c", "omega_M"});
            r.get(d, "lattice.drive", "g0", c.lattice.drive.g0);
            r.get(d, "lattice.drive", "alpha", c.lattice.drive.alpha);
            r.get(d, "lattice.drive", "omega_L", c.lattice.drive.omega_L);
            r.get(d, "lattice.drive", "omega_c", c.lattice.drive.omega_c);
            r.get(d, "lattice.drive", "omega_M", c.lattice.drive.omega_M);
        }
    }
    for (const auto& e : validation_errors(c.lattice)) r.errors.push_back(e);
    if (std::isfinite(c.lattice.theta)) c.lattice.theta = normalize_angle(c.lattice.theta);

    if (j.contains("spins")) {
        const auto& s = j["spins"];
        r.allow(s, "spins", {"omega0", "g_eff", "positions", "gamma_s"});
        r.get(s, "spins", "omega0", c.spins.omega0);
        r.get(s, "spins", "g_eff", c.spins.g_eff);
        r.get(s, "spins", "positions", c.spins.positions);
        r.get(s, "spins", "gamma_s", c.spins.gamma_s);
    }
    r.check(c.spins.g_eff >= 0.0, "spins.g_eff must be >= 0");
    r.check(c.spins.gamma_s >= 0.0, "spins.gamma_s must be >= 0");
    if (c.lattice.N >= 2) {
        std::set<int> seen;
        const int lo = first_cell(c.lattice.N), hi = lo + c.lattice.N - 1;
        for (int x : c.spins.positions) {
            r.check(seen.insert(x).second, "spins.positions has duplicate cell " + std::to_string(x));
            r.check(x >= lo && x <= hi, "spins.positions entry " + std::to_string(x) + " outside cells [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }

    if (j.contains("drive")) {
        const auto& d = j["drive"];
        DriveConfig dc;
        r.allow(d, "drive", {"nu", "Omega", "delta"});
        r.get(d, "drive", "nu", dc.nu);
        r.get_complex_list(d, "drive", "Omega", dc.Omega);
        r.get(d, "drive", "delta", dc.delta);
        r.check(dc.Omega.size() == dc.delta.size(), "drive.Omega and drive.delta must have equal length");
        c.drive = dc;
    }
    if (j.contains("bath")) {
        const auto& b = j["bath"];
        ChiralBathConfig bc;
        r.allow(b, "bath", {"gamma1", "gamma2", "eta1", "eta2", "g_s", "gamma_s", "N_p"});
        r.get(b, "bath", "gamma1", bc.gamma1);
        r.get(b, "bath", "gamma2", bc.gamma2);
        r.get(b, "bath", "eta1", bc.eta1);
        r.get(b, "bath", "eta2", bc.eta2);
        r.get(b, "bath", "g_s", bc.g_s);
        r.get(b, "bath", "gamma_s", bc.gamma_s);
        r.get(b, "bath", "N_p", bc.N_p);
        r.check(bc.gamma1 >= 0.0 && bc.gamma2 >= 0.0 && bc.gamma_s >= 0.0, "bath rates must be >= 0");
        r.check(bc.eta1 >= 0.0 && bc.eta1 <= 1.0 && bc.eta2 >= 0.0 && bc.eta2 <= 1.0, "bath.eta must lie in [0, 1]");
        c.bath = bc;
    }
    if (j.contains("disorder")) {
        const auto& d = j["disorder"];
        auto one = [&](const json& e, const std::string& where) {
            DisorderSpec s;
            s.seed = 0; // 0 = derive from the run seed
            r.allow(e, where, {"kind", "W", "seed"});
            std::string kind = to_string(s.kind);
            r.get(e, where, "kind", kind);
            s.kind = detail::parse_kind(kind, r);
            r.get(e, where, "W", s.W);
            r.get(e, where, "seed", s.seed);
            r.check(s.W >= 0.0, where + ".W must be >= 0");
            c.disorder.push_back(s);
        };
        if (d.is_array())
            for (std::size_t i = 0; i < d.size(); ++i) one(d[i], "disorder[" + std::to_string(i) + "]");
        else one(d, "disorder");
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        SweepAxis ax;
        r.allow(s, "sweep", {"parameter", "start", "stop", "steps", "quantities"});
        r.get(s, "sweep", "parameter", ax.parameter);
        r.get(s, "sweep", "start", ax.start);
        r.get(s, "sweep", "stop", ax.stop);
        r.get(s, "sweep", "steps", ax.steps);
        r.get(s, "sweep", "quantities", ax.quantities);
        r.check(ax.steps >= 1, "sweep.steps must be >= 1");
        static const std::set<std::string> params{"lattice.J", "lattice.K", "lattice.G", "lattice.theta",
                                                  "spins.omega0", "spins.g_eff"};
        r.check(params.count(ax.parameter) > 0, "sweep.parameter '" + ax.parameter + "' is not a sweepable field");
        for (const auto& q : ax.quantities)
            r.check(detail::sweep_quantities().count(q) > 0, "sweep quantity '" + q + "' is unknown");
        c.sweep = ax;
    }
    if (j.contains("options")) {
        const auto& o = j["options"];
        auto& t = c.options;
        r.allow(o, "options", {"k_points", "points", "omega_min", "omega_max", "x_max", "pv_points", "finite", "E_BS",
                               "dx_max", "t_end_tau", "t_points", "t_end", "initial_spin", "initial_state", "realizations"});
        r.get(o, "options", "k_points", t.k_points);
        r.get(o, "options", "points", t.points);
        r.get(o, "options", "omega_min", t.omega_min);
        r.get(o, "options", "omega_max", t.omega_max);
        r.get(o, "options", "x_max", t.x_max);
        r.get(o, "options", "pv_points", t.pv_points);
        r.get(o, "options", "finite", t.finite);
        r.get(o, "options", "E_BS", t.E_BS);
        r.get(o, "options", "dx_max", t.dx_max);
        r.get(o, "options", "t_end_tau", t.t_end_tau);
        r.get(o, "options", "t_points", t.t_points);
        r.get(o, "options", "t_end", t.t_end);
        r.get(o, "options", "initial_spin", t.initial_spin);
        r.get(o, "options", "initial_state", t.initial_state);
        r.get(o, "options", "realizations", t.realizations);
    }
    const auto& t = c.options;
    r.check(t.k_points >= 2, "options.k_points must be >= 2");
    r.check(t.points >= 1, "options.points must be >= 1");
    r.check(t.x_max >= 0, "options.x_max must be >= 0");
    r.check(t.pv_points >= 2, "options.pv_points must be >= 2");
    r.check(t.dx_max >= 1, "options.dx_max must be >= 1");
    r.check(t.t_end_tau > 0.0, "options.t_end_tau must be > 0");
    r.check(t.t_points >= 2, "options.t_points must be >= 2");
    r.check(!t.t_end || *t.t_end > 0.0, "options.t_end must be > 0");
    r.check(t.realizations >= 1, "options.realizations must be >= 1");
    r.check(!t.initial_state || (!t.initial_state->empty() &&
                                 t.initial_state->find_first_not_of("ge") == std::string::npos),
            "options.initial_state must be a string of 'g' and 'e'");

    r.get(j, "", "output_path", c.output_path);
    r.get(j, "", "seed", c.seed);
    r.get(j, "", "threads", c.threads);
    r.check(c.threads >= 0, "threads must be >= 0");

    if (!r.errors.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < r.errors.size(); ++i) msg += (i ? "; " : "") + r.errors[i];
        fail(ErrorKind::ValidationError, msg);
    }
    return c;
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
        const auto line = 1 + std::count(upto.begin(), upto.end(), '\n');
        fail(ErrorKind::ParseError, origin + ":" + std::to_string(line) + ": " + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

// Value text of a flag override: JSON literal, a number with a trailing "pi", or a bare string.
inline json parse_override_value(const std::string& v) {
    if (v.size() >= 2 && v.substr(v.size() - 2) == "pi") {
        const std::string head = v.substr(0, v.size() - 2);
        try {
            std::size_t used = 0;
            const double x = head.empty() ? 1.0 : std::stod(head, &used);
            if (head.empty() || used == head.size()) return x * pi;
        } catch (const std::exception&) {
        }
    }
    try {
        return json::parse(v);
    } catch (const json::exception&) {
        return v;
    }
}

inline void apply_override(json& j, const std::string& path, const json& value) {
    if (!j.is_object()) j = json::object();
    json* cur = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) fail(ErrorKind::ValidationError, "malformed override path '" + path + "'");
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        if (!cur->contains(key) || !(*cur)[key].is_object()) (*cur)[key] = json::object();
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

// "--lattice.theta=1.1pi" style overrides, applied in order.
inline RunConfig parse_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides = {}) {
    json j = path ? read_json_file(*path) : json::object();
    for (const auto& o : overrides) {
        auto s = o;
        while (!s.empty() && s.front() == '-') s.erase(s.begin());
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(ErrorKind::ParseError, "override '" + o + "' needs the form --key.path=value");
        apply_override(j, s.substr(0, eq), parse_override_value(s.substr(eq + 1)));
    }
    return from_json(j);
}

} // namespace somc
