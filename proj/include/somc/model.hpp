// model.hpp — parameter records and Hamiltonian builders for the spin–optomechanical lattice

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "somc/error.hpp"

namespace somc {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double pi = M_PI;
inline constexpr double two_pi = 2.0 * M_PI;

enum class Boundary { Periodic, Open };

// Laser-drive bookkeeping. Not used by any band computation: everything runs in the
// rotating frame with Delta ~ omega_M as the zero of energy.
struct DriveDocumentation {
    std::optional<double> g0;      // single-photon optomechanical coupling
    std::optional<double> alpha;   // coherent cavity amplitude, G = g0 * alpha
    std::optional<double> omega_L; // laser frequency
    std::optional<double> omega_c; // cavity frequency, Delta = omega_c - omega_L
    std::optional<double> omega_M; // mechanical frequency
};

struct LatticeParams {
    double J{20.0};       // photon hopping [K]
    double K{1.0};        // phonon hopping, the energy unit
    double G{2.0};        // linearized optomechanical coupling [K]
    double theta{pi};     // laser phase gradient [rad]
    int N{41};            // number of cells
    Boundary boundary{Boundary::Open};
    DriveDocumentation drive{};
};

struct SpinConfig {
    double omega0{0.0};          // spin frequency relative to the band reference [K]
    double g_eff{0.08};          // spin-phonon coupling [K]
    std::vector<int> positions{0}; // cell labels x_m
    double gamma_s{0.0};         // pure dephasing [K]
};

// Random terms added to the clean lattice. Empty vectors mean no disorder of that kind.
// Hop entry n couples cells n and n+1; the last entry of a periodic ring wraps N-1 -> 0.
struct DisorderRealization {
    int N{0};
    std::vector<double> onsite_photon;
    std::vector<double> onsite_phonon;
    std::vector<double> hop_photon;
    std::vector<double> hop_phonon;
};

inline double normalize_angle(double t) {
    double r = std::fmod(t, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

inline std::vector<std::string> validation_errors(const LatticeParams& p) {
    std::vector<std::string> errs;
    if (!(p.J > 0.0)) errs.push_back("lattice.J must be > 0");
    if (!(p.K > 0.0)) errs.push_back("lattice.K must be > 0");
    if (!(p.G >= 0.0)) errs.push_back("lattice.G must be >= 0");
    if (!std::isfinite(p.theta)) errs.push_back("lattice.theta must be finite");
    if (p.N < 2) errs.push_back("lattice.N must be >= 2");
    return errs;
}

inline void validate(const LatticeParams& p) {
    auto errs = validation_errors(p);
    if (!errs.empty()) fail(ErrorKind::ValidationError, errs.front());
}

// Cell labels run from first_cell(N) to first_cell(N) + N - 1, centered on 0.
inline int first_cell(int N) { return -(N - 1) / 2; }

struct Layout {
    int cells{0};
    int spins{0};
    int first{0};

    int dim() const { return 2 * cells + spins; }
    int photon(int label) const { return label - first; }
    int phonon(int label) const { return cells + label - first; }
    int spin(int m) const { return 2 * cells + m; }
    bool contains(int label) const { return label >= first && label < first + cells; }
};

inline Layout layout(const LatticeParams& p, const SpinConfig& s) {
    return {p.N, static_cast<int>(s.positions.size()), first_cell(p.N)};
}

inline Eigen::Matrix2cd build_bloch(const LatticeParams& p, double k) {
    Eigen::Matrix2cd h;
    h << -2.0 * p.J * std::cos(k - p.theta), -p.G,
         -p.G, -2.0 * p.K * std::cos(k);
    return h;
}

inline ComplexMatrix build_realspace(const LatticeParams& p, const SpinConfig& s,
                                     const std::optional<DisorderRealization>& disorder = std::nullopt) {
    validate(p);
    const Layout L = layout(p, s);
    const int N = p.N;
    const bool ring = p.boundary == Boundary::Periodic;
    const int bonds = ring ? N : N - 1;

    auto check_len = [&](const std::vector<double>& v, int want, const char* what) {
        if (!v.empty() && static_cast<int>(v.size()) != want)
            fail(ErrorKind::DimensionMismatch, std::string(what) + " has " + std::to_string(v.size()) +
                                                   " entries, expected " + std::to_string(want));
    };
    if (disorder) {
        if (disorder->N != N)
            fail(ErrorKind::DimensionMismatch, "disorder realization built for N=" + std::to_string(disorder->N));
        check_len(disorder->onsite_photon, N, "onsite_photon");
        check_len(disorder->onsite_phonon, N, "onsite_phonon");
        check_len(disorder->hop_photon, bonds, "hop_photon");
        check_len(disorder->hop_phonon, bonds, "hop_phonon");
    }
    for (std::size_t m = 0; m < s.positions.size(); ++m) {
        if (!L.contains(s.positions[m]))
            fail(ErrorKind::PositionOutOfRange, "spin " + std::to_string(m) + " at cell " +
                                                    std::to_string(s.positions[m]) + " outside lattice");
        for (std::size_t q = 0; q < m; ++q)
            if (s.positions[q] == s.positions[m])
                fail(ErrorKind::PositionOutOfRange, "two spins share cell " + std::to_string(s.positions[m]));
    }

    auto entry = [](const std::vector<double>& v, int i) { return v.empty() ? 0.0 : v[i]; };

    ComplexMatrix H = ComplexMatrix::Zero(L.dim(), L.dim());
    for (int b = 0; b < bonds; ++b) {
        const int i = b, j = (b + 1) % N;
        const double tj = -p.J + (disorder ? entry(disorder->hop_photon, b) : 0.0);
        const double tk = -p.K + (disorder ? entry(disorder->hop_phonon, b) : 0.0);
        // a two-cell ring has both bonds on the same pair, so accumulate
        H(i, j) += tj;
        H(j, i) += tj;
        H(N + i, N + j) += tk;
        H(N + j, N + i) += tk;
    }
    for (int i = 0; i < N; ++i) {
        const int n = L.first + i;
        const cd c = -p.G * std::polar(1.0, -n * p.theta); // -G e^{-in theta} a_n^dag b_n
        H(i, N + i) = c;
        H(N + i, i) = std::conj(c);
        if (disorder) {
            H(i, i) += entry(disorder->onsite_photon, i);
            H(N + i, N + i) += entry(disorder->onsite_phonon, i);
        }
    }
    for (int m = 0; m < L.spins; ++m) {
        const int si = L.spin(m);
        H(si, si) = s.omega0;
        H(si, L.phonon(s.positions[m])) = s.g_eff;
        H(L.phonon(s.positions[m]), si) = s.g_eff;
    }
    return H;
}

inline double hermiticity_residual(const ComplexMatrix& M) {
    if (M.size() == 0) return 0.0;
    return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace somc
