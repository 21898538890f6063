// spins.hpp — bound-state mediated spin Hamiltonians and SiV parameter estimators

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "somc/boundstate.hpp"
#include "somc/error.hpp"
#include "somc/model.hpp"

namespace somc {

// g(i, j) for i < j is the amplitude of sigma_+^j sigma_-^i; the lower triangle is unused.
struct SpinCouplingMatrix {
    ComplexMatrix g;
    std::vector<int> positions;

    int size() const { return static_cast<int>(g.rows()); }
};

inline SpinCouplingMatrix effective_couplings(const BoundState& bs, const SpinConfig& spins) {
    const int n = static_cast<int>(spins.positions.size());
    SpinCouplingMatrix out{ComplexMatrix::Zero(n, n), spins.positions};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int dx = spins.positions[j] - spins.positions[i];
            if (!bs.C_b.contains(dx))
                fail(ErrorKind::SeparationOutOfRange, "separation " + std::to_string(dx) + " beyond amplitude table");
            out.g(i, j) = spins.g_eff * bs.C_b.at(dx) / bs.C_e;
        }
    return out;
}

enum class Sector { Full, SingleExcitation };

// Basis of the full space: spin 0 is the most significant bit, 1 = excited.
inline ComplexMatrix build_spin_hamiltonian(const SpinCouplingMatrix& g, int Ns, Sector sector = Sector::Full) {
    if (g.size() != Ns) fail(ErrorKind::DimensionMismatch, "coupling matrix size differs from Ns");
    if (sector == Sector::SingleExcitation) {
        ComplexMatrix H = ComplexMatrix::Zero(Ns, Ns);
        for (int i = 0; i < Ns; ++i)
            for (int j = i + 1; j < Ns; ++j) {
                H(j, i) = g.g(i, j);
                H(i, j) = std::conj(g.g(i, j));
            }
        return H;
    }
    if (Ns > 12) fail(ErrorKind::TooManySpins, std::to_string(Ns) + " spins exceed the full-space limit of 12");
    const int D = 1 << Ns;
    ComplexMatrix H = ComplexMatrix::Zero(D, D);
    auto bit = [Ns](int m) { return 1 << (Ns - 1 - m); };
    for (int i = 0; i < Ns; ++i)
        for (int j = i + 1; j < Ns; ++j) {
            const cd gij = g.g(i, j);
            if (gij == 0.0) continue;
            // sigma_+^j sigma_-^i moves the excitation from i to j
            for (int s = 0; s < D; ++s)
                if ((s & bit(i)) && !(s & bit(j))) {
                    const int t = (s ^ bit(i)) | bit(j);
                    H(t, s) += gij;
                    H(s, t) += std::conj(gij);
                }
        }
    return H;
}

// |g(dx)| / |g(1)| for the mid-gap bound state at E = 0.
inline std::vector<double> coupling_ratios(const LatticeParams& p, double g_eff, const std::vector<int>& separations) {
    const auto bs = bound_amplitudes(p, g_eff, 0.0);
    const double g1 = std::abs(bs.C_b.at(1));
    if (g1 == 0.0) fail(ErrorKind::SingularCoefficient, "nearest-neighbour coupling vanishes");
    std::vector<double> out;
    for (int dx : separations) {
        if (dx <= 0 || dx % 2 == 0) fail(ErrorKind::ValidationError, "separations must be odd positive integers");
        out.push_back(std::abs(bs.C_b.at(dx)) / g1);
    }
    return out;
}

// Physical SiV/cavity inputs in SI units, frequencies as angular frequencies [rad/s].
struct SiVPhysical {
    double Delta_SiV{two_pi * 46e9};  // ground-state spin-orbit splitting
    double omega_B{two_pi * 5e9};     // Zeeman energy
    double Omega{two_pi * 60e6};      // Raman drive amplitude
    double d_strain{two_pi * 1e15};   // strain sensitivity
    double v_sound{1e4};              // [m/s]
    double rho{3500.0};               // [kg/m^3]
    double V_cavity{5e-6 * 1e-7 * 1e-7}; // 5 um x (100 nm)^2 [m^3]
    double xi{1.0};                   // strain distribution factor at the emitter
    double omega_k{two_pi * 46e9};    // phonon frequency
    double kappa_C{two_pi * 20e6};    // optical decay
    double kappa_M{two_pi * 4.6e3};   // mechanical decay
    double Q{1e7};                    // mechanical quality factor
};

inline constexpr double hbar = 1.054571817e-34;
inline constexpr double K_over_2pi_hz = 50e6; // energy unit K / 2pi

struct SiVCouplings {
    double g_k;   // [rad/s]
    double g_eff; // [rad/s]
};

inline double strain_coupling(const SiVPhysical& s) {
    return s.d_strain / s.v_sound * std::sqrt(hbar * s.omega_k / (2.0 * s.rho * s.V_cavity)) * s.xi;
}

inline double raman_coupling(double g_k, double Omega, double detuning) { return g_k * Omega / detuning; }

inline SiVCouplings estimate_siv(const SiVPhysical& s, double omega0) {
    const double det = s.Delta_SiV - omega0;
    if (std::abs(det) < 5.0 * s.Omega || det == 0.0)
        fail(ErrorKind::RamanResonance, "|Delta_SiV - omega0| below 5 Omega");
    const double gk = strain_coupling(s);
    return {gk, raman_coupling(gk, s.Omega, det)};
}

inline double to_units_of_K(double angular) { return angular / (two_pi * K_over_2pi_hz); }

} // namespace somc
