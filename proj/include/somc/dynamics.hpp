// dynamics.hpp — driven chiral master equation, dark-state targets, single-excitation dynamics

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "somc/error.hpp"
#include "somc/model.hpp"

namespace somc {

// Spin register: spin 0 is the most significant bit, bit value 1 = excited. Spins are
// indexed along the propagation direction of the gamma1 channel, so spin i drives
// spin j > i through gamma1 and j < i through gamma2.
struct DriveConfig {
    double nu{0.0};            // common drive frequency, documentation only
    std::vector<cd> Omega;     // per-spin amplitudes [gamma1]
    std::vector<double> delta; // per-spin detunings omega_0j - nu [gamma1]
};

struct ChiralBathConfig {
    double gamma1{1.0};
    double gamma2{0.02};
    double eta1{0.0};
    double eta2{0.0};
    double g_s{0.0};     // band-edge nearest-neighbour exchange
    double gamma_s{0.0}; // dephasing
    int N_p{0};          // traversed cavities, documentation only
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> rho;  // kept only when requested
    std::vector<ComplexVector> psi;  // kept only when requested
    std::vector<double> trace_err;   // |Tr rho - 1| or |norm - 1|
    std::vector<double> fidelity;    // against the supplied target, if any
    std::vector<double> concurrence; // reduced pair (0, 1), master equation only
    std::vector<double> min_eigenvalue;
    std::vector<std::vector<double>> populations;
};

namespace ops {

inline ComplexMatrix sigma_minus(int m, int n) {
    const int D = 1 << n, b = 1 << (n - 1 - m);
    ComplexMatrix S = ComplexMatrix::Zero(D, D);
    for (int s = 0; s < D; ++s)
        if (s & b) S(s ^ b, s) = 1.0;
    return S;
}

inline ComplexMatrix sigma_z(int m, int n) {
    const int D = 1 << n, b = 1 << (n - 1 - m);
    ComplexMatrix Z = ComplexMatrix::Zero(D, D);
    for (int s = 0; s < D; ++s) Z(s, s) = (s & b) ? 1.0 : -1.0;
    return Z;
}

inline ComplexVector basis_state(int index, int D) {
    ComplexVector v = ComplexVector::Zero(D);
    v(index) = 1.0;
    return v;
}

// Index of the product state with the listed spins excited.
inline int excited_index(const std::vector<int>& excited, int n) {
    int s = 0;
    for (int m : excited) s |= 1 << (n - 1 - m);
    return s;
}

inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

} // namespace ops

inline int register_size(const ComplexMatrix& rho) {
    int n = 0;
    while ((1 << n) < rho.rows()) ++n;
    if ((1 << n) != rho.rows() || rho.rows() != rho.cols())
        fail(ErrorKind::DimensionMismatch, "density matrix is not 2^n x 2^n");
    return n;
}

// rhs = A rho + rho A^dag + sum_k c_k L_k rho R_k
class ChiralMasterEquation {
public:
    ChiralMasterEquation(int n, const DriveConfig& drive, const ChiralBathConfig& bath) : n_(n) {
        if (static_cast<int>(drive.Omega.size()) != n || static_cast<int>(drive.delta.size()) != n)
            fail(ErrorKind::DimensionMismatch, "drive arrays must have one entry per spin");
        const int D = 1 << n;
        std::vector<ComplexMatrix> S, Z;
        for (int m = 0; m < n; ++m) {
            S.push_back(ops::sigma_minus(m, n));
            Z.push_back(ops::sigma_z(m, n));
        }
        H_ = ComplexMatrix::Zero(D, D);
        for (int m = 0; m < n; ++m)
            H_ += -0.5 * drive.delta[m] * Z[m] + drive.Omega[m] * S[m] + std::conj(drive.Omega[m]) * S[m].adjoint();
        for (int m = 0; m + 1 < n; ++m) {
            const ComplexMatrix x = S[m] * S[m + 1].adjoint();
            H_ += bath.g_s * (x + x.adjoint());
        }
        A_ = cd(0.0, -1.0) * H_;
        auto dissipator = [&](const ComplexMatrix& O, double r) {
            if (r == 0.0) return;
            A_ -= 0.5 * r * O.adjoint() * O;
            terms_.push_back({r, O, O.adjoint()});
        };
        // r ([a rho, b^dag] + [b, rho a^dag]) with a upstream, b downstream
        auto cascade = [&](const ComplexMatrix& a, const ComplexMatrix& b, double r) {
            if (r == 0.0) return;
            A_ -= r * b.adjoint() * a;
            terms_.push_back({r, a, b.adjoint()});
            terms_.push_back({r, b, a.adjoint()});
        };
        for (int m = 0; m < n; ++m) {
            dissipator(S[m], bath.gamma1 + bath.gamma2);
            dissipator(Z[m], bath.gamma_s);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i < j) cascade(S[i], S[j], bath.gamma1 * (1.0 - bath.eta1));
                if (i > j) cascade(S[i], S[j], bath.gamma2 * (1.0 - bath.eta2));
            }
        rate_max_ = std::max({bath.gamma1 + bath.gamma2, bath.gamma_s, std::abs(bath.gamma1 * (1.0 - bath.eta1)),
                              std::abs(bath.gamma2 * (1.0 - bath.eta2))});
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H_, Eigen::EigenvaluesOnly);
        hnorm_ = es.eigenvalues().cwiseAbs().maxCoeff();
    }

    int spins() const { return n_; }
    const ComplexMatrix& hamiltonian() const { return H_; }
    double rate_max() const { return rate_max_; }
    double hamiltonian_norm() const { return hnorm_; }

    ComplexMatrix rhs(const ComplexMatrix& rho) const {
        ComplexMatrix out = A_ * rho;
        out += out.adjoint().eval(); // rho A^dag, since rho is Hermitian
        for (const auto& t : terms_) out.noalias() += t.c * (t.L * rho * t.R);
        return out;
    }

    // Column-major vectorization: vec(L X R) = (R^T kron L) vec(X).
    ComplexMatrix superoperator() const {
        const int D = 1 << n_;
        const ComplexMatrix I = ComplexMatrix::Identity(D, D);
        ComplexMatrix L = ops::kron(I, A_) + ops::kron(A_.conjugate(), I);
        for (const auto& t : terms_) L += t.c * ops::kron(t.R.transpose(), t.L);
        return L;
    }

private:
    struct Term {
        double c;
        ComplexMatrix L, R;
    };
    int n_;
    ComplexMatrix H_, A_;
    std::vector<Term> terms_;
    double rate_max_{0.0};
    double hnorm_{0.0};
};

inline ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const DriveConfig& drive, const ChiralBathConfig& bath) {
    const int n = register_size(rho);
    return ChiralMasterEquation(n, drive, bath).rhs(rho);
}

inline double fidelity(const ComplexMatrix& rho, const ComplexVector& psi) {
    if (rho.rows() != psi.size()) fail(ErrorKind::DimensionMismatch, "state dimensions differ");
    return std::clamp((psi.adjoint() * rho * psi)(0, 0).real(), 0.0, 1.0);
}

inline double fidelity(const ComplexVector& phi, const ComplexVector& psi) {
    if (phi.size() != psi.size()) fail(ErrorKind::DimensionMismatch, "state dimensions differ");
    return std::clamp(std::norm(psi.dot(phi)), 0.0, 1.0);
}

// Reduced state of spins (i, j), keeping i as the more significant qubit.
inline ComplexMatrix reduced_pair(const ComplexMatrix& rho, int i, int j) {
    const int n = register_size(rho);
    if (n == 2 && i == 0 && j == 1) return rho;
    const int D = 1 << n;
    const int bi = 1 << (n - 1 - i), bj = 1 << (n - 1 - j);
    ComplexMatrix r = ComplexMatrix::Zero(4, 4);
    auto sub = [&](int s) { return ((s & bi) ? 2 : 0) + ((s & bj) ? 1 : 0); };
    for (int s = 0; s < D; ++s)
        for (int t = 0; t < D; ++t)
            if ((s & ~(bi | bj)) == (t & ~(bi | bj))) r(sub(s), sub(t)) += rho(s, t);
    return r;
}

inline double concurrence(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) fail(ErrorKind::DimensionMismatch, "concurrence needs a two-qubit state");
    ComplexMatrix yy = ComplexMatrix::Zero(4, 4);
    yy(0, 3) = -1.0; yy(1, 2) = 1.0; yy(2, 1) = 1.0; yy(3, 0) = -1.0;
    const ComplexMatrix h = 0.5 * (rho + rho.adjoint());
    const ComplexMatrix tilde = yy * h.conjugate() * yy;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const ComplexMatrix sq = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es2(sq * tilde * sq, Eigen::EigenvaluesOnly);
    Eigen::VectorXd lam = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(lam.data(), lam.data() + 4, std::greater<double>());
    return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

inline ComplexVector dimer_target(double Omega0, double delta1, double gamma1, double gamma2) {
    const cd den(2.0 * delta1, gamma1 - gamma2);
    if (std::abs(den) == 0.0) fail(ErrorKind::SingularCoefficient, "dimer coefficient diverges");
    const cd alpha = 2.0 * std::sqrt(2.0) * Omega0 / den;
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = 1.0;
    v(2) = alpha / std::sqrt(2.0); // |eg>
    v(1) = -alpha / std::sqrt(2.0); // |ge>
    return v / v.norm();
}

inline ComplexVector product_state(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector v(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
    return v;
}

struct TetramerCoefficients {
    cd a12, a34, a13, a1324, a1234;
};

inline TetramerCoefficients tetramer_coefficients(double O, double d1, double d2, double g1, double g2) {
    const cd Z(0.0, -(g1 - g2) / 2.0);
    const cd z1 = Z - d1, z2 = Z - d2, z12 = 2.0 * Z - d1 - d2;
    if (std::abs(z1) == 0.0 || std::abs(z2) == 0.0 || std::abs(z12) == 0.0)
        fail(ErrorKind::SingularCoefficient, "tetramer coefficients diverge");
    const double r2 = std::sqrt(2.0);
    TetramerCoefficients c;
    c.a12 = -O * (2.0 * Z * Z + 2.0 * d1 * d2 - (Z + d1) * (d1 + d2)) / (r2 * z1 * z1 * z2);
    // the (2Z - d1 + d2) numerator is what makes the state dark
    c.a34 = -O * (2.0 * Z - d1 + d2) / (r2 * z1 * z2);
    c.a13 = O * (d1 + d2) / (2.0 * r2 * z1 * z2);
    c.a1324 = -2.0 * r2 * O * c.a13 / z12;
    c.a1234 = O * O * (d1 + d2 - 4.0 * Z) / (z1 * z2 * (d1 + d2 - 2.0 * Z));
    return c;
}

// Dark state for the detuning profile (d1, d2, -d1, -d2).
inline ComplexVector tetramer_target(double Omega0, double delta1, double delta2, double gamma1, double gamma2) {
    const auto c = tetramer_coefficients(Omega0, delta1, delta2, gamma1, gamma2);
    const int n = 4;
    auto e = [&](std::vector<int> ex) { return ops::basis_state(ops::excited_index(ex, n), 16); };
    auto S = [&](int i, int j) -> ComplexVector { return (e({i}) - e({j})) / std::sqrt(2.0); };
    auto SS = [&](int i, int j, int k, int l) -> ComplexVector {
        return 0.5 * (e({i, k}) - e({i, l}) - e({j, k}) + e({j, l}));
    };
    ComplexVector v = e({});
    v += c.a12 * S(0, 1) + c.a34 * S(2, 3);
    v += c.a13 * (S(0, 2) + S(0, 3) + S(1, 2) + S(1, 3));
    v += c.a1234 * SS(0, 1, 2, 3) + c.a1324 * (SS(0, 2, 1, 3) + SS(0, 3, 1, 2));
    return v / v.norm();
}

inline double steady_time(double Omega0, double delta1, double gamma1, double gamma2) {
    const double q = 0.25 * (gamma1 - gamma2) * (gamma1 - gamma2) + delta1 * delta1;
    const double den = (gamma1 + gamma2) * q;
    if (den == 0.0) fail(ErrorKind::SingularCoefficient, "steady_time denominator vanishes");
    return pi * (q + 2.0 * Omega0 * Omega0) / den;
}

inline ComplexMatrix steady_state(const ChiralMasterEquation& me) {
    const int D = 1 << me.spins();
    ComplexMatrix L = me.superoperator();
    for (int c = 0; c < D * D; ++c) L(0, c) = 0.0;
    for (int i = 0; i < D; ++i) L(0, i + i * D) = 1.0;
    ComplexVector rhs = ComplexVector::Zero(D * D);
    rhs(0) = 1.0;
    const ComplexVector x = L.partialPivLu().solve(rhs);
    ComplexMatrix rho = Eigen::Map<const ComplexMatrix>(x.data(), D, D);
    return 0.5 * (rho + rho.adjoint());
}

inline ComplexMatrix steady_state(int n, const DriveConfig& drive, const ChiralBathConfig& bath) {
    return steady_state(ChiralMasterEquation(n, drive, bath));
}

struct MasterOptions {
    std::optional<ComplexVector> target;
    bool store_states{false};
    bool positivity{true};
};

inline double step_size(double rate, double hnorm) {
    double h = INFINITY;
    if (rate > 0.0) h = std::min(h, 0.01 / rate);
    if (hnorm > 0.0) h = std::min(h, 0.01 / hnorm);
    return h;
}

inline void check_grid(const std::vector<double>& t) {
    if (t.empty() || t.front() != 0.0) fail(ErrorKind::ValidationError, "time grid must start at 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) fail(ErrorKind::ValidationError, "time grid must be strictly increasing");
}

inline Trajectory evolve_master(const ChiralMasterEquation& me, const ComplexMatrix& rho0,
                                const std::vector<double>& t_grid, const MasterOptions& opt = {}) {
    check_grid(t_grid);
    if (rho0.rows() != (1 << me.spins())) fail(ErrorKind::DimensionMismatch, "rho0 does not match the register");
    const double h = step_size(me.rate_max(), me.hamiltonian_norm());
    Trajectory tr;
    ComplexMatrix rho = rho0;
    auto record = [&](double t) {
        tr.times.push_back(t);
        const double err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        if (err > 1e-6) fail(ErrorKind::StepSizeTooLarge, "trace drift " + std::to_string(err));
        tr.trace_err.push_back(err);
        if (opt.target) tr.fidelity.push_back(fidelity(rho, *opt.target));
        if (me.spins() >= 2) tr.concurrence.push_back(concurrence(reduced_pair(rho, 0, 1)));
        std::vector<double> pops(me.spins(), 0.0);
        for (int s = 0; s < rho.rows(); ++s)
            for (int m = 0; m < me.spins(); ++m)
                if (s & (1 << (me.spins() - 1 - m))) pops[m] += rho(s, s).real();
        tr.populations.push_back(pops);
        if (opt.positivity) {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
            tr.min_eigenvalue.push_back(es.eigenvalues()(0));
        }
        if (opt.store_states) tr.rho.push_back(rho);
    };
    record(t_grid[0]);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double dt = t_grid[k] - t_grid[k - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(dt / h)));
        const double hh = dt / steps;
        for (int s = 0; s < steps; ++s) {
            const ComplexMatrix k1 = me.rhs(rho);
            const ComplexMatrix k2 = me.rhs(rho + 0.5 * hh * k1);
            const ComplexMatrix k3 = me.rhs(rho + 0.5 * hh * k2);
            const ComplexMatrix k4 = me.rhs(rho + hh * k3);
            rho += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rho = 0.5 * (rho + rho.adjoint()).eval();
        }
        record(t_grid[k]);
    }
    return tr;
}

inline Trajectory evolve_master(const ComplexMatrix& rho0, const DriveConfig& drive, const ChiralBathConfig& bath,
                                const std::vector<double>& t_grid, const MasterOptions& opt = {}) {
    return evolve_master(ChiralMasterEquation(register_size(rho0), drive, bath), rho0, t_grid, opt);
}

inline std::vector<double> linear_grid(double t_end, int points) {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = t_end * i / (points - 1);
    return t;
}

struct SchrodingerOptions {
    std::vector<int> observe; // components whose populations are recorded; empty = all
    bool store_states{false};
};

// RK4 for i dpsi/dt = H psi with h = 0.01 / ||H||.
inline Trajectory evolve_schrodinger(const Eigen::SparseMatrix<cd>& H, const ComplexVector& psi0,
                                     const std::vector<double>& t_grid, double hnorm,
                                     const SchrodingerOptions& opt = {}) {
    check_grid(t_grid);
    if (H.rows() != psi0.size()) fail(ErrorKind::DimensionMismatch, "psi0 does not match H");
    const double h = step_size(0.0, hnorm);
    const cd mi(0.0, -1.0);
    std::vector<int> obs = opt.observe;
    if (obs.empty())
        for (int i = 0; i < psi0.size(); ++i) obs.push_back(i);
    const double n0 = psi0.norm();

    Trajectory tr;
    ComplexVector psi = psi0, k1, k2, k3, k4, tmp;
    auto record = [&](double t) {
        tr.times.push_back(t);
        const double err = std::abs(psi.norm() - n0);
        if (err > 1e-6) fail(ErrorKind::StepSizeTooLarge, "norm drift " + std::to_string(err));
        tr.trace_err.push_back(err);
        std::vector<double> pops;
        for (int i : obs) pops.push_back(std::norm(psi(i)));
        tr.populations.push_back(pops);
        if (opt.store_states) tr.psi.push_back(psi);
    };
    record(t_grid[0]);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double dt = t_grid[k] - t_grid[k - 1];
        const long steps = std::max(1L, static_cast<long>(std::ceil(dt / h)));
        const double hh = dt / steps;
        for (long s = 0; s < steps; ++s) {
            k1.noalias() = mi * (H * psi);
            tmp = psi + 0.5 * hh * k1;
            k2.noalias() = mi * (H * tmp);
            tmp = psi + 0.5 * hh * k2;
            k3.noalias() = mi * (H * tmp);
            tmp = psi + hh * k3;
            k4.noalias() = mi * (H * tmp);
            psi += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        record(t_grid[k]);
    }
    return tr;
}

inline double spectral_norm(const ComplexMatrix& H) {
    if (H.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Trajectory evolve_single_excitation(const ComplexMatrix& H, const ComplexVector& psi0,
                                           const std::vector<double>& t_grid, const SchrodingerOptions& opt = {}) {
    const Eigen::SparseMatrix<cd> S = H.sparseView();
    return evolve_schrodinger(S, psi0, t_grid, spectral_norm(H), opt);
}

inline Trajectory evolve_effective(const ComplexMatrix& H_s, const ComplexVector& psi0,
                                   const std::vector<double>& t_grid, const SchrodingerOptions& opt = {}) {
    return evolve_single_excitation(H_s, psi0, t_grid, opt);
}

// Exact propagation through the eigenbasis; reference for the integrators.
inline Trajectory propagate_exact(const ComplexMatrix& H, const ComplexVector& psi0, const std::vector<double>& t_grid,
                                  const SchrodingerOptions& opt = {}) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    const ComplexVector c0 = es.eigenvectors().adjoint() * psi0;
    std::vector<int> obs = opt.observe;
    if (obs.empty())
        for (int i = 0; i < psi0.size(); ++i) obs.push_back(i);
    Trajectory tr;
    for (double t : t_grid) {
        ComplexVector c = c0;
        for (int i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -es.eigenvalues()(i) * t);
        const ComplexVector psi = es.eigenvectors() * c;
        tr.times.push_back(t);
        tr.trace_err.push_back(std::abs(psi.norm() - psi0.norm()));
        std::vector<double> pops;
        for (int i : obs) pops.push_back(std::norm(psi(i)));
        tr.populations.push_back(pops);
        if (opt.store_states) tr.psi.push_back(psi);
    }
    return tr;
}

inline double max_population_deviation(const Trajectory& a, const Trajectory& b) {
    if (a.populations.size() != b.populations.size()) fail(ErrorKind::DimensionMismatch, "trajectory lengths differ");
    double d = 0.0;
    for (std::size_t t = 0; t < a.populations.size(); ++t) {
        if (a.populations[t].size() != b.populations[t].size())
            fail(ErrorKind::DimensionMismatch, "observed components differ");
        for (std::size_t m = 0; m < a.populations[t].size(); ++m)
            d = std::max(d, std::abs(a.populations[t][m] - b.populations[t][m]));
    }
    return d;
}

} // namespace somc
