#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spintomo/cmat.hpp"

namespace spintomo {

// Basis ordering used throughout: |down> -> index 0, |up> -> index 1,
// leftmost qubit is the most significant index. Tomogram outcome labels
// follow the same order (0 <-> m=-1/2, 1 <-> m=+1/2).

struct PureState {
    int n_qubits = 0;
    std::vector<cx> amplitudes;

    PureState() = default;
    PureState(int n, std::vector<cx> amps) : n_qubits(n), amplitudes(std::move(amps)) { validate(); }

    void validate(double tol = 1e-10) const {
        if (n_qubits < 1) throw std::invalid_argument("PureState: need at least one qubit");
        if (static_cast<int>(amplitudes.size()) != (1 << n_qubits)) {
            throw std::invalid_argument("PureState: amplitude count != 2^n");
        }
        double n2 = 0.0;
        for (const auto& a : amplitudes) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
                throw std::invalid_argument("PureState: non-finite amplitude");
            }
            n2 += std::norm(a);
        }
        if (std::abs(n2 - 1.0) > tol) {
            throw std::invalid_argument("PureState: norm differs from 1 by " + std::to_string(std::abs(n2 - 1.0)));
        }
    }
};

inline cx inner(const PureState& a, const PureState& b) {
    if (a.amplitudes.size() != b.amplitudes.size()) throw std::invalid_argument("inner: size mismatch");
    cx s{};
    for (std::size_t k = 0; k < a.amplitudes.size(); ++k) s += std::conj(a.amplitudes[k]) * b.amplitudes[k];
    return s;
}

inline PureState tensor(const PureState& a, const PureState& b) {
    std::vector<cx> out(a.amplitudes.size() * b.amplitudes.size());
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        for (std::size_t j = 0; j < b.amplitudes.size(); ++j) {
            out[i * b.amplitudes.size() + j] = a.amplitudes[i] * b.amplitudes[j];
        }
    }
    return PureState(a.n_qubits + b.n_qubits, std::move(out));
}

struct DensityMatrix {
    int n_qubits = 0;
    CMat matrix;

    DensityMatrix() = default;
    DensityMatrix(int n, CMat m) : n_qubits(n), matrix(std::move(m)) { validate(); }

    // Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-9
    // (the slack absorbs eigensolver round-off).
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10, double psd_tol = -1e-9) const {
        if (n_qubits < 1) throw std::invalid_argument("DensityMatrix: need at least one qubit");
        const int d = 1 << n_qubits;
        if (matrix.rows() != d || matrix.cols() != d) {
            throw std::invalid_argument("DensityMatrix: dimension != 2^n");
        }
        if (!matrix.all_finite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
        const double asym = matrix.asymmetry_norm();
        if (asym > herm_tol) {
            throw std::invalid_argument("DensityMatrix: not Hermitian (asymmetry " + std::to_string(asym) + ")");
        }
        const double tr_err = std::abs(matrix.trace() - cx(1.0));
        if (tr_err > trace_tol) {
            throw std::invalid_argument("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
        }
        const HermEigen eig = herm_eig(matrix);
        if (eig.eigenvalues.front() < psd_tol) {
            throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(eig.eigenvalues.front()));
        }
    }
};

inline DensityMatrix projector(const PureState& psi) {
    const int d = static_cast<int>(psi.amplitudes.size());
    CMat m(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) = psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
    }
    return DensityMatrix(psi.n_qubits, std::move(m));
}

inline double purity(const DensityMatrix& rho) {
    return (rho.matrix * rho.matrix).trace().real();
}

inline DensityMatrix evolve(const DensityMatrix& rho, const CMat& h, double t) {
    return DensityMatrix(rho.n_qubits, evolve_matrix(rho.matrix, h, t));
}

// |phi+> = (|du> + |ud>)/sqrt(2)
inline PureState bell_phi_plus() {
    const double r = 1.0 / std::sqrt(2.0);
    return PureState(2, {0.0, r, r, 0.0});
}

// |psi+> = (|dd> + |uu>)/sqrt(2)
inline PureState bell_psi_plus() {
    const double r = 1.0 / std::sqrt(2.0);
    return PureState(2, {r, 0.0, 0.0, r});
}

// Tensor power of cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
inline PureState spin_coherent(double theta, double phi, int n_qubits = 2) {
    if (theta < 0.0 || theta > std::numbers::pi) {
        throw std::invalid_argument("spin_coherent: theta must lie in [0, pi]");
    }
    if (phi < 0.0 || phi >= 2.0 * std::numbers::pi) {
        throw std::invalid_argument("spin_coherent: phi must lie in [0, 2*pi)");
    }
    std::vector<cx> q(2);
    q[0] = std::exp(cx(0.0, phi)) * std::sin(theta / 2.0);  // |down>
    q[1] = std::cos(theta / 2.0);                           // |up>
    PureState s(1, q);
    PureState out = s;
    for (int k = 1; k < n_qubits; ++k) out = tensor(out, s);
    return out;
}

// (1-eps)/2^N * I + eps |down...down><down...down|
inline DensityMatrix pseudo_pure(int n_qubits, double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("pseudo_pure: epsilon must lie in [0, 1]");
    const int d = 1 << n_qubits;
    CMat m(d, d);
    const double bg = (1.0 - epsilon) / d;
    for (int i = 0; i < d; ++i) m(i, i) = bg;
    m(0, 0) += epsilon;
    return DensityMatrix(n_qubits, std::move(m));
}

// Closed form for Tr(pseudo_pure^2).
inline double pseudo_pure_purity(int n_qubits, double epsilon) {
    const double d = static_cast<double>(1 << n_qubits);
    return (1.0 - epsilon) * (1.0 - epsilon) / d + epsilon * epsilon + 2.0 * epsilon * (1.0 - epsilon) / d;
}

// sigma_x eigenstates |+> and |->.
inline PureState plus_state() {
    const double r = 1.0 / std::sqrt(2.0);
    return PureState(1, {r, r});
}

inline PureState minus_state() {
    const double r = 1.0 / std::sqrt(2.0);
    return PureState(1, {r, -r});
}

// Initial state of the mediated three-qubit register, qubit order (M, A, B):
// 1/2 |+><+|_M (x) |phi+><phi+|_AB  +  1/2 |-><-|_M (x) |psi+><psi+|_AB.
inline DensityMatrix rho_mab_initial() {
    const CMat mp = projector(plus_state()).matrix;
    const CMat mm = projector(minus_state()).matrix;
    const CMat pphi = projector(bell_phi_plus()).matrix;
    const CMat ppsi = projector(bell_psi_plus()).matrix;
    CMat m = 0.5 * kron(mp, pphi) + 0.5 * kron(mm, ppsi);
    return DensityMatrix(3, std::move(m));
}

}  // namespace spintomo
