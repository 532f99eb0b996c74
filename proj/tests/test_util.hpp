#pragma once

#include <random>

#include "spintomo/cmat.hpp"
#include "spintomo/states.hpp"

namespace spintomo::testutil {

inline CMat random_cmat(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = cx(g(rng), g(rng));
    }
    return m;
}

inline CMat random_hermitian(std::mt19937_64& rng, int n) {
    CMat g = random_cmat(rng, n, n);
    CMat h = g + g.adjoint();
    return 0.5 * h;
}

inline PureState random_pure(std::mt19937_64& rng, int n_qubits) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cx> amps(std::size_t(1) << n_qubits);
    double n2 = 0.0;
    for (auto& a : amps) {
        a = cx(g(rng), g(rng));
        n2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps) a *= inv;
    return PureState(n_qubits, std::move(amps));
}

inline DensityMatrix random_density(std::mt19937_64& rng, int n_qubits) {
    const int d = 1 << n_qubits;
    CMat g = random_cmat(rng, d, d);
    CMat m = g * g.adjoint();
    const double tr = m.trace().real();
    m *= cx(1.0 / tr);
    return DensityMatrix(n_qubits, std::move(m));
}

inline DensityMatrix random_product_density(std::mt19937_64& rng, int n_qubits) {
    CMat m = random_density(rng, 1).matrix;
    for (int k = 1; k < n_qubits; ++k) m = kron(m, random_density(rng, 1).matrix);
    return DensityMatrix(n_qubits, std::move(m));
}

}  // namespace spintomo::testutil
