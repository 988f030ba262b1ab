#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qspeed/qspeed.hpp"

namespace qspeed::test {

inline Hamiltonian preset(double omega23) {
    const double w14 = std::sqrt(2.0);
    return Hamiltonian({0.0, 0.5 * (w14 - omega23), 0.5 * (w14 + omega23), w14});
}
inline Hamiltonian gamma_lt2() { return preset(2.0 / std::sqrt(3.0)); }  // gamma1 = 3/2
inline Hamiltonian gamma_ge2() { return preset(2.0 / std::sqrt(5.0)); }  // gamma1 = 5/2

inline Hamiltonian ladder(Index d) {
    std::vector<double> e;
    for (Index k = 0; k < d; ++k) e.push_back(static_cast<double>(k));
    return Hamiltonian(e);
}

/// (|E_1> + e^{-i theta}|E_d>)/sqrt2.
inline ComplexVector psi1(Index d, double theta = 0.0) {
    ComplexVector v = ComplexVector::Zero(d);
    v(0) = 1.0 / std::sqrt(2.0);
    v(d - 1) = std::polar(1.0 / std::sqrt(2.0), -theta);
    return v;
}

inline Matrix random_hermitian(Index d, Engine& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    return hermitian_part(m);
}

inline DensityMatrix random_pure(Index d, Engine& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexVector v(d);
    for (Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
    return projector(v);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Reduced state of one qubit (0 = most significant) of an n-qubit state.
inline Matrix reduce_to_qubit(const Matrix& rho, int n, int q) {
    Matrix r = Matrix::Zero(2, 2);
    const Index dim = Index{1} << n;
    const int shift = n - 1 - q;
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) {
            const Index rest_i = i & ~(Index{1} << shift);
            const Index rest_j = j & ~(Index{1} << shift);
            if (rest_i != rest_j) continue;
            r((i >> shift) & 1, (j >> shift) & 1) += rho(i, j);
        }
    return r;
}

}  // namespace qspeed::test
