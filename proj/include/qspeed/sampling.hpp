#pragma once

// Random density matrices rho = U diag(p) U^† with p uniform on the
// probability simplex and U Haar-distributed.
//
// Stream layout: a SamplerConfig with seed s produces n_diag spectra. Spectrum
// k is drawn from its own engine derive_stream(s, k), and the n_unitary
// unitaries that rotate it are drawn from the same engine right after it.
// Draw n of the full stream is therefore (spectrum n / n_unitary, unitary
// n % n_unitary), independent of how spectra are split across workers.

#include <Eigen/QR>

#include <cstdint>
#include <random>
#include <vector>

#include "qspeed/linalg.hpp"

namespace qspeed {

using Engine = std::mt19937_64;

/// Independent engine for (seed, stream index).
inline Engine derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x71u};
    return Engine(seq);
}

/// Uniform point on the (d-1)-simplex, as normalized unit-rate exponentials.
inline RealVector sample_simplex(Index d, Engine& rng) {
    if (d < 1) throw Error(ErrorCode::DimensionMismatch, "sample_simplex: dimension must be positive");
    std::exponential_distribution<double> exp1(1.0);
    RealVector p(d);
    for (Index k = 0; k < d; ++k) p(k) = exp1(rng);
    return p / p.sum();
}

/// Haar unitary: QR of a complex Ginibre matrix with the phases of R's
/// diagonal moved into Q. Without that phase fix the result is not Haar.
inline Matrix sample_haar_unitary(Index d, Engine& rng) {
    if (d < 1) throw Error(ErrorCode::DimensionMismatch, "sample_haar_unitary: dimension must be positive");
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    Matrix z(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix& r = qr.matrixQR();
    for (Index k = 0; k < d; ++k) {
        const Complex rkk = r(k, k);
        const double a = std::abs(rkk);
        q.col(k) *= a > 0.0 ? rkk / a : Complex(1.0, 0.0);
    }
    return q;
}

inline DensityMatrix rotate_spectrum(const RealVector& p, const Matrix& u) {
    const Matrix rho = u * p.cast<Complex>().asDiagonal() * u.adjoint();
    return validate_density(hermitian_part(rho));
}

inline DensityMatrix sample_density(Index d, Engine& rng) {
    const RealVector p = sample_simplex(d, rng);
    const Matrix u = sample_haar_unitary(d, rng);
    return rotate_spectrum(p, u);
}

struct SamplerConfig {
    Index dim = 4;
    std::uint64_t seed = 42;
    std::uint64_t n_diag = 1000;
    std::uint64_t n_unitary = 100;

    std::uint64_t total() const { return n_diag * n_unitary; }

    void validate() const {
        if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "SamplerConfig: dim must be positive");
        if (n_diag < 1 || n_unitary < 1) throw Error(ErrorCode::OutOfRange, "SamplerConfig: n_diag and n_unitary must be >= 1");
    }
};

/// The n_unitary states sharing spectrum `spectrum_index`.
inline std::vector<DensityMatrix> sample_spectrum_batch(const SamplerConfig& cfg, std::uint64_t spectrum_index) {
    cfg.validate();
    Engine rng = derive_stream(cfg.seed, spectrum_index);
    const RealVector p = sample_simplex(cfg.dim, rng);
    std::vector<DensityMatrix> out;
    out.reserve(cfg.n_unitary);
    for (std::uint64_t u = 0; u < cfg.n_unitary; ++u) out.push_back(rotate_spectrum(p, sample_haar_unitary(cfg.dim, rng)));
    return out;
}

}  // namespace qspeed
