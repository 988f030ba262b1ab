#pragma once

// Squared speed of unitary evolution under a time-independent Hamiltonian,
// in three equivalent forms, plus the energy-variance bound, the
// Wigner-Yanase variant and the open-system evaluator.

#include <cmath>
#include <vector>

#include "qspeed/linalg.hpp"

namespace qspeed {

namespace detail {

inline double weighted_offdiag_norm(const RealMatrix& w, const Matrix& m) {
    double s = 0.0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (i != j) s += std::norm(m(i, j)) * w(i, j);
    return s;
}

}  // namespace detail

/// v^2 = sum_{i,j} |rho_ij|^2 omega_ij^2.
inline double squared_speed(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "squared_speed");
    return detail::weighted_offdiag_norm(h.omega_sq(), rho.matrix());
}

/// v^2 = ||[H, rho]||_HS^2.
inline double squared_speed_commutator(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "squared_speed_commutator");
    const Matrix hm = h.matrix();
    const Matrix c = hm * rho.matrix() - rho.matrix() * hm;
    return c.squaredNorm();
}

/// Default step for the finite-difference form: 1e-5 / max omega.
inline double default_bloch_step(const Hamiltonian& h) {
    const double w = h.max_gap();
    return w > 0.0 ? 1e-5 / w : 1e-5;
}

/// v^2 = sum_j (dr_j/dt)^2, the Bloch vector velocity of e^{-iHt} rho e^{iHt}
/// estimated by a central difference at t = 0. Validation path only; its
/// error is O(dt^2 omega^2) relative.
inline double squared_speed_bloch(const Hamiltonian& h, const DensityMatrix& rho, const OrthonormalBasis& basis,
                                  double dt = 0.0) {
    require_same_dim(h, rho, "squared_speed_bloch");
    if (basis.dim() != rho.dim()) throw Error(ErrorCode::DimensionMismatch, "squared_speed_bloch: basis dimension differs");
    if (dt <= 0.0) dt = default_bloch_step(h);
    const Index d = rho.dim();
    auto evolve = [&](double t) {
        ComplexVector phase(d);
        for (Index k = 0; k < d; ++k) phase(k) = std::polar(1.0, -h.energy(k) * t);
        return Matrix(phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal());
    };
    const RealVector forward = bloch_components(evolve(dt), basis);
    const RealVector backward = bloch_components(evolve(-dt), basis);
    return ((forward - backward) / (2.0 * dt)).squaredNorm();
}

/// (Delta H)^2 = sum_{i<j} rho_ii rho_jj omega_ij^2.
inline double energy_variance(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "energy_variance");
    double s = 0.0;
    for (Index i = 0; i < rho.dim(); ++i)
        for (Index j = i + 1; j < rho.dim(); ++j) {
            const double w = h.omega(i, j);
            s += rho(i, i).real() * rho(j, j).real() * w * w;
        }
    return s;
}

struct MuGap {
    double gap = 0.0;  // 2 (Delta H)^2 - v^2
    RealMatrix mu;     // upper triangle: rho_ii rho_jj - |rho_ij|^2, zero elsewhere
};

/// Splits the variance bound into the speed and a nonnegative remainder
/// 2 sum_{i<j} mu_ij omega_ij^2; every mu_ij is a 2×2 principal minor of rho.
inline MuGap mu_gap(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "mu_gap");
    const Index d = rho.dim();
    MuGap out;
    out.mu = RealMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            const double m = rho(i, i).real() * rho(j, j).real() - std::norm(rho(i, j));
            out.mu(i, j) = m;
            const double w = h.omega(i, j);
            out.gap += 2.0 * m * w * w;
        }
    return out;
}

/// Wigner-Yanase squared speed -Tr[H, sqrt(rho)]^2 through a generic
/// eigensolve of rho.
inline double wy_squared_speed(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "wy_squared_speed");
    return detail::weighted_offdiag_norm(h.omega_sq(), matrix_sqrt_psd(rho));
}

/// True when every entry off the main and secondary diagonals vanishes and
/// rho_ij = rho_{d-1-j, d-1-i} (persymmetry), both within `tolerance`.
inline bool is_persymmetric_x(const Matrix& m, double tolerance) {
    const Index d = m.rows();
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (i != j && i + j != d - 1 && std::abs(m(i, j)) > tolerance) return false;
            if (std::abs(m(i, j) - m(d - 1 - j, d - 1 - i)) > tolerance) return false;
        }
    return true;
}

/// Closed-form square root of a persymmetric X-state: each 2×2 block
/// [[a, c], [c*, a]] has eigenvalues a ± |c|, so its root keeps the same shape
/// with diagonal (sqrt(a+|c|) + sqrt(a-|c|))/2 and off-diagonal
/// e^{i arg c}(sqrt(a+|c|) - sqrt(a-|c|))/2.
inline Matrix x_state_sqrt(const Matrix& m) {
    if (!is_persymmetric_x(m, 1e-12)) throw Error(ErrorCode::NotApplicable, "x_state_sqrt: input is not a persymmetric X-state");
    const Index d = m.rows();
    Matrix s = Matrix::Zero(d, d);
    for (Index i = 0; i < d / 2; ++i) {
        const Index j = d - 1 - i;
        const double a = m(i, i).real();
        const Complex c = m(i, j);
        const double lp = a + std::abs(c);
        const double lm = a - std::abs(c);
        if (lm < -tol::psd) throw Error(ErrorCode::NotPSD, "x_state_sqrt: negative block eigenvalue", lm);
        const double rp = std::sqrt(std::max(lp, 0.0));
        const double rm = std::sqrt(std::max(lm, 0.0));
        const Complex phase = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0, 0.0);
        s(i, i) = s(j, j) = 0.5 * (rp + rm);
        s(i, j) = 0.5 * (rp - rm) * phase;
        s(j, i) = std::conj(s(i, j));
    }
    if (d % 2 == 1) {
        const Index c = d / 2;
        const double a = m(c, c).real();
        if (a < -tol::psd) throw Error(ErrorCode::NotPSD, "x_state_sqrt: negative middle entry", a);
        s(c, c) = std::sqrt(std::max(a, 0.0));
    }
    return s;
}

/// Wigner-Yanase squared speed evaluated with the closed-form X-state root.
inline double wy_squared_speed_x_state(const Hamiltonian& h, const DensityMatrix& rho) {
    require_same_dim(h, rho, "wy_squared_speed_x_state");
    return detail::weighted_offdiag_norm(h.omega_sq(), x_state_sqrt(rho.matrix()));
}

struct SpeedReport {
    double euclid_sq = 0.0;
    double euclid_sq_commutator = 0.0;
    double euclid_sq_bloch = 0.0;
    double wy_sq = 0.0;
    double variance_bound = 0.0;  // 2 (Delta H)^2
    double purity = 0.0;
};

inline SpeedReport speed_report(const Hamiltonian& h, const DensityMatrix& rho, const OrthonormalBasis& basis) {
    SpeedReport r;
    r.euclid_sq = squared_speed(h, rho);
    r.euclid_sq_commutator = squared_speed_commutator(h, rho);
    r.euclid_sq_bloch = squared_speed_bloch(h, rho, basis);
    r.wy_sq = wy_squared_speed(h, rho);
    r.variance_bound = 2.0 * energy_variance(h, rho);
    r.purity = purity(rho);
    return r;
}

// ---------------------------------------------------------------------------
// Open-system evaluator
// ---------------------------------------------------------------------------

struct LindbladSet {
    std::vector<Matrix> operators;  // L_k, units sqrt(rate)
};

/// D rho = sum_k L rho L^† - (L^†L rho + rho L^†L)/2.
inline Matrix dissipator(const LindbladSet& ls, const Matrix& rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const Matrix& l : ls.operators) {
        if (l.rows() != rho.rows() || l.cols() != rho.cols())
            throw Error(ErrorCode::DimensionMismatch, "dissipator: Lindblad operator dimension differs from the state");
        const Matrix ldl = l.adjoint() * l;
        out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
    }
    return out;
}

/// Tr[(L rho)^2] with L rho = -i[H, rho] + D rho, evaluated directly.
inline double squared_speed_open(const Hamiltonian& h, const LindbladSet& ls, const DensityMatrix& rho) {
    require_same_dim(h, rho, "squared_speed_open");
    const Matrix hm = h.matrix();
    const Matrix& r = rho.matrix();
    const Matrix generator = Complex(0.0, -1.0) * (hm * r - r * hm) + dissipator(ls, r);
    return (generator * generator).trace().real();
}

struct OpenSpeedTerms {
    double unitary = 0.0;          // 2 Tr[H [H, rho] rho]
    double dissipative = 0.0;      // Tr[(D rho)^2]
    double incompatibility = 0.0;  // -2i Tr[rho [D rho, H]]
    double total() const { return unitary + dissipative + incompatibility; }
};

/// The same quantity split into its unitary, dissipative and H/L
/// incompatibility contributions.
inline OpenSpeedTerms open_speed_terms(const Hamiltonian& h, const LindbladSet& ls, const DensityMatrix& rho) {
    require_same_dim(h, rho, "open_speed_terms");
    const Matrix hm = h.matrix();
    const Matrix& r = rho.matrix();
    const Matrix dr = dissipator(ls, r);
    OpenSpeedTerms t;
    t.unitary = 2.0 * (hm * (hm * r - r * hm) * r).trace().real();
    t.dissipative = (dr * dr).trace().real();
    t.incompatibility = (Complex(0.0, -2.0) * (r * (dr * hm - hm * dr)).trace()).real();
    return t;
}

}  // namespace qspeed
