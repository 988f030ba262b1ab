#pragma once

// Coherence and entanglement of states, with the bipartite split
// C^d = C^d1 ⊗ C^d2 indexed as i = a·d2 + b.

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qspeed/linalg.hpp"
#include "qspeed/optimal.hpp"

namespace qspeed {

/// Sum of |rho_ij| over i != j.
inline double l1_coherence(const DensityMatrix& rho) {
    double s = 0.0;
    for (Index i = 0; i < rho.dim(); ++i)
        for (Index j = 0; j < rho.dim(); ++j)
            if (i != j) s += std::abs(rho(i, j));
    return s;
}

/// ||rho^{T1}||_1 - 1, i.e. twice the summed magnitude of the negative
/// eigenvalues of the partial transpose. Eigenvalues above -1e-12 count as zero.
inline double negativity(const DensityMatrix& rho, Index d1, Index d2) {
    const EigenDecomposition e = hermitian_eig(partial_transpose(rho, d1, d2, 1));
    double s = 0.0;
    for (Index k = 0; k < e.values.size(); ++k)
        if (e.values(k) < -1e-12) s -= e.values(k);
    return 2.0 * s;
}

namespace detail {

// sqrt of a PSD matrix with eigenvalues below `floor` set to exactly zero, so
// rank-deficient inputs do not pick up sqrt(1e-17)-sized noise.
inline Matrix sqrt_with_floor(const Matrix& m, double floor) {
    const EigenDecomposition e = hermitian_eig(m);
    RealVector r(e.values.size());
    for (Index k = 0; k < r.size(); ++k) {
        if (e.values(k) < -tol::psd) throw Error(ErrorCode::NotPSD, "sqrt_with_floor: negative eigenvalue", e.values(k));
        r(k) = e.values(k) > floor ? std::sqrt(e.values(k)) : 0.0;
    }
    return e.vectors * r.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace detail

/// Wootters concurrence of a two-qubit state. The decreasing values
/// l1..l4 are the singular values of sqrt(rho)·sqrt(rho~), with
/// rho~ = (sy⊗sy) rho* (sy⊗sy) and sqrt(rho~) = (sy⊗sy) sqrt(rho)* (sy⊗sy).
inline double concurrence_two_qubit(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw Error(ErrorCode::DimensionMismatch, "concurrence_two_qubit: needs a 4x4 state", static_cast<double>(rho.dim()));
    Matrix flip = Matrix::Zero(4, 4);
    flip(0, 3) = flip(3, 0) = -1.0;
    flip(1, 2) = flip(2, 1) = 1.0;
    const Matrix s = detail::sqrt_with_floor(rho.matrix(), 1e-13);
    const Matrix s_tilde = flip * s.conjugate() * flip;
    Eigen::JacobiSVD<Matrix> svd(s * s_tilde);
    const RealVector l = svd.singularValues();  // decreasing
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

/// max{2(|rho_14| - rho_22), 0}, valid for the d = 4 maximal-speed states.
inline double concurrence_optimal_closed(const OptimalState& s) {
    if (s.dim() != 4) throw Error(ErrorCode::WrongDimension, "concurrence_optimal_closed: needs d = 4", static_cast<double>(s.dim()));
    return std::max(0.0, 2.0 * (std::abs(s.state(0, 3)) - s.state(1, 1).real()));
}

// ---------------------------------------------------------------------------
// Product-state decomposition below kappa0
// ---------------------------------------------------------------------------

struct ProductTerm {
    double weight = 0.0;
    DensityMatrix a;
    DensityMatrix b;
};

struct ProductDecomposition {
    std::vector<ProductTerm> terms;
    DensityMatrix target;

    Matrix reconstruct() const {
        const Index d = target.dim();
        Matrix m = Matrix::Zero(d, d);
        for (const ProductTerm& t : terms) m += t.weight * Eigen::kroneckerProduct(t.a.matrix(), t.b.matrix()).eval();
        return m;
    }
    double residual() const { return (reconstruct() - target.matrix()).cwiseAbs().maxCoeff(); }
};

/// Explicit separable form of the LowPurity state, c = |rho_1d|:
///   sum_{a,b} (1/d - Delta_ab) |a><a| ⊗ |b><b|
///   + c [P_x+ ⊗ Q_x+  +  P_x- ⊗ Q_x-  +  P_y+ ⊗ Q_y-  +  P_y- ⊗ Q_y+]
/// with Delta_ab = c on the four corners a in {0, d1-1}, b in {0, d2-1} and
/// zero elsewhere. P and Q project on |±x> = (|0> ± e^{-i theta/2}|n>)/sqrt2
/// and |±y> = (|0> ± i e^{-i theta/2}|n>)/sqrt2, n the last level of each
/// factor. Weights stay nonnegative because c <= 1/d up to kappa0.
inline ProductDecomposition separable_decomposition(const Hamiltonian& h, double kappa, Index d1, Index d2,
                                                    double theta1 = 0.0) {
    const Index d = h.dim();
    if (d1 < 2 || d2 < 2 || d1 * d2 != d)
        throw Error(ErrorCode::BadFactorization, "separable_decomposition: needs d1*d2 = d with d1, d2 >= 2");
    const RegimeParams p = regime_params(h);
    if (kappa > p.kappa0 + detail::kappa_slack) throw Error(ErrorCode::OutOfBand, "separable_decomposition: purity above kappa0", kappa);
    const OptimalState opt = optimal_state(h, kappa, theta1, 0.0, p);
    const double c = std::abs(opt.state(0, d - 1));
    const double dd = static_cast<double>(d);

    ProductDecomposition out;
    out.target = opt.state;
    auto basis = [](Index n, Index k) {
        ComplexVector v = ComplexVector::Zero(n);
        v(k) = 1.0;
        return projector(v);
    };
    for (Index a = 0; a < d1; ++a)
        for (Index b = 0; b < d2; ++b) {
            const bool corner = (a == 0 || a == d1 - 1) && (b == 0 || b == d2 - 1);
            double w = 1.0 / dd - (corner ? c : 0.0);
            if (w < -1e-12) throw Error(ErrorCode::OutOfBand, "separable_decomposition: negative weight", w);
            w = std::max(w, 0.0);
            if (w > 0.0) out.terms.push_back({w, basis(d1, a), basis(d2, b)});
        }
    if (c > 0.0) {
        const Complex half_phase = std::polar(1.0, -0.5 * theta1);
        const Complex i_unit(0.0, 1.0);
        auto lobe = [&](Index n, Complex coeff) {
            ComplexVector v = ComplexVector::Zero(n);
            v(0) = 1.0;
            v(n - 1) = coeff * half_phase;
            return projector(v);
        };
        out.terms.push_back({c, lobe(d1, 1.0), lobe(d2, 1.0)});
        out.terms.push_back({c, lobe(d1, -1.0), lobe(d2, -1.0)});
        out.terms.push_back({c, lobe(d1, i_unit), lobe(d2, -i_unit)});
        out.terms.push_back({c, lobe(d1, -i_unit), lobe(d2, i_unit)});
    }
    return out;
}

}  // namespace qspeed
