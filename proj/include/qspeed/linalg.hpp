#pragma once

// Dense complex Hermitian primitives: density-matrix validation, eigensolver,
// PSD square root, partial transpose, generalized Gell-Mann basis and Bloch
// vectors. All matrices are expressed in the energy eigenbasis of the
// Hamiltonian, with 0-based indices (index 0 is the ground level).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qspeed/error.hpp"

namespace qspeed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-9;            // most negative admissible eigenvalue (negated)
inline constexpr double eig_input_hermitian = 1e-10;
}  // namespace tol

/// Largest |M_ij - conj(M_ji)|.
inline double hermiticity_error(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// Eigendecomposition
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // orthonormal columns, vectors.col(k) pairs with values(k)
};

/// Eigendecomposition of a Hermitian matrix. Backed by Eigen's
/// SelfAdjointEigenSolver (tridiagonal QR, capped internally at 30·n sweeps);
/// a solver that fails to converge within the cap raises ConvergenceFailure.
inline EigenDecomposition hermitian_eig(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "hermitian_eig: matrix is not square");
    const double herm = m.size() ? hermiticity_error(m) : 0.0;
    if (herm > tol::eig_input_hermitian) throw Error(ErrorCode::NotHermitian, "hermitian_eig: input is not Hermitian", herm);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "hermitian_eig: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Matrix reconstruct(const EigenDecomposition& e) {
    return e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues in
/// [-1e-9, 0) are treated as zero; anything more negative is NotPSD.
inline Matrix matrix_sqrt_psd(const Matrix& m) {
    EigenDecomposition e = hermitian_eig(m);
    if (e.values.size() && e.values(0) < -tol::psd)
        throw Error(ErrorCode::NotPSD, "matrix_sqrt_psd: negative eigenvalue", e.values(0));
    RealVector roots = e.values.cwiseMax(0.0).cwiseSqrt();
    return hermitian_part(e.vectors * roots.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

struct DensityDiagnostics {
    double hermiticity_error = 0.0;  // max |M_ij - conj(M_ji)|
    double trace_error = 0.0;        // |Tr M - 1|, including any imaginary part
    double min_eigenvalue = 0.0;     // of the Hermitian part

    bool hermitian() const { return hermiticity_error <= tol::hermitian; }
    bool unit_trace() const { return trace_error <= tol::trace; }
    bool positive() const { return min_eigenvalue >= -tol::psd; }
    bool valid() const { return hermitian() && unit_trace() && positive(); }

    std::string describe() const {
        std::ostringstream os;
        os << "hermiticity_error=" << hermiticity_error << (hermitian() ? "" : " (FAIL)")
           << " trace_error=" << trace_error << (unit_trace() ? "" : " (FAIL)")
           << " min_eigenvalue=" << min_eigenvalue << (positive() ? "" : " (FAIL)");
        return os.str();
    }
};

inline DensityDiagnostics diagnose_density(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(ErrorCode::DimensionMismatch, "diagnose_density: matrix must be square and non-empty");
    DensityDiagnostics d;
    d.hermiticity_error = hermiticity_error(m);
    d.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "diagnose_density: eigensolver did not converge");
    d.min_eigenvalue = solver.eigenvalues()(0);
    return d;
}

class DensityMatrix;
DensityMatrix validate_density(const Matrix& m);

/// Hermitian, unit-trace, positive semidefinite d×d matrix. Only obtainable
/// through validate_density, so every instance satisfies the invariants.
class DensityMatrix {
public:
    /// The trivial one-level state [1].
    DensityMatrix() : m_(Matrix::Ones(1, 1)) {}

    const Matrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }
    Complex operator()(Index i, Index j) const { return m_(i, j); }

private:
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
    friend DensityMatrix validate_density(const Matrix& m);

    Matrix m_;
};

/// Checks the three density-matrix invariants and returns the validated state
/// (stored as its exact Hermitian part). The first failing invariant is
/// reported with its measured violation.
inline DensityMatrix validate_density(const Matrix& m) {
    const DensityDiagnostics d = diagnose_density(m);
    if (!d.hermitian()) throw Error(ErrorCode::NotHermitian, d.describe(), d.hermiticity_error);
    if (!d.unit_trace()) throw Error(ErrorCode::TraceNotOne, d.describe(), d.trace_error);
    if (!d.positive()) throw Error(ErrorCode::NotPSD, d.describe(), d.min_eigenvalue);
    return DensityMatrix(hermitian_part(m));
}

inline Matrix matrix_sqrt_psd(const DensityMatrix& rho) { return matrix_sqrt_psd(rho.matrix()); }

/// Tr[rho^2].
inline double purity(const DensityMatrix& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

inline DensityMatrix maximally_mixed(Index d) {
    return validate_density(Matrix::Identity(d, d) / static_cast<double>(d));
}

/// |psi><psi| for a (not necessarily normalized) vector.
inline DensityMatrix projector(const ComplexVector& psi) {
    const ComplexVector u = psi / psi.norm();
    return validate_density(u * u.adjoint());
}

/// Number of eigenvalues above `cutoff`.
inline Index numerical_rank(const Matrix& m, double cutoff = 1e-9) {
    const EigenDecomposition e = hermitian_eig(m);
    return static_cast<Index>((e.values.array() > cutoff).count());
}

// ---------------------------------------------------------------------------
// Partial transpose
// ---------------------------------------------------------------------------

/// Partial transpose of a (d1·d2)×(d1·d2) matrix on subsystem 1 or 2, with the
/// composite index i = a·d2 + b for |a>⊗|b>. Pure index permutation, so it is
/// an exact involution.
inline Matrix partial_transpose(const Matrix& m, Index d1, Index d2, int subsystem) {
    if (d1 < 1 || d2 < 1 || d1 * d2 != m.rows() || m.rows() != m.cols())
        throw Error(ErrorCode::BadFactorization, "partial_transpose: d1*d2 must equal the matrix dimension");
    if (subsystem != 1 && subsystem != 2) throw Error(ErrorCode::BadFactorization, "partial_transpose: subsystem must be 1 or 2");
    Matrix out(m.rows(), m.cols());
    for (Index a = 0; a < d1; ++a)
        for (Index b = 0; b < d2; ++b)
            for (Index c = 0; c < d1; ++c)
                for (Index e = 0; e < d2; ++e) {
                    const Index row = a * d2 + b;
                    const Index col = c * d2 + e;
                    if (subsystem == 1)
                        out(c * d2 + b, a * d2 + e) = m(row, col);
                    else
                        out(a * d2 + e, c * d2 + b) = m(row, col);
                }
    return out;
}

inline Matrix partial_transpose(const DensityMatrix& rho, Index d1, Index d2, int subsystem) {
    return partial_transpose(rho.matrix(), d1, d2, subsystem);
}

// ---------------------------------------------------------------------------
// Generalized Gell-Mann basis
// ---------------------------------------------------------------------------

/// Hilbert-Schmidt orthonormal basis {sigma_0 = I/sqrt(d), sigma_1..sigma_{d^2-1}}
/// of d×d Hermitian matrices. Ordering of the traceless part is fixed:
///   1. symmetric pairs (E_jk + E_kj)/sqrt2, row-major over j<k
///   2. antisymmetric pairs -i(E_jk - E_kj)/sqrt2, row-major over j<k
///   3. diagonal matrices (sum_{m<l} E_mm - l E_ll)/sqrt(l(l+1)), l = 1..d-1
class OrthonormalBasis {
public:
    static OrthonormalBasis gell_mann(Index d) {
        if (d < 1) throw Error(ErrorCode::DimensionMismatch, "gell_mann: dimension must be positive");
        OrthonormalBasis b;
        b.dim_ = d;
        b.identity_ = Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
        const double r2 = 1.0 / std::sqrt(2.0);
        for (Index j = 0; j < d; ++j)
            for (Index k = j + 1; k < d; ++k) {
                Matrix s = Matrix::Zero(d, d);
                s(j, k) = r2;
                s(k, j) = r2;
                b.elements_.push_back(std::move(s));
            }
        for (Index j = 0; j < d; ++j)
            for (Index k = j + 1; k < d; ++k) {
                Matrix a = Matrix::Zero(d, d);
                a(j, k) = Complex(0.0, -r2);
                a(k, j) = Complex(0.0, r2);
                b.elements_.push_back(std::move(a));
            }
        for (Index l = 1; l < d; ++l) {
            Matrix g = Matrix::Zero(d, d);
            const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
            for (Index m = 0; m < l; ++m) g(m, m) = norm;
            g(l, l) = -static_cast<double>(l) * norm;
            b.elements_.push_back(std::move(g));
        }
        return b;
    }

    Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const Matrix& identity_element() const noexcept { return identity_; }
    const Matrix& operator[](std::size_t j) const { return elements_.at(j); }
    const std::vector<Matrix>& elements() const noexcept { return elements_; }

private:
    Index dim_ = 0;
    Matrix identity_;
    std::vector<Matrix> elements_;
};

/// r_j = Tr[M sigma_j] for a Hermitian matrix M (need not be a state).
inline RealVector bloch_components(const Matrix& m, const OrthonormalBasis& basis) {
    if (m.rows() != basis.dim() || m.cols() != basis.dim())
        throw Error(ErrorCode::DimensionMismatch, "bloch_vector: basis dimension does not match the state");
    RealVector r(static_cast<Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        r(static_cast<Index>(j)) = (m * basis[j]).trace().real();
    return r;
}

inline RealVector bloch_vector(const DensityMatrix& rho, const OrthonormalBasis& basis) {
    return bloch_components(rho.matrix(), basis);
}

/// Inverse of bloch_vector: sigma_0/sqrt(d) + sum_j r_j sigma_j.
inline Matrix from_bloch(const RealVector& r, const OrthonormalBasis& basis) {
    if (static_cast<std::size_t>(r.size()) != basis.size())
        throw Error(ErrorCode::DimensionMismatch, "from_bloch: vector length does not match the basis");
    Matrix m = basis.identity_element() / std::sqrt(static_cast<double>(basis.dim()));
    for (std::size_t j = 0; j < basis.size(); ++j) m += r(static_cast<Index>(j)) * basis[j];
    return m;
}

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

/// Diagonal Hamiltonian given by its nondecreasing energy levels (hbar = 1).
class Hamiltonian {
public:
    explicit Hamiltonian(std::vector<double> energies) : energies_(std::move(energies)) {
        if (energies_.empty()) throw Error(ErrorCode::DimensionMismatch, "Hamiltonian: no energy levels");
        for (std::size_t i = 0; i + 1 < energies_.size(); ++i)
            if (!(energies_[i] <= energies_[i + 1]))
                throw Error(ErrorCode::NotSorted, "Hamiltonian: energies must be nondecreasing", static_cast<double>(i));
    }

    Index dim() const noexcept { return static_cast<Index>(energies_.size()); }
    const std::vector<double>& energies() const noexcept { return energies_; }
    double energy(Index i) const { return energies_.at(static_cast<std::size_t>(i)); }

    /// Bohr frequency E_j - E_i (nonnegative for i <= j).
    double omega(Index i, Index j) const { return energy(j) - energy(i); }

    /// Widest gap E_max - E_min.
    double max_gap() const { return energies_.back() - energies_.front(); }

    /// W_ij = (E_j - E_i)^2.
    RealMatrix omega_sq() const {
        const Index d = dim();
        RealMatrix w(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) w(i, j) = omega(i, j) * omega(i, j);
        return w;
    }

    Matrix matrix() const {
        Matrix h = Matrix::Zero(dim(), dim());
        for (Index i = 0; i < dim(); ++i) h(i, i) = energy(i);
        return h;
    }

private:
    std::vector<double> energies_;
};

inline void require_same_dim(const Hamiltonian& h, const DensityMatrix& rho, const char* where) {
    if (h.dim() != rho.dim())
        throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": Hamiltonian and state dimensions differ");
}

}  // namespace qspeed
