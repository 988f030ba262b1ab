#pragma once

// Brute-force maximizer of the squared speed over states of fixed purity.
// Independent of the closed-form constructions: it only knows the objective
// sum_{ij} |rho_ij|^2 omega_ij^2 and the constraints Tr rho = 1, rho >= 0,
// Tr rho^2 = kappa.
//
// Full ansatz: projected gradient in matrix space. Each iteration moves to
// rho + eta G with G the gradient 2 W∘rho, then projects back by keeping the
// eigenvectors and retracting the spectrum onto
// {p >= 0, sum p = 1, sum p^2 = kappa}: the purity rescale and the clipping
// of negative eigenvalues, done in closed form on the eigenvalues. eta
// backtracks by halving and doubles after each accepted step. All constraints
// hold to rounding at every iterate.
//
// PersymX ansatz: the persymmetric X family. Each outer pair (i, d-1-i)
// forms a block [[a, c], [c, a]] with eigenvalues a ± c, so the family is
// parametrized by those eigenvalues (plus the middle entry for odd d), which
// live on the same simplex/sphere set as p above.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "qspeed/linalg.hpp"
#include "qspeed/sampling.hpp"
#include "qspeed/speed.hpp"

namespace qspeed {

enum class Ansatz { Full, PersymX };

struct OracleOptions {
    int restarts = 32;
    Ansatz ansatz = Ansatz::Full;
    int max_iterations = 20000;
    /// Seeds for the first restarts; each is rotated by a near-identity random
    /// unitary of strength `warm_noise` before use (Full ansatz only).
    std::vector<Matrix> warm_starts;
    double warm_noise = 0.05;
    int threads = 1;
};

struct OracleResult {
    double best_speed_sq = 0.0;
    DensityMatrix argmax;
    int restarts_used = 0;
    bool converged = false;
    long total_iterations = 0;
    double constraint_residual = 0.0;  // |purity(argmax) - kappa|
};

inline constexpr double oracle_constraint_tolerance = 1e-8;

/// Retraction onto {p >= 0, sum p = 1, sum p^2 = kappa}: center on the
/// hyperplane, rescale to the purity sphere, and drop the most negative
/// coordinate from the support until the point is nonnegative. Returns
/// nullopt when no support can carry the requested purity.
inline std::optional<RealVector> project_spectrum(const RealVector& y, double kappa) {
    const Index n = y.size();
    std::vector<bool> active(static_cast<std::size_t>(n), true);
    Index m = n;
    RealVector p = RealVector::Zero(n);
    while (m >= 1) {
        double mean = 0.0;
        for (Index k = 0; k < n; ++k)
            if (active[static_cast<std::size_t>(k)]) mean += y(k);
        mean /= static_cast<double>(m);
        const double centre = 1.0 / static_cast<double>(m);
        const double r2 = kappa - centre;
        if (r2 < -1e-14) return std::nullopt;
        double norm2 = 0.0;
        for (Index k = 0; k < n; ++k)
            if (active[static_cast<std::size_t>(k)]) norm2 += (y(k) - mean) * (y(k) - mean);
        const double radius = std::sqrt(std::max(r2, 0.0));
        p.setZero();
        if (norm2 > 0.0) {
            const double scale = radius / std::sqrt(norm2);
            for (Index k = 0; k < n; ++k)
                if (active[static_cast<std::size_t>(k)]) p(k) = centre + (y(k) - mean) * scale;
        } else {
            if (radius > 1e-15) return std::nullopt;
            for (Index k = 0; k < n; ++k)
                if (active[static_cast<std::size_t>(k)]) p(k) = centre;
        }
        Index worst = -1;
        for (Index k = 0; k < n; ++k)
            if (active[static_cast<std::size_t>(k)] && p(k) < 0.0 && (worst < 0 || p(k) < p(worst))) worst = k;
        if (worst < 0) return p;
        active[static_cast<std::size_t>(worst)] = false;
        --m;
    }
    return std::nullopt;
}

/// A feasible spectrum with purity kappa: (t, (1-t)/(d-1), ...).
inline RealVector reference_spectrum(Index d, double kappa) {
    RealVector p(d);
    if (d == 1) {
        p(0) = 1.0;
        return p;
    }
    const double dd = static_cast<double>(d);
    const double t = (1.0 + std::sqrt(std::max(0.0, (dd - 1.0) * (dd * kappa - 1.0)))) / dd;
    p.setConstant((1.0 - t) / (dd - 1.0));
    p(0) = t;
    return p;
}

namespace detail {

inline double normalized_kappa(Index d, double kappa) {
    const double lo = 1.0 / static_cast<double>(d);
    if (kappa < lo - 1e-12 || kappa > 1.0 + 1e-12)
        throw Error(ErrorCode::OutOfRange, "oracle: purity outside [1/d, 1]", kappa);
    return std::clamp(kappa, lo, 1.0);
}

inline Matrix build_state(const Matrix& v, const RealVector& p) {
    return hermitian_part(v * p.cast<Complex>().asDiagonal() * v.adjoint());
}

inline Matrix reorthonormalize(const Matrix& v) {
    Eigen::HouseholderQR<Matrix> qr(v);
    Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), v.cols());
    const Matrix& r = qr.matrixQR();
    for (Index k = 0; k < v.cols(); ++k) {
        const Complex rkk = r(k, k);
        const double a = std::abs(rkk);
        q.col(k) *= a > 0.0 ? rkk / a : Complex(1.0, 0.0);
    }
    return q;
}

struct LocalResult {
    double value = 0.0;
    Matrix rho;
    bool converged = false;
    int iterations = 0;
};

// Stops when the objective has improved by less than a relative 1e-14 over
// the last `window` iterations.
struct ProgressMonitor {
    static constexpr int window = 25;
    std::vector<double> history;
    bool stalled(double f) {
        history.push_back(f);
        if (history.size() <= static_cast<std::size_t>(window)) return false;
        const double old = history[history.size() - 1 - window];
        return f - old <= 1e-14 * std::max(std::abs(f), 1e-300);
    }
};

inline LocalResult ascend_full(const RealMatrix& w, double kappa, const Matrix& start, int max_iterations) {
    auto objective = [&](const Matrix& rho) { return weighted_offdiag_norm(w, rho); };
    auto project = [&](const Matrix& y) -> std::optional<Matrix> {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(y));
        if (solver.info() != Eigen::Success) return std::nullopt;
        std::optional<RealVector> p = project_spectrum(solver.eigenvalues(), kappa);
        if (!p) return std::nullopt;
        return build_state(solver.eigenvectors(), *p);
    };
    Matrix rho = start;
    double f = objective(rho);
    double eta = 0.1;
    ProgressMonitor monitor;
    bool converged = false;
    int iterations = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const Matrix g = (w.cast<Complex>().array() * rho.array()).matrix() * 2.0;
        for (int tries = 0; tries < 60; ++tries) {
            if (std::optional<Matrix> rho_new = project(rho + eta * g)) {
                const double f_new = objective(*rho_new);
                if (f_new > f) {
                    rho = std::move(*rho_new);
                    f = f_new;
                    eta = std::min(eta * 2.0, 1e6);
                    break;
                }
            }
            eta *= 0.5;
            if (eta < 1e-18) {
                eta = 1e-3;
                break;
            }
        }
        iterations = it + 1;
        if (monitor.stalled(f)) {
            converged = true;
            break;
        }
    }
    return {f, rho, converged, iterations};
}

struct XLayout {
    Index dim = 0;
    std::vector<double> pair_weight;  // normalized omega^2 of pair (i, d-1-i)
};

inline double x_objective(const XLayout& layout, const RealVector& q) {
    double f = 0.0;
    for (std::size_t i = 0; i < layout.pair_weight.size(); ++i) {
        const double c = q(2 * static_cast<Index>(i)) - q(2 * static_cast<Index>(i) + 1);
        f += 0.5 * c * c * layout.pair_weight[i];
    }
    return f;
}

inline Matrix x_state_from_eigen(const XLayout& layout, const RealVector& q) {
    const Index d = layout.dim;
    Matrix rho = Matrix::Zero(d, d);
    for (Index i = 0; i < d / 2; ++i) {
        const Index j = d - 1 - i;
        const double a = 0.5 * (q(2 * i) + q(2 * i + 1));
        const double c = 0.5 * (q(2 * i) - q(2 * i + 1));
        rho(i, i) = rho(j, j) = a;
        rho(i, j) = rho(j, i) = c;
    }
    if (d % 2 == 1) rho(d / 2, d / 2) = q(d - 1);
    return rho;
}

inline LocalResult ascend_x(const XLayout& layout, double kappa, RealVector q, int max_iterations) {
    double f = x_objective(layout, q);
    double eta = 0.1;
    ProgressMonitor monitor;
    bool converged = false;
    int iterations = 0;
    for (int it = 0; it < max_iterations; ++it) {
        RealVector grad = RealVector::Zero(q.size());
        for (std::size_t i = 0; i < layout.pair_weight.size(); ++i) {
            const Index a = 2 * static_cast<Index>(i);
            const double c = (q(a) - q(a + 1)) * layout.pair_weight[i];
            grad(a) = c;
            grad(a + 1) = -c;
        }
        for (int tries = 0; tries < 60; ++tries) {
            const std::optional<RealVector> q_new = project_spectrum(q + eta * grad, kappa);
            if (q_new) {
                const double f_new = x_objective(layout, *q_new);
                if (f_new > f) {
                    q = *q_new;
                    f = f_new;
                    eta = std::min(eta * 2.0, 1e6);
                    break;
                }
            }
            eta *= 0.5;
            if (eta < 1e-18) {
                eta = 1e-3;
                break;
            }
        }
        if (monitor.stalled(f)) {
            converged = true;
            iterations = it + 1;
            break;
        }
        iterations = it + 1;
    }
    return {f, x_state_from_eigen(layout, q), converged, iterations};
}

inline RealVector random_feasible_spectrum(Index d, double kappa, Engine& rng) {
    const RealVector y = sample_simplex(d, rng);
    if (std::optional<RealVector> p = project_spectrum(y, kappa)) return *p;
    RealVector p = reference_spectrum(d, kappa);
    std::vector<Index> perm(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) perm[static_cast<std::size_t>(k)] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    RealVector out(d);
    for (Index k = 0; k < d; ++k) out(perm[static_cast<std::size_t>(k)]) = p(k);
    return out;
}

inline Matrix near_identity_unitary(Index d, double strength, Engine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix k(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) k(i, j) = Complex(normal(rng), normal(rng));
    k = hermitian_part(k);
    const Matrix omega = Complex(0.0, -strength) * k;
    const Matrix eye = Matrix::Identity(d, d);
    return (eye - 0.5 * omega).partialPivLu().solve(eye + 0.5 * omega);
}

}  // namespace detail

/// Best state found over `options.restarts` independent local ascents. The
/// restart r draws from derive_stream(seed, r); ties go to the lowest index.
inline OracleResult max_speed_bruteforce(const Hamiltonian& h, double kappa, const OracleOptions& options,
                                         std::uint64_t seed) {
    if (options.restarts < 1) throw Error(ErrorCode::OutOfRange, "max_speed_bruteforce: restarts must be >= 1");
    const Index d = h.dim();
    kappa = detail::normalized_kappa(d, kappa);
    const double scale = h.max_gap() > 0.0 ? h.max_gap() * h.max_gap() : 1.0;
    const RealMatrix w = h.omega_sq() / scale;

    detail::XLayout layout;
    layout.dim = d;
    for (Index i = 0; i < d / 2; ++i) layout.pair_weight.push_back(w(i, d - 1 - i));

    auto run_restart = [&](int r) -> detail::LocalResult {
        Engine rng = derive_stream(seed, static_cast<std::uint64_t>(r));
        const bool warm = static_cast<std::size_t>(r) < options.warm_starts.size();
        if (options.ansatz == Ansatz::PersymX) {
            RealVector q;
            if (warm) {
                const Matrix& m = options.warm_starts[static_cast<std::size_t>(r)];
                q = RealVector::Zero(d);
                for (Index i = 0; i < d / 2; ++i) {
                    const double a = m(i, i).real();
                    const double c = std::abs(m(i, d - 1 - i));
                    q(2 * i) = a + c;
                    q(2 * i + 1) = a - c;
                }
                if (d % 2 == 1) q(d - 1) = m(d / 2, d / 2).real();
                std::optional<RealVector> fixed = project_spectrum(q, kappa);
                q = fixed ? *fixed : detail::random_feasible_spectrum(d, kappa, rng);
            } else {
                q = detail::random_feasible_spectrum(d, kappa, rng);
            }
            return detail::ascend_x(layout, kappa, q, options.max_iterations);
        }
        Matrix v;
        RealVector p;
        if (warm) {
            const EigenDecomposition e = hermitian_eig(options.warm_starts[static_cast<std::size_t>(r)]);
            v = detail::near_identity_unitary(d, options.warm_noise, rng) * e.vectors;
            std::optional<RealVector> fixed = project_spectrum(e.values.cwiseMax(0.0), kappa);
            p = fixed ? *fixed : detail::random_feasible_spectrum(d, kappa, rng);
        } else {
            v = sample_haar_unitary(d, rng);
            p = detail::random_feasible_spectrum(d, kappa, rng);
        }
        return detail::ascend_full(w, kappa, detail::build_state(detail::reorthonormalize(v), p), options.max_iterations);
    };

    std::vector<detail::LocalResult> results(static_cast<std::size_t>(options.restarts));
    const int workers = std::clamp(options.threads, 1, options.restarts);
    if (workers == 1) {
        for (int r = 0; r < options.restarts; ++r) results[static_cast<std::size_t>(r)] = run_restart(r);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int r = t; r < options.restarts; r += workers) results[static_cast<std::size_t>(r)] = run_restart(r);
            });
        for (std::thread& th : pool) th.join();
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].value > results[best].value) best = r;

    const Matrix& rho = results[best].rho;
    const double residual = std::abs((rho * rho).trace().real() - kappa);
    if (residual > oracle_constraint_tolerance)
        throw Error(ErrorCode::NoConvergence, "max_speed_bruteforce: purity constraint not met", residual);
    long total = 0;
    for (const detail::LocalResult& lr : results) total += lr.iterations;
    OracleResult out{results[best].value * scale, validate_density(rho), options.restarts, results[best].converged, total,
                     residual};
    return out;
}

struct StructureEntry {
    Index row = 0;
    Index col = 0;
    double magnitude = 0.0;
};

struct StructureReport {
    double max_off_x = 0.0;             // largest |rho_ij| off both diagonals
    double persymmetry_residual = 0.0;  // max | |rho_ij| - |rho_{d-1-j,d-1-i}| |
    std::vector<StructureEntry> offending;
    OracleResult oracle;
};

inline constexpr double structure_tolerance = 1e-5;

/// Measures how far a state is from the persymmetric X shape. Magnitudes are
/// compared, so diagonal phase gauges do not matter.
inline StructureReport measure_x_structure(const Matrix& rho, double tolerance = structure_tolerance) {
    const Index d = rho.rows();
    StructureReport rep;
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            const double mag = std::abs(rho(i, j));
            if (i != j && i + j != d - 1) {
                rep.max_off_x = std::max(rep.max_off_x, mag);
                if (mag > tolerance) rep.offending.push_back({i, j, mag});
            }
            const double mirror = std::abs(rho(d - 1 - j, d - 1 - i));
            rep.persymmetry_residual = std::max(rep.persymmetry_residual, std::abs(mag - mirror));
        }
    return rep;
}

/// Runs the unrestricted oracle and requires its argmax to be a persymmetric
/// X-state within 1e-5. Only meaningful where the oracle is reliable, d <= 4.
inline StructureReport verify_x_structure(const Hamiltonian& h, double kappa, int restarts, std::uint64_t seed) {
    if (h.dim() < 2 || h.dim() > 4) throw Error(ErrorCode::NotApplicable, "verify_x_structure: supported for d in {2,3,4}");
    OracleOptions opt;
    opt.restarts = restarts;
    opt.ansatz = Ansatz::Full;
    OracleResult res = max_speed_bruteforce(h, kappa, opt, seed);
    StructureReport rep = measure_x_structure(res.argmax.matrix());
    rep.oracle = std::move(res);
    if (rep.max_off_x > structure_tolerance || rep.persymmetry_residual > structure_tolerance) {
        std::ostringstream os;
        os << "verify_x_structure: argmax is not persymmetric X (max off-X " << rep.max_off_x << ", persymmetry residual "
           << rep.persymmetry_residual << ")";
        for (const StructureEntry& e : rep.offending) os << " [" << e.row << "," << e.col << "]=" << e.magnitude;
        throw Error(ErrorCode::StructureViolation, os.str(), std::max(rep.max_off_x, rep.persymmetry_residual));
    }
    return rep;
}

}  // namespace qspeed
