#pragma once

// Maximal-speed states at fixed purity. Indices below are 1-based in prose
// and 0-based in code; d is the dimension and omega = E_d - E_1.
//
// Bands in kappa:
//   [1/d, k0]   LowPurity   diagonal 1/d, |rho_1d| = sqrt((kappa - 1/d)/2)
//   [k0, k1]    OuterBand   rho_11 = rho_dd = |rho_1d| = 1/d + x,
//                           middle diagonal 1/d - 2x/(d-2)
//   [k1, k2]    MidBand     OuterBand at x = x0 plus
//                           |rho_{2,d-1}| = sqrt((kappa - k1)/2)
//   [k2, 1]     TopBand     d = 4 only: two weighted projectors
//               NumericFallback  d > 4, no closed form; oracle over the
//                           persymmetric X family
// with k0 = 1/d + 2/d^2 and gamma1 = omega^2 / omega_{2,d-1}^2. For d = 3 or
// gamma1 >= 2 the OuterBand reaches kappa = 1 and k1 = k2 = 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qspeed/linalg.hpp"
#include "qspeed/oracle.hpp"
#include "qspeed/speed.hpp"

namespace qspeed {

enum class Regime { LowPurity, OuterBand, MidBand, TopBand, NumericFallback };

inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::LowPurity: return "LowPurity";
        case Regime::OuterBand: return "OuterBand";
        case Regime::MidBand: return "MidBand";
        case Regime::TopBand: return "TopBand";
        case Regime::NumericFallback: return "NumericFallback";
    }
    return "Unknown";
}

/// The kappa-independent thresholds of a Hamiltonian.
struct RegimeParams {
    Index dim = 0;
    double omega_1d = 0.0;
    double kappa0 = 0.0;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    /// gamma[i] = omega_1d^2 / omega_{i+2, d-1-i}^2 (1-based pairs (2,d-1), (3,d-2), ...).
    /// Infinite when that inner pair is degenerate.
    std::vector<double> gamma;
    std::optional<double> x0;  // set when d >= 4 and gamma1 < 2

    double gamma1() const { return gamma.empty() ? std::numeric_limits<double>::infinity() : gamma.front(); }
    /// True when the MidBand exists.
    bool has_mid_band() const { return dim >= 4 && gamma1() < 2.0; }
};

namespace detail {

inline constexpr double kappa_slack = 1e-12;

inline double kappa0_of(Index d) {
    const double dd = static_cast<double>(d);
    return 1.0 / dd + 2.0 / (dd * dd);
}

inline double x0_formula(double gamma1, Index d) {
    const double dd = static_cast<double>(d);
    return (1.0 / dd) * (gamma1 - 1.0) / (2.0 * (dd - 1.0) / (dd - 2.0) - gamma1);
}

// Purity of the OuterBand family at parameter x.
inline double outer_band_purity(double x, Index d) {
    const double dd = static_cast<double>(d);
    const double a = 1.0 / dd + x;
    const double b = 1.0 / dd - 2.0 * x / (dd - 2.0);
    return 4.0 * a * a + (dd - 2.0) * b * b;
}

}  // namespace detail

/// x0 = (1/d)(gamma1 - 1) / (2(d-1)/(d-2) - gamma1), defined for 1 < gamma1 < 2.
inline double x0_of_gamma(double gamma1, Index d) {
    if (d < 4) throw Error(ErrorCode::OutOfRange, "x0_of_gamma: needs d >= 4", static_cast<double>(d));
    if (!(gamma1 > 1.0 && gamma1 < 2.0)) throw Error(ErrorCode::OutOfRange, "x0_of_gamma: gamma1 must lie in (1, 2)", gamma1);
    return detail::x0_formula(gamma1, d);
}

/// Positive root x of kappa = 4(1/d + x)^2 + (d-2)(1/d - 2x/(d-2))^2.
inline double x_of_kappa(double kappa, Index d) {
    if (d < 3) throw Error(ErrorCode::OutOfRange, "x_of_kappa: needs d >= 3", static_cast<double>(d));
    const double k0 = detail::kappa0_of(d);
    if (kappa < k0 - detail::kappa_slack) throw Error(ErrorCode::OutOfBand, "x_of_kappa: purity below kappa0", kappa);
    if (kappa > 1.0 + detail::kappa_slack) throw Error(ErrorCode::OutOfRange, "x_of_kappa: purity above 1", kappa);
    kappa = std::clamp(kappa, k0, 1.0);
    const double dd = static_cast<double>(d);
    const double root = std::sqrt(std::max(0.0, ((dd - 1.0) * kappa - 1.0) / (dd - 2.0)));
    return std::max(0.0, (dd - 2.0) / (2.0 * dd * (dd - 1.0)) * (-1.0 + dd * root));
}

inline RegimeParams regime_params(const Hamiltonian& h) {
    const Index d = h.dim();
    if (d < 2) throw Error(ErrorCode::DimensionMismatch, "regime_params: needs d >= 2", static_cast<double>(d));
    RegimeParams p;
    p.dim = d;
    p.omega_1d = h.max_gap();
    if (!(p.omega_1d > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "regime_params: E_1 = E_d", p.omega_1d);
    p.kappa0 = detail::kappa0_of(d);
    const double w2 = p.omega_1d * p.omega_1d;
    for (Index i = 1; i < d - 1 - i; ++i) {
        const double inner = h.omega(i, d - 1 - i);
        p.gamma.push_back(inner > 0.0 ? w2 / (inner * inner) : std::numeric_limits<double>::infinity());
    }
    if (!p.has_mid_band()) return p;

    const double dd = static_cast<double>(d);
    const double g = p.gamma1();
    const double den = 2.0 * (dd - 1.0) - (dd - 2.0) * g;
    p.kappa1 = (4.0 + (dd - 2.0) * (2.0 - g) * (2.0 - g)) / (den * den);
    p.kappa2 = (4.0 + dd * (2.0 - g) * (2.0 - g)) / (den * den);

    const double x0 = detail::x0_formula(g, d);
    const double inner_diag = 1.0 / dd - 2.0 * x0 / (dd - 2.0);
    const double k1_alt = detail::outer_band_purity(x0, d);
    const double k2_alt = k1_alt + 2.0 * inner_diag * inner_diag;
    if (std::abs(k1_alt - p.kappa1) > 1e-12 || std::abs(k2_alt - p.kappa2) > 1e-12)
        throw Error(ErrorCode::ConstraintViolation, "regime_params: threshold formulas disagree",
                    std::max(std::abs(k1_alt - p.kappa1), std::abs(k2_alt - p.kappa2)));
    p.x0 = x0;
    return p;
}

/// Band containing kappa. Boundaries belong to the lower band.
inline Regime classify(const RegimeParams& p, double kappa) {
    if (p.dim == 2 || kappa <= p.kappa0) return Regime::LowPurity;
    if (!p.has_mid_band() || kappa <= p.kappa1) return Regime::OuterBand;
    if (kappa <= p.kappa2) return Regime::MidBand;
    return p.dim == 4 ? Regime::TopBand : Regime::NumericFallback;
}

struct OptimalState {
    DensityMatrix state;
    Regime regime = Regime::LowPurity;
    double kappa = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::optional<double> x;  // OuterBand parameter, or x0 on the MidBand
    bool closed_form = true;  // false for NumericFallback

    Index dim() const { return state.dim(); }
};

namespace detail {

inline double normalized_purity(Index d, double kappa) {
    const double lo = 1.0 / static_cast<double>(d);
    if (!(kappa >= lo - kappa_slack && kappa <= 1.0 + kappa_slack))
        throw Error(ErrorCode::OutOfRange, "optimal_state: purity outside [1/d, 1]", kappa);
    return std::clamp(kappa, lo, 1.0);
}

// Diagonal a on the outer pair with |rho_1d| = c, b on the middle.
inline Matrix outer_x_state(Index d, double a, double c, double b, double theta1) {
    Matrix m = Matrix::Zero(d, d);
    for (Index k = 1; k + 1 < d; ++k) m(k, k) = b;
    m(0, 0) = m(d - 1, d - 1) = a;
    m(0, d - 1) = std::polar(c, theta1);
    m(d - 1, 0) = std::conj(m(0, d - 1));
    return m;
}

inline void set_pair(Matrix& m, Index i, double magnitude, double theta) {
    const Index j = m.rows() - 1 - i;
    m(i, j) = std::polar(magnitude, theta);
    m(j, i) = std::conj(m(i, j));
}

inline constexpr std::uint64_t fallback_seed = 0x5eedf00dULL;
inline constexpr int fallback_restarts = 16;

}  // namespace detail

/// Raw matrix of one band's formula at kappa, without classification or
/// validation. Evaluating two adjacent bands at their shared edge is how
/// continuity is checked.
inline Matrix band_formula(const Hamiltonian& h, double kappa, Regime regime, double theta1, double theta2,
                           const RegimeParams& p) {
    const Index d = h.dim();
    const double dd = static_cast<double>(d);
    Matrix m;
    switch (regime) {
        case Regime::LowPurity: {
            const double c = std::sqrt(std::max(0.0, 0.5 * (kappa - 1.0 / dd)));
            m = detail::outer_x_state(d, 1.0 / dd, c, 1.0 / dd, theta1);
            break;
        }
        case Regime::OuterBand: {
            const double x = x_of_kappa(kappa, d);
            const double a = 1.0 / dd + x;
            m = detail::outer_x_state(d, a, a, 1.0 / dd - 2.0 * x / (dd - 2.0), theta1);
            break;
        }
        case Regime::MidBand: {
            if (!p.x0) throw Error(ErrorCode::NotApplicable, "band_formula: no MidBand for this Hamiltonian");
            const double a = 1.0 / dd + *p.x0;
            m = detail::outer_x_state(d, a, a, 1.0 / dd - 2.0 * *p.x0 / (dd - 2.0), theta1);
            detail::set_pair(m, 1, std::sqrt(std::max(0.0, 0.5 * (kappa - p.kappa1))), theta2);
            break;
        }
        case Regime::TopBand: {
            if (d != 4) throw Error(ErrorCode::NotApplicable, "band_formula: TopBand exists for d = 4 only");
            const double s = std::sqrt(std::max(0.0, 2.0 * kappa - 1.0));
            m = detail::outer_x_state(d, 0.25 * (1.0 + s), 0.25 * (1.0 + s), 0.25 * (1.0 - s), theta1);
            detail::set_pair(m, 1, 0.25 * (1.0 - s), theta2);
            break;
        }
        case Regime::NumericFallback: {
            if (!p.x0) throw Error(ErrorCode::NotApplicable, "band_formula: no MidBand to start the search from");
            const double a = 1.0 / dd + *p.x0;
            Matrix warm = detail::outer_x_state(d, a, a, 1.0 / dd - 2.0 * *p.x0 / (dd - 2.0), 0.0);
            detail::set_pair(warm, 1, std::sqrt(std::max(0.0, 0.5 * (p.kappa2 - p.kappa1))), 0.0);
            OracleOptions opt;
            opt.ansatz = Ansatz::PersymX;
            opt.restarts = detail::fallback_restarts;
            opt.warm_starts = {warm};
            const OracleResult res = max_speed_bruteforce(h, kappa, opt, detail::fallback_seed);
            m = res.argmax.matrix();
            for (Index i = 0; i < d / 2; ++i) {
                const double theta = i == 0 ? theta1 : (i == 1 ? theta2 : 0.0);
                detail::set_pair(m, i, std::abs(m(i, d - 1 - i)), theta);
            }
            break;
        }
    }
    return m;
}

/// Construction with explicit thresholds. Used directly only to inject
/// wrong thresholds in negative-control runs; normal callers use the
/// overload below.
inline OptimalState optimal_state(const Hamiltonian& h, double kappa, double theta1, double theta2,
                                  const RegimeParams& p) {
    const Index d = h.dim();
    if (p.dim != d) throw Error(ErrorCode::DimensionMismatch, "optimal_state: parameters belong to another dimension");
    if (!(h.max_gap() > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "optimal_state: E_1 = E_d");
    kappa = detail::normalized_purity(d, kappa);

    OptimalState out;
    out.regime = classify(p, kappa);
    out.kappa = kappa;
    out.theta1 = theta1;
    out.theta2 = theta2;
    out.closed_form = out.regime != Regime::NumericFallback;
    if (out.regime == Regime::LowPurity && d > 2) out.x = 0.0;
    if (out.regime == Regime::OuterBand) out.x = x_of_kappa(kappa, d);
    if (out.regime == Regime::MidBand) out.x = p.x0;
    out.state = validate_density(band_formula(h, kappa, out.regime, theta1, theta2, p));
    const double achieved = purity(out.state);
    if (std::abs(achieved - kappa) > 1e-10)
        throw Error(ErrorCode::ConstraintViolation,
                    "optimal_state: constructed purity " + std::to_string(achieved) + " differs from requested " +
                        std::to_string(kappa),
                    std::abs(achieved - kappa));
    return out;
}

inline OptimalState optimal_state(const Hamiltonian& h, double kappa, double theta1 = 0.0, double theta2 = 0.0) {
    return optimal_state(h, kappa, theta1, theta2, regime_params(h));
}

/// Largest squared speed at purity kappa.
inline double optimal_speed(const Hamiltonian& h, double kappa) {
    const RegimeParams p = regime_params(h);
    const double k = detail::normalized_purity(h.dim(), kappa);
    if (classify(p, k) == Regime::LowPurity) return (k - 1.0 / static_cast<double>(h.dim())) * p.omega_1d * p.omega_1d;
    return squared_speed(h, optimal_state(h, k, 0.0, 0.0, p).state);
}

/// Wigner-Yanase squared speed through the closed-form X-state square root.
inline double wy_squared_speed(const Hamiltonian& h, const OptimalState& s) {
    return wy_squared_speed_x_state(h, s.state);
}

// ---------------------------------------------------------------------------
// Stationarity check
// ---------------------------------------------------------------------------

struct KktViolationEntry {
    Index row = 0;
    Index col = 0;
    std::string condition;
    double measured = 0.0;
};

struct KktReport {
    double mu = 0.0;  // multiplier recovered from the outer-pair condition
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    std::vector<double> omega_j_sq;  // omega_1j^2 + omega_jd^2 for j = 2..d-1
    std::vector<KktViolationEntry> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks the first-order conditions of the fixed-purity problem on a
/// closed-form candidate:
///  - mu from the outer pair lies in [omega^2/2, omega^2];
///  - every nonzero inner coherence rho_ij (2 <= i < j <= d-1) has
///    omega_ij^2 = mu, and every vanishing one has omega_ij^2 <= mu;
///  - coherences between an outer level and a middle level vanish.
/// TopBand and NumericFallback candidates have no single multiplier of this
/// form and are rejected with NotApplicable.
inline KktReport kkt_check(const Hamiltonian& h, const OptimalState& s, bool throw_on_violation = true) {
    require_same_dim(h, s.state, "kkt_check");
    if (s.regime == Regime::TopBand || s.regime == Regime::NumericFallback)
        throw Error(ErrorCode::NotApplicable, std::string("kkt_check: no closed-form multiplier on ") + std::string(to_string(s.regime)));
    const Index d = h.dim();
    const double dd = static_cast<double>(d);
    const double w2 = h.max_gap() * h.max_gap();
    const Matrix& rho = s.state.matrix();

    KktReport rep;
    const double x = d > 2 ? rho(0, 0).real() - 1.0 / dd : 0.0;
    rep.mu = d > 2 ? w2 * (x + 1.0 / dd) / (2.0 * (dd - 1.0) * x / (dd - 2.0) + 1.0 / dd) : w2;
    rep.mu_lower = 0.5 * w2;
    rep.mu_upper = w2;
    if (rep.mu < rep.mu_lower - 1e-9 || rep.mu > rep.mu_upper + 1e-9)
        rep.violations.push_back({0, d - 1, "mu outside [omega^2/2, omega^2]", rep.mu});

    const double tol_mu = 1e-9 * w2;
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            if (i == 0 && j == d - 1) continue;
            const double mag = std::abs(rho(i, j));
            const bool outer = i == 0 || j == d - 1;
            if (outer) {
                if (mag > 1e-12) rep.violations.push_back({i, j, "outer-to-middle coherence must vanish", mag});
                continue;
            }
            const double wij2 = h.omega(i, j) * h.omega(i, j);
            if (mag > 1e-12) {
                if (std::abs(rep.mu - wij2) > tol_mu)
                    rep.violations.push_back({i, j, "active coherence needs mu = omega_ij^2", rep.mu - wij2});
            } else if (wij2 > rep.mu + tol_mu && rho(i, i).real() > 1e-12 && rho(j, j).real() > 1e-12) {
                rep.violations.push_back({i, j, "inactive coherence needs omega_ij^2 <= mu", wij2 - rep.mu});
            }
        }
    for (Index j = 1; j + 1 < d; ++j) {
        const double a = h.omega(0, j);
        const double b = h.omega(j, d - 1);
        rep.omega_j_sq.push_back(a * a + b * b);
    }
    if (throw_on_violation && !rep.ok()) {
        const KktViolationEntry& v = rep.violations.front();
        throw Error(ErrorCode::KKTViolation,
                    "kkt_check: " + v.condition + " at (" + std::to_string(v.row + 1) + "," + std::to_string(v.col + 1) + ")",
                    v.measured);
    }
    return rep;
}

}  // namespace qspeed
