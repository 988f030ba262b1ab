#pragma once

// The three CLI commands as plain functions over streams, so tests can run
// them without a process boundary. Exit codes: 0 success, 1 failed checks,
// 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qspeed/experiments.hpp"
#include "qspeed/optimal.hpp"
#include "qspeed/oracle.hpp"
#include "qspeed/resources.hpp"

namespace qspeed::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<Index> dim;
    std::vector<double> energies;
    std::string preset;
    std::optional<double> kappa;
    std::optional<double> kappa_min;
    std::optional<double> kappa_max;
    std::optional<int> steps;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 42;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::optional<Index> split;
    int threads = 1;
    int restarts = 32;
    double perturb_kappa1 = 0.0;  // negative control for verify
};

/// d = 4 spectra with omega_14 = sqrt2 and omega_23 = 2/sqrt3 (gamma1 = 3/2)
/// or 2/sqrt5 (gamma1 = 5/2), placed symmetrically.
inline std::vector<double> preset_energies(const std::string& name) {
    const double w14 = std::sqrt(2.0);
    double w23 = 0.0;
    if (name == "gamma-lt2")
        w23 = 2.0 / std::sqrt(3.0);
    else if (name == "gamma-ge2")
        w23 = 2.0 / std::sqrt(5.0);
    else
        throw ConfigError("unknown preset '" + name + "' (expected gamma-lt2 or gamma-ge2)");
    return {0.0, 0.5 * (w14 - w23), 0.5 * (w14 + w23), w14};
}

inline Hamiltonian resolve_hamiltonian(const RunConfig& cfg) {
    std::vector<double> e;
    if (!cfg.preset.empty()) {
        if (!cfg.energies.empty()) throw ConfigError("--preset and --energies are mutually exclusive");
        e = preset_energies(cfg.preset);
    } else if (!cfg.energies.empty()) {
        e = cfg.energies;
    } else {
        const Index d = cfg.dim.value_or(4);
        if (d < 2) throw ConfigError("--dim must be at least 2");
        for (Index k = 0; k < d; ++k) e.push_back(static_cast<double>(k));
    }
    if (cfg.dim && *cfg.dim != static_cast<Index>(e.size()))
        throw ConfigError("--dim " + std::to_string(*cfg.dim) + " does not match " + std::to_string(e.size()) + " energies");
    if (e.size() < 2) throw ConfigError("need at least two energy levels");
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (!(e[i] <= e[i + 1])) throw ConfigError("energies must be sorted nondecreasing");
    if (!(e.back() > e.front())) throw ConfigError("energies must not all be equal");
    return Hamiltonian(e);
}

inline std::vector<double> kappa_grid(const RunConfig& cfg, Index d, int default_steps) {
    const double lo_bound = 1.0 / static_cast<double>(d);
    auto check = [&](double k, const char* flag) {
        if (!(k >= lo_bound - 1e-12 && k <= 1.0 + 1e-12))
            throw ConfigError(std::string(flag) + " must lie in [1/d, 1] = [" + std::to_string(lo_bound) + ", 1]");
        return std::clamp(k, lo_bound, 1.0);
    };
    if (cfg.kappa) {
        if (cfg.kappa_min || cfg.kappa_max || cfg.steps) throw ConfigError("--kappa excludes --kappa-min/--kappa-max/--steps");
        return {check(*cfg.kappa, "--kappa")};
    }
    const double lo = check(cfg.kappa_min.value_or(lo_bound), "--kappa-min");
    const double hi = check(cfg.kappa_max.value_or(1.0), "--kappa-max");
    const int steps = cfg.steps.value_or(default_steps);
    if (steps < 2) throw ConfigError("--steps must be at least 2");
    if (!(lo < hi)) throw ConfigError("--kappa-min must be below --kappa-max");
    std::vector<double> g;
    for (int k = 0; k < steps; ++k) g.push_back(k == steps - 1 ? hi : lo + (hi - lo) * k / (steps - 1));
    return g;
}

inline std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Subsystem split for negativity: --split if given, else the smallest
// factor d1 >= 2 with d2 = d/d1 >= 2. None for prime d.
inline std::optional<Index> resolve_split(const RunConfig& cfg, Index d) {
    if (cfg.split) {
        if (*cfg.split < 2 || d % *cfg.split != 0 || d / *cfg.split < 2)
            throw ConfigError("--split " + std::to_string(*cfg.split) + " does not factor d = " + std::to_string(d));
        return cfg.split;
    }
    for (Index a = 2; a * a <= d; ++a)
        if (d % a == 0) return a;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// optimal
// ---------------------------------------------------------------------------

inline void cmd_optimal(const RunConfig& cfg, std::ostream& csv) {
    const Hamiltonian h = resolve_hamiltonian(cfg);
    const Index d = h.dim();
    const std::vector<double> grid = kappa_grid(cfg, d, 50);
    const std::optional<Index> split = resolve_split(cfg, d);
    const RegimeParams params = regime_params(h);

    csv << "kappa,regime,v2_opt,v2_wy_of_opt,l1_coherence,negativity,split_d1,concurrence,rank";
    for (Index i = 0; i < d; ++i) csv << ",anti" << i + 1 << "_re,anti" << i + 1 << "_im";
    csv << '\n';
    for (double k : grid) {
        const OptimalState s = optimal_state(h, k, cfg.theta1, cfg.theta2, params);
        csv << fmt(s.kappa) << ',' << to_string(s.regime) << ',' << fmt(squared_speed(h, s.state)) << ','
            << fmt(wy_squared_speed(h, s)) << ',' << fmt(l1_coherence(s.state)) << ',';
        if (split)
            csv << fmt(negativity(s.state, *split, d / *split)) << ',' << *split;
        else
            csv << ',';
        csv << ',';
        if (d == 4) csv << fmt(concurrence_two_qubit(s.state));
        csv << ',' << numerical_rank(s.state.matrix());
        for (Index i = 0; i < d; ++i) {
            const Complex z = s.state(i, d - 1 - i);
            csv << ',' << fmt(z.real()) << ',' << fmt(z.imag());
        }
        csv << '\n';
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

inline SimulationResult cmd_simulate(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
    const Hamiltonian h = resolve_hamiltonian(cfg);
    if (cfg.samples < 1) throw ConfigError("--samples must be at least 1");
    if (cfg.kappa || cfg.kappa_min || cfg.kappa_max || cfg.steps) throw ConfigError("simulate does not take purity flags");
    SimulationConfig sc;
    sc.samples = cfg.samples;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    SimulationResult r = run_simulation(h, sc);

    csv << "purity,v2_euclid,v2_wy,l1_coherence\n";
    for (const SimulationRow& row : r.rows)
        csv << fmt(row.purity) << ',' << fmt(row.v2_euclid) << ',' << fmt(row.v2_wy) << ',' << fmt(row.l1_coherence) << '\n';

    summary << "bin_lo,bin_hi,count,max_excess,supremacy_violations,wy_exceedances\n";
    for (const PurityBin& b : r.bins) {
        summary << fmt(b.lo) << ',' << fmt(b.hi) << ',' << b.count << ',' << (b.count ? fmt(b.max_excess) : std::string())
                << ',' << b.supremacy_violations << ',' << b.wy_exceedances << '\n';
    }
    summary << "# samples=" << r.rows.size() << " max_excess=" << fmt(r.max_excess)
            << " supremacy_violations=" << r.supremacy_violations << " wy_exceedances=" << r.wy_exceedances << '\n';
    return r;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckOutcome {
    std::string name;
    double kappa = std::nan("");
    bool pass = false;
    std::string detail;
};

namespace detail {

// Grid plus every band edge below 1 and the midpoint of each band.
inline std::vector<double> verify_points(const std::vector<double>& grid, const RegimeParams& p) {
    std::vector<double> edges{1.0 / static_cast<double>(p.dim), p.kappa0};
    if (p.has_mid_band()) {
        edges.push_back(p.kappa1);
        edges.push_back(p.kappa2);
    }
    edges.push_back(1.0);
    std::vector<double> pts = grid;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] < 1.0) pts.push_back(edges[i]);
        if (i + 1 < edges.size() && edges[i + 1] > edges[i]) pts.push_back(0.5 * (edges[i] + edges[i + 1]));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), pts.end());
    return pts;
}

inline CheckOutcome run_check(const std::string& name, double kappa, const std::function<std::string()>& body) {
    CheckOutcome c{name, kappa, false, {}};
    try {
        c.detail = body();
        c.pass = true;
    } catch (const CheckFailure& f) {
        c.detail = f.what();
    } catch (const Error& e) {
        c.detail = e.what();
    }
    return c;
}

}  // namespace detail

/// Runs closed-form, multiplier, oracle, structure and resource checks over a
/// purity grid. Writes one line per check and returns 0 iff all pass.
inline int cmd_verify(const RunConfig& cfg, std::ostream& report) {
    const Hamiltonian h = resolve_hamiltonian(cfg);
    const Index d = h.dim();
    if (cfg.restarts < 1) throw ConfigError("--restarts must be at least 1");
    const RegimeParams truth = regime_params(h);
    RegimeParams params = truth;
    params.kappa1 += cfg.perturb_kappa1;
    const double w2 = truth.omega_1d * truth.omega_1d;
    const std::vector<double> points = detail::verify_points(kappa_grid(cfg, d, 15), params);

    std::vector<CheckOutcome> out;
    for (double k : points) {
        std::optional<OptimalState> s;
        out.push_back(detail::run_check("state", k, [&] {
            s = optimal_state(h, k, cfg.theta1, cfg.theta2, params);
            if (!is_persymmetric_x(s->state.matrix(), 1e-12)) throw CheckFailure("not a persymmetric X-state");
            return std::string(to_string(s->regime));
        }));
        if (!s) continue;

        if (s->regime != Regime::TopBand && s->regime != Regime::NumericFallback)
            out.push_back(detail::run_check("kkt", k, [&] {
                const KktReport r = kkt_check(h, *s, false);
                if (!r.ok()) {
                    const KktViolationEntry& v = r.violations.front();
                    throw CheckFailure(v.condition + " at (" + std::to_string(v.row + 1) + "," + std::to_string(v.col + 1) +
                                       "), mu=" + fmt(r.mu));
                }
                return "mu=" + fmt(r.mu);
            }));

        out.push_back(detail::run_check("oracle", k, [&] {
            OracleOptions opt;
            opt.restarts = cfg.restarts;
            opt.threads = cfg.threads;
            opt.ansatz = d <= 4 ? Ansatz::Full : Ansatz::PersymX;
            const OracleResult r = max_speed_bruteforce(h, k, opt, cfg.seed);
            const double closed = squared_speed(h, s->state);
            const double gap = r.best_speed_sq - closed;
            std::string detail = "oracle=" + fmt(r.best_speed_sq) + " closed=" + fmt(closed);
            if (std::abs(gap) > 1e-5 * closed + 1e-12 * w2) throw CheckFailure(detail);
            if (d <= 4) {
                const StructureReport sr = measure_x_structure(r.argmax.matrix());
                detail += " offX=" + fmt(sr.max_off_x) + " persym=" + fmt(sr.persymmetry_residual);
                if (sr.max_off_x > structure_tolerance || sr.persymmetry_residual > structure_tolerance) throw CheckFailure(detail);
            }
            return detail;
        }));

        if (d == 4)
            out.push_back(detail::run_check("resources", k, [&] {
                const double c = concurrence_two_qubit(s->state);
                const double cc = concurrence_optimal_closed(*s);
                const double n = negativity(s->state, 2, 2);
                const std::string detail = "C=" + fmt(c) + " closed=" + fmt(cc) + " N=" + fmt(n);
                if (std::abs(c - cc) > 1e-10 || std::abs(cc - n) > 1e-10) throw CheckFailure(detail);
                return detail;
            }));
    }

    // Adjacent band formulas must agree at each shared edge.
    std::vector<std::pair<double, std::pair<Regime, Regime>>> edges;
    if (d > 2) edges.push_back({params.kappa0, {Regime::LowPurity, Regime::OuterBand}});
    if (params.has_mid_band()) {
        edges.push_back({params.kappa1, {Regime::OuterBand, Regime::MidBand}});
        if (d == 4) edges.push_back({params.kappa2, {Regime::MidBand, Regime::TopBand}});
    }
    for (const auto& [k, pair] : edges) {
        if (k >= 1.0) continue;
        out.push_back(detail::run_check("continuity", k, [&, k = k, pair = pair] {
            const Matrix a = band_formula(h, k, pair.first, cfg.theta1, cfg.theta2, params);
            const Matrix b = band_formula(h, k, pair.second, cfg.theta1, cfg.theta2, params);
            const double diff = (a - b).cwiseAbs().maxCoeff();
            const std::string detail = std::string(to_string(pair.first)) + "/" + std::string(to_string(pair.second)) +
                                       " max|diff|=" + fmt(diff);
            if (diff > 1e-10) throw CheckFailure(detail);
            return detail;
        }));
    }

    int failed = 0;
    report << "check,kappa,status,detail\n";
    for (const CheckOutcome& c : out) {
        report << c.name << ',' << fmt(c.kappa) << ',' << (c.pass ? "PASS" : "FAIL") << ",\"" << c.detail << "\"\n";
        failed += c.pass ? 0 : 1;
    }
    report << "# " << out.size() - static_cast<std::size_t>(failed) << " passed, " << failed << " failed\n";
    return failed == 0 ? exit_ok : exit_check_failed;
}

/// Maps exceptions escaping a command to exit codes, printing the message.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace qspeed::cli
