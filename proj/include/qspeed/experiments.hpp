#pragma once

// Monte-Carlo comparison of random states against the maximal-speed curve.
//
// Draw n of a run is unitary n % n_unitary of spectrum n / n_unitary in the
// sampler stream layout, so the first N draws are the same for every
// sample count and thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "qspeed/optimal.hpp"
#include "qspeed/resources.hpp"
#include "qspeed/sampling.hpp"
#include "qspeed/speed.hpp"

namespace qspeed {

struct SimulationConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 42;
    std::uint64_t unitaries_per_spectrum = 100;
    double bin_width = 0.025;
    int threads = 1;
};

struct SimulationRow {
    double purity = 0.0;
    double v2_euclid = 0.0;
    double v2_wy = 0.0;
    double l1_coherence = 0.0;
    double v2_opt = 0.0;     // maximal speed at this purity
    double v2_wy_opt = 0.0;  // WY speed of the maximal-speed state, NaN when not closed form
};

struct PurityBin {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
    double max_excess = -std::numeric_limits<double>::infinity();  // max(v2 - v2_opt)
    std::uint64_t supremacy_violations = 0;                        // v2 > v2_opt + 1e-9
    std::uint64_t wy_exceedances = 0;                              // v2_wy > v2_wy_opt
};

struct SimulationResult {
    std::vector<SimulationRow> rows;
    std::vector<PurityBin> bins;
    double max_excess = -std::numeric_limits<double>::infinity();
    std::uint64_t supremacy_violations = 0;
    std::uint64_t wy_exceedances = 0;
};

inline constexpr double supremacy_tolerance = 1e-9;

/// Maximal speed and its WY value at arbitrary purities of one Hamiltonian.
/// Closed-form bands are evaluated exactly. Where only the numeric optimum
/// exists, the speed is taken at the upper edge of the purity bin, which
/// bounds it from above because the maximal speed increases with purity.
class OptimalCurve {
public:
    OptimalCurve(const Hamiltonian& h, double bin_width) : h_(h), params_(regime_params(h)), bin_width_(bin_width) {
        const Index d = h.dim();
        if (params_.has_mid_band() && d > 4) {
            const double lo = 1.0 / static_cast<double>(d);
            const std::size_t n = bin_count(d, bin_width);
            for (std::size_t b = 0; b < n; ++b) {
                const double hi = std::min(1.0, lo + bin_width * static_cast<double>(b + 1));
                edge_speed_.push_back(hi > params_.kappa2 ? optimal_speed(h, hi) : 0.0);
            }
        }
    }

    static std::size_t bin_count(Index d, double width) {
        const double span = 1.0 - 1.0 / static_cast<double>(d);
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / width - 1e-12)));
    }

    std::size_t bin_of(double kappa) const {
        const double lo = 1.0 / static_cast<double>(h_.dim());
        const double t = (kappa - lo) / bin_width_;
        const std::size_t n = bin_count(h_.dim(), bin_width_);
        return std::min(n - 1, static_cast<std::size_t>(std::max(0.0, t)));
    }

    /// (v2_opt, v2_wy_opt).
    std::pair<double, double> at(double kappa) const {
        const double k = detail::normalized_purity(h_.dim(), kappa);
        if (classify(params_, k) == Regime::NumericFallback)
            return {edge_speed_.at(bin_of(k)), std::numeric_limits<double>::quiet_NaN()};
        const OptimalState s = optimal_state(h_, k, 0.0, 0.0, params_);
        return {squared_speed(h_, s.state), wy_squared_speed(h_, s)};
    }

private:
    Hamiltonian h_;
    RegimeParams params_;
    double bin_width_;
    std::vector<double> edge_speed_;
};

inline SimulationResult run_simulation(const Hamiltonian& h, const SimulationConfig& cfg) {
    if (cfg.samples < 1) throw Error(ErrorCode::OutOfRange, "run_simulation: samples must be >= 1");
    if (!(cfg.bin_width > 0.0)) throw Error(ErrorCode::OutOfRange, "run_simulation: bin width must be positive");
    const Index d = h.dim();
    SamplerConfig sc;
    sc.dim = d;
    sc.seed = cfg.seed;
    sc.n_unitary = cfg.unitaries_per_spectrum;
    sc.n_diag = (cfg.samples + sc.n_unitary - 1) / sc.n_unitary;
    sc.validate();

    const OptimalCurve curve(h, cfg.bin_width);
    SimulationResult out;
    out.rows.resize(cfg.samples);

    auto work = [&](std::uint64_t spectrum) {
        Engine rng = derive_stream(sc.seed, spectrum);
        const RealVector p = sample_simplex(d, rng);
        for (std::uint64_t u = 0; u < sc.n_unitary; ++u) {
            const std::uint64_t n = spectrum * sc.n_unitary + u;
            if (n >= cfg.samples) return;
            const DensityMatrix rho = rotate_spectrum(p, sample_haar_unitary(d, rng));
            SimulationRow& row = out.rows[n];
            row.purity = purity(rho);
            row.v2_euclid = squared_speed(h, rho);
            row.v2_wy = wy_squared_speed(h, rho);
            row.l1_coherence = l1_coherence(rho);
            std::tie(row.v2_opt, row.v2_wy_opt) = curve.at(row.purity);
        }
    };
    const int workers = static_cast<int>(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(cfg.threads, 1)), 1, sc.n_diag));
    if (workers == 1) {
        for (std::uint64_t s = 0; s < sc.n_diag; ++s) work(s);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t s = static_cast<std::uint64_t>(t); s < sc.n_diag; s += static_cast<std::uint64_t>(workers)) work(s);
            });
        for (std::thread& th : pool) th.join();
    }

    const double lo = 1.0 / static_cast<double>(d);
    const std::size_t nbins = OptimalCurve::bin_count(d, cfg.bin_width);
    out.bins.resize(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        out.bins[b].lo = lo + cfg.bin_width * static_cast<double>(b);
        out.bins[b].hi = std::min(1.0, lo + cfg.bin_width * static_cast<double>(b + 1));
    }
    for (const SimulationRow& row : out.rows) {
        PurityBin& bin = out.bins[curve.bin_of(row.purity)];
        const double excess = row.v2_euclid - row.v2_opt;
        ++bin.count;
        bin.max_excess = std::max(bin.max_excess, excess);
        if (excess > supremacy_tolerance) ++bin.supremacy_violations;
        if (!std::isnan(row.v2_wy_opt) && row.v2_wy > row.v2_wy_opt) ++bin.wy_exceedances;
    }
    for (const PurityBin& bin : out.bins) {
        out.max_excess = std::max(out.max_excess, bin.max_excess);
        out.supremacy_violations += bin.supremacy_violations;
        out.wy_exceedances += bin.wy_exceedances;
    }
    return out;
}

}  // namespace qspeed
