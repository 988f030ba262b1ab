#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "qspeed/commands.hpp"

namespace {

using qspeed::cli::RunConfig;

// Output goes to --out when given, else stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw qspeed::cli::ConfigError("cannot open " + path + " for writing");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& out) {
    cmd->add_option("--dim", cfg.dim, "Dimension d (default 4, levels 0..d-1)");
    cmd->add_option("--energies", cfg.energies, "Explicit nondecreasing energy levels")->delimiter(',');
    cmd->add_option("--preset", cfg.preset, "Reference d=4 spectrum: gamma-lt2 or gamma-ge2");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Output file (default stdout)");
}

void add_purity(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--kappa", cfg.kappa, "Single purity");
    cmd->add_option("--kappa-min", cfg.kappa_min, "Grid start (default 1/d)");
    cmd->add_option("--kappa-max", cfg.kappa_max, "Grid end (default 1)");
    cmd->add_option("--steps", cfg.steps, "Grid points");
    cmd->add_option("--theta1", cfg.theta1, "Phase of rho_1d");
    cmd->add_option("--theta2", cfg.theta2, "Phase of rho_{2,d-1}");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximal quantum speed at fixed purity"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out;
    std::string summary_path;

    CLI::App* optimal = app.add_subcommand("optimal", "Maximal-speed states over a purity grid (CSV)");
    add_common(optimal, cfg, out);
    add_purity(optimal, cfg);
    optimal->add_option("--split", cfg.split, "d1 of the d1 x d2 split used for negativity");

    CLI::App* simulate = app.add_subcommand("simulate", "Random states against the maximal-speed curve (CSV)");
    add_common(simulate, cfg, out);
    simulate->add_option("--samples", cfg.samples, "Number of random states")->check(CLI::PositiveNumber);
    simulate->add_option("--summary", summary_path, "Per-bin summary CSV (default stderr)");

    CLI::App* verify = app.add_subcommand("verify", "Check closed forms against the oracle and invariants");
    add_common(verify, cfg, out);
    add_purity(verify, cfg);
    verify->add_option("--restarts", cfg.restarts, "Oracle restarts per purity")->check(CLI::PositiveNumber);
    verify->add_option("--perturb-kappa1", cfg.perturb_kappa1)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qspeed::cli::exit_config;
    }

    return qspeed::cli::guarded(
        [&] {
            Sink sink(out);
            if (*optimal) {
                qspeed::cli::cmd_optimal(cfg, sink.stream());
                return qspeed::cli::exit_ok;
            }
            if (*simulate) {
                Sink summary(summary_path);
                qspeed::cli::cmd_simulate(cfg, sink.stream(), summary_path.empty() ? std::cerr : summary.stream());
                return qspeed::cli::exit_ok;
            }
            return qspeed::cli::cmd_verify(cfg, sink.stream());
        },
        std::cerr);
}
