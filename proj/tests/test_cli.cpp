#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "qspeed/commands.hpp"

using namespace qspeed;
using namespace qspeed::cli;

namespace {

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QSPEED_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Optimal, HeaderAndEndpoints) {
    RunConfig cfg;
    cfg.dim = 2;
    std::ostringstream csv;
    cmd_optimal(cfg, csv);
    const std::vector<std::string> l = lines(csv.str());
    ASSERT_EQ(l.size(), 51u);
    EXPECT_EQ(l[0], "kappa,regime,v2_opt,v2_wy_of_opt,l1_coherence,negativity,split_d1,concurrence,rank,anti1_re,anti1_im,anti2_re,anti2_im");
    const std::vector<std::string> first = fields(l[1]), last = fields(l.back());
    EXPECT_EQ(first[0], "0.5");
    EXPECT_EQ(first[2], "0");
    EXPECT_EQ(last[0], "1");
    EXPECT_NEAR(std::stod(last[2]), 0.5, 1e-15);
    EXPECT_EQ(csv.str().find("-0,"), std::string::npos);
}

TEST(Optimal, CoherencePlateauOnPreset) {
    RunConfig cfg;
    cfg.preset = "gamma-lt2";
    cfg.kappa_min = 5.0 / 9.0;
    cfg.steps = 5;
    std::ostringstream csv;
    cmd_optimal(cfg, csv);
    const std::vector<std::string> l = lines(csv.str());
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_NEAR(std::stod(fields(l[i])[4]), 1.0, 1e-10);
}

TEST(Optimal, ByteIdenticalReruns) {
    RunConfig cfg;
    cfg.preset = "gamma-ge2";
    std::ostringstream a, b;
    cmd_optimal(cfg, a);
    cmd_optimal(cfg, b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Simulate, SingleSampleAndThreadInvariance) {
    RunConfig cfg;
    cfg.preset = "gamma-lt2";
    cfg.samples = 1;
    std::ostringstream csv, summary;
    cmd_simulate(cfg, csv, summary);
    EXPECT_EQ(lines(csv.str()).size(), 2u);

    cfg.samples = 2000;
    std::ostringstream a, sa, b, sb;
    cmd_simulate(cfg, a, sa);
    cfg.threads = 4;
    cmd_simulate(cfg, b, sb);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NE(sa.str().find("supremacy_violations=0"), std::string::npos);
}

TEST(Verify, PassesAndCatchesWrongThreshold) {
    RunConfig cfg;
    cfg.dim = 3;
    cfg.restarts = 8;
    std::ostringstream ok;
    EXPECT_EQ(cmd_verify(cfg, ok), exit_ok);
    EXPECT_NE(ok.str().find(" 0 failed"), std::string::npos);

    RunConfig bad;
    bad.preset = "gamma-lt2";
    bad.restarts = 8;
    bad.perturb_kappa1 = 0.02;
    std::ostringstream rep;
    EXPECT_EQ(cmd_verify(bad, rep), exit_check_failed);
    EXPECT_NE(rep.str().find("kkt,"), std::string::npos);
    EXPECT_NE(rep.str().find("FAIL"), std::string::npos);
}

TEST(Config, ErrorsMapToExitTwo) {
    std::ostringstream err;
    auto code = [&](RunConfig cfg) {
        return guarded([&] {
            std::ostringstream sink;
            cmd_optimal(cfg, sink);
            return exit_ok;
        }, err);
    };
    RunConfig unknown;
    unknown.preset = "nope";
    EXPECT_EQ(code(unknown), exit_config);
    RunConfig mismatch;
    mismatch.dim = 3;
    mismatch.energies = {0.0, 1.0};
    EXPECT_EQ(code(mismatch), exit_config);
    RunConfig unsorted;
    unsorted.energies = {0.0, 2.0, 1.0};
    EXPECT_EQ(code(unsorted), exit_config);
    RunConfig split;
    split.dim = 3;
    split.split = 2;
    EXPECT_EQ(code(split), exit_config);
    RunConfig range;
    range.kappa = 0.1;
    EXPECT_EQ(code(range), exit_config);
    EXPECT_EQ(guarded([]() -> int { throw Error(ErrorCode::NoConvergence, "x"); }, err), exit_numerical);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_cli("optimal --dim 3 --steps 4"), 0);
    EXPECT_EQ(run_cli("optimal --no-such-flag"), 2);
    EXPECT_EQ(run_cli("optimal --preset nope"), 2);
    EXPECT_EQ(run_cli("simulate --samples 0"), 2);
    EXPECT_EQ(run_cli("verify --dim 2 --restarts 4"), 0);
    EXPECT_EQ(run_cli("verify --preset gamma-lt2 --restarts 4 --perturb-kappa1 0.02"), 1);
}

TEST(Binary, OutputFileMatchesLibrary) {
    const std::string path = ::testing::TempDir() + "qspeed_cli_out.csv";
    ASSERT_EQ(run_cli("optimal --preset gamma-lt2 --steps 7 --out " + path), 0);
    RunConfig cfg;
    cfg.preset = "gamma-lt2";
    cfg.steps = 7;
    std::ostringstream expected;
    cmd_optimal(cfg, expected);
    EXPECT_EQ(slurp(path), expected.str());
    std::remove(path.c_str());
}
