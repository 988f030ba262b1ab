#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace qspeed;
using namespace qspeed::test;

namespace {

OracleResult run(const Hamiltonian& h, double k, Ansatz a, int restarts = 16, int threads = 1) {
    OracleOptions opt;
    opt.ansatz = a;
    opt.restarts = restarts;
    opt.threads = threads;
    return max_speed_bruteforce(h, k, opt, 42);
}

}  // namespace

TEST(ProjectSpectrum, LandsOnTheFeasibleSet) {
    Engine rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        RealVector y(5);
        for (Index k = 0; k < 5; ++k) y(k) = n(rng);
        const double kappa = 0.2 + 0.8 * (t % 50) / 49.0;
        const std::optional<RealVector> p = project_spectrum(y, kappa);
        ASSERT_TRUE(p);
        EXPECT_NEAR(p->sum(), 1.0, 1e-12);
        EXPECT_NEAR(p->squaredNorm(), kappa, 1e-12);
        EXPECT_GE(p->minCoeff(), 0.0);
    }
    EXPECT_NEAR(reference_spectrum(4, 0.6).squaredNorm(), 0.6, 1e-14);
}

TEST(Oracle, ReferenceValues) {
    EXPECT_NEAR(run(ladder(2), 0.75, Ansatz::Full).best_speed_sq, 0.25, 1e-6);
    EXPECT_NEAR(run(gamma_lt2(), 0.25, Ansatz::Full).best_speed_sq, 0.0, 1e-12);
    const double closed = optimal_speed(gamma_lt2(), 0.53);
    EXPECT_NEAR(run(gamma_lt2(), 0.53, Ansatz::Full).best_speed_sq, closed, 1e-6 * closed);
}

TEST(Oracle, AgreesWithClosedForm) {
    for (const Hamiltonian& h : {ladder(2), ladder(3), gamma_lt2(), gamma_ge2()})
        for (double t : {0.1, 0.4, 0.7, 0.95}) {
            const double k = 1.0 / h.dim() + t * (1.0 - 1.0 / h.dim());
            const double closed = optimal_speed(h, k);
            for (Ansatz a : {Ansatz::Full, Ansatz::PersymX}) {
                const OracleResult r = run(h, k, a);
                EXPECT_NEAR(r.best_speed_sq, closed, 1e-5 * closed) << h.dim() << " " << k;
                EXPECT_LE(r.best_speed_sq, closed + 1e-9);
                EXPECT_LE(r.constraint_residual, oracle_constraint_tolerance);
            }
        }
}

TEST(Oracle, StructureOfTheArgmax) {
    EXPECT_NO_THROW(verify_x_structure(ladder(3), 0.7, 16, 1));
    const StructureReport ge = verify_x_structure(gamma_ge2(), 0.6, 16, 1);
    EXPECT_LE(std::abs(ge.oracle.argmax(1, 2)), 1e-5);
    const StructureReport lt = verify_x_structure(gamma_lt2(), 0.53, 16, 1);
    EXPECT_NEAR(std::abs(lt.oracle.argmax(1, 2)), std::sqrt(0.015), 1e-4);
    try {
        verify_x_structure(ladder(5), 0.5, 4, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotApplicable);
    }
}

TEST(Oracle, MeasureDetectsNonXEntries) {
    Matrix m = optimal_state(gamma_lt2(), 0.6).state.matrix();
    EXPECT_EQ(measure_x_structure(m).max_off_x, 0.0);
    m(0, 1) = m(1, 0) = 0.01;
    const StructureReport r = measure_x_structure(m);
    EXPECT_NEAR(r.max_off_x, 0.01, 1e-15);
    EXPECT_FALSE(r.offending.empty());
}

TEST(Oracle, DeterministicAcrossThreads) {
    const OracleResult a = run(gamma_lt2(), 0.7, Ansatz::Full, 8, 1);
    const OracleResult b = run(gamma_lt2(), 0.7, Ansatz::Full, 8, 4);
    const OracleResult c = run(gamma_lt2(), 0.7, Ansatz::Full, 8, 1);
    EXPECT_EQ(a.best_speed_sq, b.best_speed_sq);
    EXPECT_EQ(a.best_speed_sq, c.best_speed_sq);
    EXPECT_EQ(a.argmax.matrix(), c.argmax.matrix());
}

TEST(Oracle, LargerDimensionsAgreeWithClosedForm) {
    for (Index d : {5, 6}) {
        const Hamiltonian h = ladder(d);
        for (double k : {0.4, 0.8}) {
            const double closed = optimal_speed(h, k);
            EXPECT_NEAR(run(h, k, Ansatz::PersymX).best_speed_sq, closed, 1e-5 * closed) << d << " " << k;
        }
    }
}

TEST(Oracle, InputErrors) {
    EXPECT_THROW(run(gamma_lt2(), 0.2, Ansatz::Full), Error);
    EXPECT_THROW(run(gamma_lt2(), 0.5, Ansatz::Full, 0), Error);
}
