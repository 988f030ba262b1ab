#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace qspeed;
using namespace qspeed::test;

TEST(Simplex, NormalizedAndUniform) {
    Engine rng(42);
    EXPECT_EQ(sample_simplex(1, rng)(0), 1.0);
    const int n = 100000;
    RealVector mean = RealVector::Zero(4);
    double mean_purity = 0.0;
    for (int t = 0; t < n; ++t) {
        const RealVector p = sample_simplex(4, rng);
        EXPECT_NEAR(p.sum(), 1.0, 1e-14);
        EXPECT_GE(p.minCoeff(), 0.0);
        mean += p;
        mean_purity += p.squaredNorm();
    }
    mean /= n;
    mean_purity /= n;
    // Dirichlet(1,1,1,1): Var p_k = 3/80, E sum p^2 = 2/5.
    const double sigma = std::sqrt(3.0 / 80.0 / n);
    for (Index k = 0; k < 4; ++k) EXPECT_NEAR(mean(k), 0.25, 4.0 * sigma);
    EXPECT_NEAR(mean_purity, 0.4, 2e-3);
}

TEST(Haar, UnitaryAndFirstMoment) {
    Engine rng(43);
    const int n = 20000;
    double m = 0.0, m2 = 0.0;
    for (int t = 0; t < n; ++t) {
        const Matrix u = sample_haar_unitary(4, rng);
        if (t < 1000) { EXPECT_LE(max_abs(u.adjoint() * u - Matrix::Identity(4, 4)), 1e-12); }
        const double a = std::norm(u(0, 0));
        m += a;
        m2 += a * a;
    }
    m /= n;
    m2 /= n;
    // |U_11|^2 ~ Beta(1, d-1): mean 1/4, second moment 2/(d(d+1)) = 1/10.
    const double sigma = std::sqrt((0.1 - 0.0625) / n);
    EXPECT_NEAR(m, 0.25, 4.0 * sigma);
    EXPECT_NEAR(m2, 0.1, 3e-3);
}

TEST(Haar, EigenphasesAreUniform) {
    Engine rng(44);
    const int bins = 20;
    std::vector<double> count(bins, 0.0);
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        Eigen::ComplexEigenSolver<Matrix> es(sample_haar_unitary(4, rng));
        for (Index k = 0; k < 4; ++k) {
            const double phase = std::arg(es.eigenvalues()(k)) + M_PI;
            count[std::min(bins - 1, static_cast<int>(phase / (2.0 * M_PI) * bins))] += 1.0;
        }
    }
    const double expected = 4.0 * draws / bins;
    double chi2 = 0.0;
    for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 36.19);  // 19 degrees of freedom, p = 0.01
}

TEST(Haar, NoPhaseBiasInRotatedStates) {
    // Without the R-diagonal phase fix the entries of U rho U^† pick up a
    // preferred phase; check the mean coherence vanishes.
    Engine rng(45);
    Complex acc(0.0, 0.0);
    const int n = 20000;
    RealVector p(2);
    p << 0.9, 0.1;
    for (int t = 0; t < n; ++t) acc += rotate_spectrum(p, sample_haar_unitary(2, rng))(0, 1);
    EXPECT_LT(std::abs(acc) / n, 0.01);
}

TEST(Density, ValidAndDeterministic) {
    Engine a(5), b(5), c(6);
    for (int t = 0; t < 100; ++t) {
        const DensityMatrix x = sample_density(4, a);
        const DensityMatrix y = sample_density(4, b);
        const DensityMatrix z = sample_density(4, c);
        EXPECT_EQ(x.matrix(), y.matrix());
        EXPECT_NE(x.matrix(), z.matrix());
        EXPECT_GE(purity(x), 0.25 - 1e-12);
    }
}

TEST(Batch, StreamLayoutAndValidation) {
    SamplerConfig cfg;
    cfg.dim = 3;
    cfg.n_diag = 5;
    cfg.n_unitary = 7;
    EXPECT_EQ(cfg.total(), 35u);
    const std::vector<DensityMatrix> a = sample_spectrum_batch(cfg, 2);
    const std::vector<DensityMatrix> b = sample_spectrum_batch(cfg, 2);
    const std::vector<DensityMatrix> c = sample_spectrum_batch(cfg, 3);
    ASSERT_EQ(a.size(), 7u);
    for (std::size_t u = 0; u < a.size(); ++u) {
        EXPECT_EQ(a[u].matrix(), b[u].matrix());
        EXPECT_NEAR(purity(a[u]), purity(a[0]), 1e-12);  // shared spectrum
    }
    EXPECT_NE(a[0].matrix(), c[0].matrix());
    cfg.n_unitary = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(Simulation, RowsFollowTheSamplerLayout) {
    SimulationConfig sc;
    sc.samples = 250;
    sc.unitaries_per_spectrum = 100;
    const SimulationResult r = run_simulation(gamma_lt2(), sc);
    SamplerConfig cfg;
    cfg.dim = 4;
    cfg.seed = sc.seed;
    cfg.n_unitary = 100;
    const std::vector<DensityMatrix> batch = sample_spectrum_batch(cfg, 2);
    for (std::uint64_t u = 0; u < 50; ++u)
        EXPECT_EQ(r.rows[200 + u].v2_euclid, squared_speed(gamma_lt2(), batch[u]));
}

TEST(Simulation, IndependentOfThreadCountAndPrefix) {
    SimulationConfig sc;
    sc.samples = 3000;
    const SimulationResult one = run_simulation(gamma_ge2(), sc);
    sc.threads = 3;
    const SimulationResult three = run_simulation(gamma_ge2(), sc);
    sc.samples = 1234;
    const SimulationResult prefix = run_simulation(gamma_ge2(), sc);
    for (std::size_t n = 0; n < one.rows.size(); ++n) {
        EXPECT_EQ(one.rows[n].v2_euclid, three.rows[n].v2_euclid);
        EXPECT_EQ(one.rows[n].v2_wy, three.rows[n].v2_wy);
        if (n < prefix.rows.size()) { EXPECT_EQ(one.rows[n].purity, prefix.rows[n].purity); }
    }
    EXPECT_EQ(one.supremacy_violations, 0u);
}

TEST(Simulation, InvariantUnderEnergyShift) {
    SimulationConfig sc;
    sc.samples = 2000;
    const SimulationResult a = run_simulation(Hamiltonian({0.0, 1.0, 2.0, 3.0}), sc);
    const SimulationResult b = run_simulation(Hamiltonian({3.0, 4.0, 5.0, 6.0}), sc);
    for (std::size_t n = 0; n < a.rows.size(); ++n) {
        EXPECT_EQ(a.rows[n].v2_euclid, b.rows[n].v2_euclid);
        EXPECT_EQ(a.rows[n].v2_opt, b.rows[n].v2_opt);
    }
}

TEST(Simulation, BinsCoverThePurityRange) {
    SimulationConfig sc;
    sc.samples = 1000;
    const SimulationResult r = run_simulation(gamma_lt2(), sc);
    ASSERT_EQ(r.bins.size(), 30u);
    EXPECT_NEAR(r.bins.front().lo, 0.25, 1e-15);
    EXPECT_NEAR(r.bins.back().hi, 1.0, 1e-12);
    std::uint64_t total = 0;
    for (const PurityBin& b : r.bins) total += b.count;
    EXPECT_EQ(total, 1000u);
    sc.samples = 0;
    EXPECT_THROW(run_simulation(gamma_lt2(), sc), Error);
}
