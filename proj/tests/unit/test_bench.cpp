#include <gtest/gtest.h>

#include <cmath>

#include "hyperid/bench.hpp"
#include "hyperid/io.hpp"

using namespace hyperid;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.windows = {100, 200};
    c.trials = 6;
    c.threads = 1;
    return c;
}

}  // namespace

TEST(ExperimentConfig, Validation) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    c.trials = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig{};
    c.windows = {5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.windows = {10001};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig{};
    c.lambda = -1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunTrial, NoiselessPolynomialRecovery) {
    ExperimentConfig c;
    c.model = constant_acceleration(-9.81, 0.0, 5.0, 1.0);
    c.n = 1200;
    c.noise = NoiseModel::none();
    c.lambda = 1e-8;
    const auto rec = run_trial(c, 60, 0);
    EXPECT_NEAR(rec.theta_hat(0), -9.81, 1e-6);
    EXPECT_NEAR(rec.error(0), 0.0, 1e-6);
}

TEST(RunTrial, ReferenceModelSingleTrial) {
    const ExperimentConfig c;
    const auto rec = run_trial(c, 200, 0);
    EXPECT_EQ(rec.seed, trial_seed(c.seed, 0));
    EXPECT_LT(std::abs(rec.theta_hat(0) - 40.0), 5.0);
    EXPECT_LT(std::abs(rec.theta_hat(1) + 400.0), 25.0);
    EXPECT_GT(rec.sigma_min_phi_hat, 0.0);
    EXPECT_EQ(rec.error, rec.theta_hat - c.model.theta);
}

TEST(RunTrial, WindowOutsideRange) {
    const ExperimentConfig c;
    EXPECT_THROW(run_trial(c, 10001, 0), std::invalid_argument);
    EXPECT_THROW(run_trial(c, 3, 0), std::invalid_argument);
}

TEST(RunTrial, SharedTrajectoryGivesSameRecord) {
    const ExperimentConfig c;
    const auto traj = integrate(c.model, c.n, c.substeps);
    const auto a = run_trial(c, 100, 3);
    const auto b = run_trial(c, traj, 100, 3);
    EXPECT_EQ(a.theta_hat, b.theta_hat);
}

TEST(MonteCarlo, SingleTrialRmseIsAbsoluteError) {
    auto c = small_config();
    c.trials = 1;
    const auto res = monte_carlo(c);
    ASSERT_EQ(res.summaries.size(), 2u);
    for (std::size_t w = 0; w < 2; ++w) {
        const auto& s = res.summaries[w];
        const auto& r = res.records[w];
        EXPECT_EQ(s.window, r.window);
        for (int k = 0; k < 2; ++k) EXPECT_DOUBLE_EQ(s.rmse(k), std::abs(r.error(k)));
        EXPECT_DOUBLE_EQ(s.vector_rmse, r.error.norm());
        EXPECT_DOUBLE_EQ(s.vector_mse, r.error.squaredNorm());
        EXPECT_DOUBLE_EQ(s.rrmse(1), s.rmse(1) / 400.0);
        EXPECT_EQ(s.variance(0), 0.0);
    }
}

TEST(MonteCarlo, RecordsAreOrderedAndSummariesConsistent) {
    const auto res = monte_carlo(small_config());
    ASSERT_EQ(res.records.size(), 12u);
    for (std::size_t k = 0; k < res.records.size(); ++k) {
        EXPECT_EQ(res.records[k].window, k < 6 ? 100 : 200);
        EXPECT_EQ(res.records[k].trial, static_cast<int>(k % 6));
    }
    for (const auto& s : res.summaries) {
        EXPECT_GE(s.vector_rmse, 0.0);
        EXPECT_NEAR(s.vector_rmse * s.vector_rmse, s.vector_mse, 1e-9 * s.vector_mse);
        EXPECT_NEAR(s.vector_rrmse, s.vector_rmse / std::hypot(40.0, 400.0), 1e-15);
        // mse = bias^2 + (k-1)/k variance
        for (int k = 0; k < 2; ++k) {
            const double mse = s.mean_error(k) * s.mean_error(k) + s.variance(k) * 5.0 / 6.0;
            EXPECT_NEAR(s.rmse(k) * s.rmse(k), mse, 1e-9 * mse);
        }
    }
    EXPECT_FALSE(res.timestamp.empty());
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreadCounts) {
    auto c = small_config();
    const auto a = monte_carlo(c);
    c.threads = 3;
    const auto b = monte_carlo(c);
    EXPECT_EQ(trials_csv(a), trials_csv(b));
    auto ja = summary_json(a);
    auto jb = summary_json(b);
    ja["metadata"].erase("timestamp");
    jb["metadata"].erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(LikelihoodScan, NoiselessPeaksAtTruth) {
    const auto model = van_der_pol_reference();
    const int n = 2000;
    const auto traj = integrate(model, n, 10);
    const auto z = observe(traj, NoiseModel::none(), 0);
    const auto grid = default_scan_grid(40.0, 21, 0.5);
    const auto curve = likelihood_scan(z, model, grid, 0, 10);
    ASSERT_EQ(curve.objective.size(), 21u);
    const auto best = curve.argmax();
    ASSERT_TRUE(best.has_value());
    EXPECT_EQ(curve.grid[*best], 40.0);
    EXPECT_EQ(*curve.objective[*best], 0.0);
}

TEST(LikelihoodScan, SinglePointAndDivergence) {
    const auto model = van_der_pol_reference();
    const auto traj = integrate(model, 500, 2);
    const auto z = observe(traj, NoiseModel::gaussian(1e-4), 1);
    const std::vector<double> one{-400.0};
    const auto c1 = likelihood_scan(z, model, one, 1, 2);
    ASSERT_EQ(c1.objective.size(), 1u);
    EXPECT_TRUE(c1.objective[0].has_value());
    EXPECT_EQ(c1.interior_local_maxima(), 0);

    const std::vector<double> wild{-400.0, 1e9};
    const auto c2 = likelihood_scan(z, model, wild, 1, 1);
    EXPECT_TRUE(c2.objective[0].has_value());
    EXPECT_FALSE(c2.objective[1].has_value());
    EXPECT_THROW(likelihood_scan(z, model, one, 2, 2), std::invalid_argument);
}

TEST(LikelihoodCurve, CountsStrictInteriorMaxima) {
    LikelihoodCurve c;
    c.grid = {0, 1, 2, 3, 4, 5, 6};
    c.objective = {5.0, 1.0, 3.0, 2.0, std::nullopt, 4.0, 0.0};
    EXPECT_EQ(c.interior_local_maxima(), 1);  // index 2; index 5 neighbours a gap
    EXPECT_EQ(*c.argmax(), 0u);
    c.objective[3] = 3.0;
    EXPECT_EQ(c.interior_local_maxima(), 0);
}

TEST(DefaultScanGrid, Layout) {
    const auto g = default_scan_grid(40.0);
    ASSERT_EQ(g.size(), 201u);
    EXPECT_DOUBLE_EQ(g.front(), -40.0);
    EXPECT_DOUBLE_EQ(g.back(), 120.0);
    EXPECT_DOUBLE_EQ(g[100], 40.0);
    EXPECT_EQ(default_scan_grid(3.0, 1), std::vector<double>{3.0});
}

TEST(PlugInWindow, RecoversNoiseLevelOnSmoothSignal) {
    const auto model = exponential_decay(1.0, 1.0, 1.0);
    const auto traj = integrate(model, 10000, 1);
    const double var = 1e-2;
    const auto z = observe(traj, NoiseModel::gaussian(var), 3);
    const auto p = plug_in_window(z, 1.0, 1);
    EXPECT_NEAR(p.noise_variance, var, 0.05 * var);
    EXPECT_GE(p.window, min_window(1));
    EXPECT_LE(p.window, 10000);
    EXPECT_GT(p.A_hat, 0.0);
    EXPECT_GT(p.B_hat, 0.0);
    EXPECT_EQ(p.M.size(), 2);
}

TEST(LocalLipschitz, LinearAndVanDerPol) {
    const Eigen::Vector2d lo(-1.0, -2.0);
    const Eigen::Vector2d hi(1.0, 2.0);
    EXPECT_NEAR(local_lipschitz(identity_features(2), lo, hi, 5), 1.0, 1e-8);
    // Jacobian at (0, 0) is [[0, 1], [1, 0]]; norm grows with |xi| on the box.
    const double L = local_lipschitz(van_der_pol_features(), lo, hi, 11);
    EXPECT_GE(L, 1.0);
    // At (1, 2): J = [[-2 xi0 xi1, 1 - xi0^2], [1, 0]] = [[-4, 0], [1, 0]].
    EXPECT_GE(L, std::hypot(4.0, 1.0) - 1e-6);
}

TEST(BoundReport, SineFixtureWithinEnvelope) {
    const auto r = sine_bound_report(SineFixture{}, 2000, 17);
    EXPECT_TRUE(r.all_pass());
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.asserted);
        EXPECT_TRUE(std::isfinite(row.ratio));
    }
}

TEST(BoundReport, NoiselessSineIsTrivial) {
    SineFixture f;
    f.noise_variance = 0.0;
    const auto r = sine_bound_report(f, 3, 1);
    EXPECT_TRUE(r.all_pass());
    for (const auto& row : r.rows) EXPECT_LE(row.ratio, 1.0);
}

TEST(BoundReport, VanDerPolIsInformational) {
    ExperimentConfig c;
    c.trials = 20;
    const auto r = van_der_pol_bound_report(c, 200);
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) {
        EXPECT_FALSE(row.asserted);
        EXPECT_TRUE(std::isfinite(row.empirical));
        EXPECT_GT(row.bound, 0.0);
    }
    EXPECT_TRUE(r.all_pass());
}

TEST(SineHelpers, DerivativesAndSup) {
    SineFixture f;
    EXPECT_NEAR(sine_derivative(f, 1, 0.0), f.omega, 1e-12);
    EXPECT_NEAR(sine_derivative(f, 2, 0.25), -f.omega * f.omega, 1e-9);
    EXPECT_NEAR(sine_derivative_sup(f, 0, 0.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(sine_derivative_sup(f, 0, 0.0, 0.1), std::sin(f.omega * 0.1), 1e-15);
    EXPECT_NEAR(sine_derivative_sup(f, 1, 0.0, 0.1), f.omega, 1e-12);
}
