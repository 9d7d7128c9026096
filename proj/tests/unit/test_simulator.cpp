#include <gtest/gtest.h>

#include <cmath>

#include "hyperid/errors.hpp"
#include "hyperid/rng.hpp"
#include "hyperid/simulator.hpp"

using namespace hyperid;

TEST(CounterRng, DeterministicAndAddressable) {
    CounterRng a(123);
    CounterRng b(123);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.counter(), 100u);
    CounterRng c(124);
    EXPECT_NE(CounterRng(123).next_u64(), c.next_u64());
    EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
    EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(CounterRng, UniformInOpenInterval) {
    CounterRng r(5);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(CounterRng, GaussianMoments) {
    CounterRng r(6);
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double g = r.gaussian();
        s1 += g;
        s2 += g * g;
    }
    EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Presets, VanDerPolReference) {
    const auto m = van_der_pol_reference();
    EXPECT_EQ(m.order(), 2);
    EXPECT_EQ(m.params(), 2);
    EXPECT_EQ(m.theta, Eigen::Vector2d(40.0, -400.0));
    EXPECT_EQ(m.xi0, Eigen::Vector2d(1.0, 20.0));
    EXPECT_EQ(m.T, 1.0);
    const Eigen::Vector2d xi(0.5, 2.0);
    EXPECT_DOUBLE_EQ(m.flow(xi), 40.0 * 0.75 * 2.0 - 400.0 * 0.5);
    for (const auto& name : preset_names()) EXPECT_NO_THROW(model_preset(name).validate());
    EXPECT_THROW(model_preset("lorenz"), std::invalid_argument);
}

TEST(Presets, ValidateCatchesBadDimensions) {
    auto m = van_der_pol_reference();
    m.theta = Eigen::VectorXd::Ones(3);
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = van_der_pol_reference();
    m.T = 0.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Integrate, HarmonicClosedForm) {
    const auto model = van_der_pol(0.0, -400.0, 1.0, 0.0, 1.0);
    const auto traj = integrate(model, 1000, 10);
    ASSERT_EQ(traj.samples(), 1000);
    EXPECT_DOUBLE_EQ(traj.times(499), 0.5);
    EXPECT_NEAR(traj.states(499, 0), std::cos(10.0), 1e-6);
    EXPECT_NEAR(traj.states(499, 0), -0.8390715, 1e-6);
    EXPECT_NEAR(traj.states(499, 1), -20.0 * std::sin(10.0), 1e-4);
    EXPECT_NEAR(traj.states(499, 2), -400.0 * std::cos(10.0), 1e-3);
    EXPECT_EQ(traj.derivatives_at(0), Eigen::Vector3d(1.0, 0.0, -400.0));
}

TEST(Integrate, FreeParticleIsExact) {
    const auto model = van_der_pol(0.0, 0.0, 1.0, 20.0, 1.0);
    const auto traj = integrate(model, 500, 3);
    for (int k = 0; k < traj.samples(); ++k) {
        EXPECT_NEAR(traj.states(k, 0), 1.0 + 20.0 * traj.times(k), 1e-12);
        EXPECT_NEAR(traj.states(k, 1), 20.0, 1e-12);
        EXPECT_EQ(traj.states(k, 2), 0.0);
    }
}

TEST(Integrate, FourthOrderConvergence) {
    const auto model = van_der_pol(0.0, -400.0, 1.0, 0.0, 1.0);
    std::vector<double> err;
    for (int sub : {1, 2, 4, 8}) {
        const auto traj = integrate(model, 200, sub);
        double e = 0.0;
        for (int k = 0; k < traj.samples(); ++k) {
            e = std::max(e, std::abs(traj.states(k, 0) - std::cos(20.0 * traj.times(k))));
        }
        err.push_back(e);
    }
    // Least-squares slope of log(err) against log(step).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 4; ++i) {
        const double x = -i * std::log(2.0);
        const double y = std::log(err[static_cast<std::size_t>(i)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    EXPECT_GE(slope, 3.7);
    EXPECT_LE(slope, 4.3);
}

TEST(Integrate, VanDerPolSelfConvergence) {
    const auto model = van_der_pol_reference();
    const auto coarse = integrate(model, 10000, 10);
    const auto fine = integrate(model, 10000, 20);
    EXPECT_LE((coarse.states.col(0) - fine.states.col(0)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Integrate, GroundTruthDerivativeConsistency) {
    const auto model = van_der_pol_reference();
    const int n = 2000;
    double previous = std::numeric_limits<double>::infinity();
    for (int sub : {1, 4, 16}) {
        const auto traj = integrate(model, n, sub);
        const double dt = model.T / n;
        double worst = 0.0;
        for (int k = 2; k + 2 < n; ++k) {
            const auto y = [&](int q) { return traj.states(k + q, 0); };
            const double fd = (-y(2) + 8.0 * y(1) - 8.0 * y(-1) + y(-2)) / (12.0 * dt);
            worst = std::max(worst, std::abs(fd - traj.states(k, 1)));
        }
        EXPECT_LE(worst, previous * (1.0 + 1e-6));
        previous = worst;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(Integrate, DivergenceIsReported) {
    auto model = van_der_pol(0.0, 1e8, 1.0, 0.0, 1.0);
    try {
        integrate(model, 100, 1);
        FAIL() << "expected divergence";
    } catch (const IntegrationDivergedError& e) {
        EXPECT_GT(e.time(), 0.0);
        EXPECT_LE(e.time(), 1.0);
    }
    EXPECT_THROW(integrate(van_der_pol_reference(), 1, 1), std::invalid_argument);
    EXPECT_THROW(integrate(van_der_pol_reference(), 10, 0), std::invalid_argument);
}

TEST(Observe, NoNoiseReturnsTruth) {
    const auto traj = integrate(van_der_pol_reference(), 300, 2);
    const auto z = observe(traj, NoiseModel::none(), 99);
    for (int k = 0; k < 300; ++k) EXPECT_EQ(z[static_cast<std::size_t>(k)], traj.states(k, 0));
}

TEST(Observe, BitwiseDeterministic) {
    const auto t1 = integrate(van_der_pol_reference(), 1000, 10);
    const auto t2 = integrate(van_der_pol_reference(), 1000, 10);
    EXPECT_EQ(t1.states, t2.states);
    const auto noise = NoiseModel::gaussian(1e-4);
    EXPECT_EQ(observe(t1, noise, 5), observe(t2, noise, 5));
    EXPECT_NE(observe(t1, noise, 5), observe(t1, noise, 6));
}

TEST(Observe, GaussianMeanWithinClt) {
    const auto traj = integrate(exponential_decay(1.0, 1.0, 1.0), 100000, 1);
    const double var = 1e-4;
    const auto z = observe(traj, NoiseModel::gaussian(var), 2024);
    double s = 0.0;
    for (int k = 0; k < traj.samples(); ++k) s += z[static_cast<std::size_t>(k)] - traj.states(k, 0);
    const double n = traj.samples();
    EXPECT_LE(std::abs(s / n), 4.0 * std::sqrt(var) / std::sqrt(n));
}

TEST(Observe, SignFlipLaw) {
    // Constant trajectory y = 1 through the free-particle preset with zero velocity.
    const auto traj = integrate(van_der_pol(0.0, 0.0, 1.0, 0.0, 1.0), 10000, 1);
    const auto z = observe(traj, NoiseModel::sign_flip(0.5), 77);
    int high = 0;
    for (double v : z) {
        ASSERT_TRUE(v == 2.5 || v == -0.5) << v;
        if (v == 2.5) ++high;
    }
    const double n = 10000.0;
    EXPECT_LE(std::abs(high - n / 2), 4.0 * std::sqrt(n / 4));
}

TEST(NoiseModel, ParseAndFormat) {
    const auto s = NoiseModel::parse("sign_flip:0.5");
    EXPECT_EQ(s.kind, NoiseModel::Kind::SignFlip);
    EXPECT_EQ(s.param, 0.5);
    const auto g = NoiseModel::parse("gaussian:1e-4");
    EXPECT_EQ(g.kind, NoiseModel::Kind::Gaussian);
    EXPECT_EQ(g.param, 1e-4);
    EXPECT_EQ(NoiseModel::parse("none").kind, NoiseModel::Kind::None);
    EXPECT_EQ(NoiseModel::parse(g.to_string()).param, g.param);
    EXPECT_THROW(NoiseModel::parse("gaussian:-1"), std::invalid_argument);
    EXPECT_THROW(NoiseModel::parse("gaussian:abc"), std::invalid_argument);
    EXPECT_THROW(NoiseModel::parse("laplace:1"), std::invalid_argument);
    EXPECT_THROW(NoiseModel::parse("gaussian"), std::invalid_argument);
}
