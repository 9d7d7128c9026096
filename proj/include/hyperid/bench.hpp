#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hyperid/differentiator.hpp"
#include "hyperid/estimator.hpp"
#include "hyperid/simulator.hpp"

namespace hyperid {

inline constexpr std::string_view kVersion = "0.1.0";

/// Monte Carlo experiment settings. Defaults mirror the reference Van der Pol
/// experiment, with 1000 trials instead of 10000.
struct ExperimentConfig {
    SystemModel model = van_der_pol_reference();
    int n = 10000;
    std::vector<int> windows = {50, 100, 200, 400};
    double lambda = kDefaultLambda;
    int trials = 1000;
    std::uint64_t seed = 7;
    NoiseModel noise = NoiseModel::gaussian(1e-4);
    int substeps = 10;
    /// Worker threads for trials; 0 picks the hardware concurrency.
    int threads = 0;

    void validate() const;
};

/// Seed of the observation noise for trial k.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index);

struct TrialRecord {
    int window = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd theta_hat;
    Eigen::VectorXd error;  // theta_hat - theta
    double sigma_min_phi_hat = 0.0;
};

/// Full pipeline on an already observed record: windows, filters, regression.
Estimate estimate_parameters(std::span<const double> z, double T, const FeatureMap& phi, int N,
                             double lambda);

/// simulate -> observe -> estimate for one trial. The overload taking a
/// trajectory skips re-integration; the trajectory must come from the config.
TrialRecord run_trial(const ExperimentConfig& config, int N, int trial_index);
TrialRecord run_trial(const ExperimentConfig& config, const Trajectory& traj, int N,
                      int trial_index);

struct WindowSummary {
    int window = 0;
    int trials = 0;
    Eigen::VectorXd mean_error;     // sampling mean minus theta
    Eigen::VectorXd variance;       // unbiased sampling variance
    Eigen::VectorXd variance_se;    // normal-theory standard error of variance
    Eigen::VectorXd rmse;
    Eigen::VectorXd rrmse;          // rmse / |theta_k|
    double vector_rmse = 0.0;       // sqrt(mean ||theta_hat - theta||^2)
    double vector_mse = 0.0;
    double vector_rrmse = 0.0;      // vector_rmse / ||theta||
    double mean_abs_error = 0.0;    // mean ||theta_hat - theta||
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;  // grouped by window, trial order
    std::vector<WindowSummary> summaries;
    std::string timestamp;
};

WindowSummary summarize(std::span<const TrialRecord> records, const Eigen::VectorXd& theta);

/// Runs every (window, trial) pair; output is independent of the thread count.
ExperimentResult monte_carlo(const ExperimentConfig& config);

struct LikelihoodCurve {
    int axis = 0;
    std::vector<double> grid;
    /// -sum (z - y_theta)^2; empty where integration diverged.
    std::vector<std::optional<double>> objective;

    int interior_local_maxima() const;
    /// Index of the largest finite objective, if any.
    std::optional<std::size_t> argmax() const;
};

/// Default scan grid: 201 points over center +- 200% of |center|.
std::vector<double> default_scan_grid(double center, int points = 201,
                                      double relative_half_width = 2.0);

/// Gaussian log-likelihood up to affine constants along one parameter axis,
/// the others held at the model's values.
LikelihoodCurve likelihood_scan(std::span<const double> z, const SystemModel& model,
                                std::span<const double> grid, int axis, int substeps = 10);

/// Data-driven stand-ins for the window-size constants.
struct PlugInWindow {
    int pilot_window = 0;
    double noise_variance = 0.0;
    Eigen::VectorXd M;  // sup |y^{(d+1)}| estimates, d = 0..m
    double A_hat = 0.0;
    double B_hat = 0.0;
    int window = 0;
};

/// Pilot pass at N0 = max(2(m+1), round(n^{(2m+2)/(2m+3)})/4): noise variance
/// from residuals of the degree-m projection in each pilot window, M from the
/// pilot derivative estimates (and differences of the top one), then
/// select_window_size.
PlugInWindow plug_in_window(std::span<const double> z, double T, int m);

/// Largest spectral norm of a finite-difference Jacobian of phi over a grid on
/// the box [lo, hi].
double local_lipschitz(const FeatureMap& phi, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       int points_per_axis = 21);

struct BoundRow {
    std::string quantity;
    double empirical = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    double tolerance = 1.0;  // pass when ratio <= tolerance
    bool asserted = true;
    bool pass = true;
};

struct BoundReport {
    std::string fixture;
    std::vector<BoundRow> rows;

    void add(std::string quantity, double empirical, double bound, double tolerance, bool asserted);
    bool all_pass() const;
};

/// y(t) = amplitude sin(omega t) sampled with Gaussian noise.
struct SineFixture {
    double amplitude = 1.0;
    double omega = 6.283185307179586;
    double T = 1.0;
    int n = 1000;
    int N = 50;
    int m = 2;
    double noise_variance = 1e-4;
};

/// Exact derivative of order d of the sine fixture.
double sine_derivative(const SineFixture& f, int d, double t);
/// sup over [a, b] of |d^k/dt^k sine|.
double sine_derivative_sup(const SineFixture& f, int k, double a, double b);

/// Per-window, per-order derivative MSE against the filter bounds. "exact"
/// rows use the noiseless filter output plus the closed-form variance
/// (tolerance 1); "mc" rows use Monte Carlo MSE over the given trials
/// (tolerance 1.05).
BoundReport sine_bound_report(const SineFixture& fixture, int trials, std::uint64_t seed);

/// Exact total derivative MSE, sum over windows and orders 0..m of squared
/// noiseless filter error plus closed-form variance.
double sine_total_mse(const SineFixture& fixture);
/// select_window_size with A, B built from the analytic sup |y^{(d+1)}| over
/// [0, T] and the known noise variance, iterated until N stops changing.
int sine_auto_window(const SineFixture& fixture);

/// Reference-model report with plug-in constants: derivative MSE and
/// E ||theta_hat - theta|| against their bounds. Informational only.
BoundReport van_der_pol_bound_report(const ExperimentConfig& config, int N);

}  // namespace hyperid
