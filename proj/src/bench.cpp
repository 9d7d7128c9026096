#include "hyperid/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hyperid/errors.hpp"
#include "hyperid/rng.hpp"
#include "hyperid/theory.hpp"

namespace hyperid {

namespace {

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < count; k += workers) fn(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void check_window(const ExperimentConfig& config, int N) {
    const int m = config.model.order();
    if (N < min_window(m) || N > config.n) {
        throw std::invalid_argument("window length " + std::to_string(N) + " outside [" +
                                    std::to_string(min_window(m)) + ", " +
                                    std::to_string(config.n) + "]");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    model.validate();
    if (n < 2) throw std::invalid_argument("ExperimentConfig: n must be at least 2");
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be at least 1");
    if (substeps < 1) throw std::invalid_argument("ExperimentConfig: substeps must be at least 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ExperimentConfig: lambda must be finite and >= 0");
    }
    if (windows.empty()) throw std::invalid_argument("ExperimentConfig: no window lengths");
    for (int N : windows) check_window(*this, N);
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
    return derive_seed(base_seed, static_cast<std::uint64_t>(trial_index));
}

Estimate estimate_parameters(std::span<const double> z, double T, const FeatureMap& phi, int N,
                             double lambda) {
    const WindowPlan plan = plan_windows(static_cast<int>(z.size()), N);
    const DerivativeEstimates derivs = estimate_derivatives(z, T, phi.state_dim, plan);
    return ridge_solve(build_regression(derivs, phi, lambda));
}

TrialRecord run_trial(const ExperimentConfig& config, int N, int trial_index) {
    config.model.validate();
    check_window(config, N);
    const Trajectory traj = integrate(config.model, config.n, config.substeps);
    return run_trial(config, traj, N, trial_index);
}

TrialRecord run_trial(const ExperimentConfig& config, const Trajectory& traj, int N,
                      int trial_index) {
    check_window(config, N);
    if (traj.samples() != config.n) {
        throw std::invalid_argument("run_trial: trajectory length differs from config n");
    }
    TrialRecord rec;
    rec.window = N;
    rec.trial = trial_index;
    rec.seed = trial_seed(config.seed, trial_index);
    const std::vector<double> z = observe(traj, config.noise, rec.seed);
    const Estimate est = estimate_parameters(z, config.model.T, config.model.phi, N, config.lambda);
    rec.theta_hat = est.theta_hat;
    rec.error = est.theta_hat - config.model.theta;
    rec.sigma_min_phi_hat = est.sigma_min_phi_hat;
    return rec;
}

WindowSummary summarize(std::span<const TrialRecord> records, const Eigen::VectorXd& theta) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    const auto p = theta.size();
    const auto count = static_cast<double>(records.size());
    WindowSummary s;
    s.window = records.front().window;
    s.trials = static_cast<int>(records.size());
    s.mean_error.resize(p);
    s.variance.resize(p);
    s.variance_se.resize(p);
    s.rmse.resize(p);
    s.rrmse.resize(p);

    CompensatedSum sq_norm;
    CompensatedSum abs_norm;
    for (const auto& r : records) {
        sq_norm.add(r.error.squaredNorm());
        abs_norm.add(r.error.norm());
    }
    for (Eigen::Index k = 0; k < p; ++k) {
        CompensatedSum sum;
        CompensatedSum sq;
        for (const auto& r : records) {
            sum.add(r.error(k));
            sq.add(r.error(k) * r.error(k));
        }
        const double mean = sum.value() / count;
        CompensatedSum centered;
        for (const auto& r : records) centered.add((r.error(k) - mean) * (r.error(k) - mean));
        s.mean_error(k) = mean;
        s.variance(k) = records.size() > 1 ? centered.value() / (count - 1.0) : 0.0;
        s.variance_se(k) = records.size() > 1 ? s.variance(k) * std::sqrt(2.0 / (count - 1.0)) : 0.0;
        s.rmse(k) = std::sqrt(sq.value() / count);
        s.rrmse(k) = theta(k) != 0.0 ? s.rmse(k) / std::abs(theta(k))
                                     : std::numeric_limits<double>::quiet_NaN();
    }
    s.vector_mse = sq_norm.value() / count;
    s.vector_rmse = std::sqrt(s.vector_mse);
    s.vector_rrmse = theta.norm() > 0.0 ? s.vector_rmse / theta.norm()
                                        : std::numeric_limits<double>::quiet_NaN();
    s.mean_abs_error = abs_norm.value() / count;
    return s;
}

ExperimentResult monte_carlo(const ExperimentConfig& config) {
    config.validate();
    const Trajectory traj = integrate(config.model, config.n, config.substeps);

    ExperimentResult result;
    result.config = config;
    const auto trials = static_cast<std::size_t>(config.trials);
    result.records.resize(config.windows.size() * trials);
    parallel_for(result.records.size(), config.threads, [&](std::size_t k) {
        const int N = config.windows[k / trials];
        result.records[k] = run_trial(config, traj, N, static_cast<int>(k % trials));
    });
    for (std::size_t w = 0; w < config.windows.size(); ++w) {
        result.summaries.push_back(summarize(
            std::span<const TrialRecord>(result.records).subspan(w * trials, trials),
            config.model.theta));
    }
    result.timestamp = utc_timestamp();
    return result;
}

int LikelihoodCurve::interior_local_maxima() const {
    int count = 0;
    for (std::size_t k = 1; k + 1 < objective.size(); ++k) {
        if (objective[k] && objective[k - 1] && objective[k + 1] &&
            *objective[k] > *objective[k - 1] && *objective[k] > *objective[k + 1]) {
            ++count;
        }
    }
    return count;
}

std::optional<std::size_t> LikelihoodCurve::argmax() const {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < objective.size(); ++k) {
        if (objective[k] && (!best || *objective[k] > *objective[*best])) best = k;
    }
    return best;
}

std::vector<double> default_scan_grid(double center, int points, double relative_half_width) {
    if (points < 1) throw std::invalid_argument("default_scan_grid: need at least one point");
    if (points == 1) return {center};
    const double half = relative_half_width * std::abs(center);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        grid[static_cast<std::size_t>(k)] = center - half + 2.0 * half * k / (points - 1);
    }
    return grid;
}

LikelihoodCurve likelihood_scan(std::span<const double> z, const SystemModel& model,
                                std::span<const double> grid, int axis, int substeps) {
    model.validate();
    if (axis < 0 || axis >= model.params()) {
        throw std::invalid_argument("likelihood_scan: axis " + std::to_string(axis) +
                                    " outside parameter range");
    }
    const int n = static_cast<int>(z.size());
    LikelihoodCurve curve;
    curve.axis = axis;
    curve.grid.assign(grid.begin(), grid.end());
    curve.objective.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SystemModel trial = model;
        trial.theta(axis) = grid[k];
        try {
            const Trajectory traj = integrate(trial, n, substeps);
            CompensatedSum ssr;
            for (int i = 0; i < n; ++i) {
                const double r = z[static_cast<std::size_t>(i)] - traj.states(i, 0);
                ssr.add(r * r);
            }
            if (std::isfinite(ssr.value())) curve.objective[k] = -ssr.value();
        } catch (const IntegrationDivergedError&) {
            // left empty
        }
    }
    return curve;
}

PlugInWindow plug_in_window(std::span<const double> z, double T, int m) {
    const int n = static_cast<int>(z.size());
    if (m < 0 || n < min_window(m)) {
        throw std::invalid_argument("plug_in_window: too few samples for order m");
    }
    const double e = 2.0 * m + 3.0;
    const int rough = static_cast<int>(std::lround(std::pow(n, (2.0 * m + 2.0) / e) / 4.0));
    PlugInWindow out;
    out.pilot_window = std::clamp(rough, min_window(m), n);

    const WindowPlan plan = plan_windows(n, out.pilot_window);
    const WeightFunction rho = WeightFunction::uniform(plan.window);
    const PolynomialFamily family = orthogonal_family(plan.window, m, rho);
    const DerivativeEstimates pilot = estimate_derivatives(z, T, m, plan, rho);

    // Residual of the degree-m weighted projection inside each pilot window.
    CompensatedSum rss;
    std::vector<double> resid(static_cast<std::size_t>(plan.window));
    for (int i = 0; i < plan.count; ++i) {
        const auto w = z.subspan(static_cast<std::size_t>(plan.starts[static_cast<std::size_t>(i)]),
                                 static_cast<std::size_t>(plan.window));
        resid.assign(w.begin(), w.end());
        for (int d = 0; d <= m; ++d) {
            const auto p = family.node_values(d);
            const double c = inner_product(resid, p, rho) / inner_product(p, p, rho);
            for (std::size_t j = 0; j < resid.size(); ++j) resid[j] -= c * p[j];
        }
        for (double r : resid) rss.add(r * r);
    }
    const int dof = plan.count * (plan.window - m - 1);
    out.noise_variance = dof > 0 ? rss.value() / dof : 0.0;

    out.M = Eigen::VectorXd::Zero(m + 1);
    for (int d = 0; d < m; ++d) out.M(d) = pilot.values.col(d + 1).cwiseAbs().maxCoeff();
    const double dt = plan.window * T / n;
    double top = 0.0;
    for (int i = 0; i + 1 < plan.count; ++i) {
        top = std::max(top, std::abs(pilot.values(i + 1, m) - pilot.values(i, m)) / dt);
    }
    out.M(m) = top;

    for (int d = 0; d <= m; ++d) {
        const auto in = theory::filter_bound_inputs(family, d, n, T, out.M(d), out.noise_variance);
        out.A_hat += theory::mse_constant_A(in);
        out.B_hat += theory::mse_constant_B(in);
    }
    constexpr double kTiny = 1e-300;
    if (out.A_hat <= kTiny && out.B_hat <= kTiny) {
        out.window = out.pilot_window;
    } else if (out.A_hat <= kTiny) {
        out.window = n;
    } else if (out.B_hat <= kTiny) {
        out.window = min_window(m);
    } else {
        out.window = select_window_size(out.A_hat, out.B_hat, m, n);
    }
    return out;
}

double local_lipschitz(const FeatureMap& phi, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       int points_per_axis) {
    const int m = phi.state_dim;
    if (lo.size() != m || hi.size() != m || points_per_axis < 1) {
        throw std::invalid_argument("local_lipschitz: box dimension mismatch");
    }
    const Eigen::VectorXd span = hi - lo;
    std::int64_t total = 1;
    for (int k = 0; k < m; ++k) total *= points_per_axis;
    double best = 0.0;
    Eigen::VectorXd x(m);
    Eigen::MatrixXd J(phi.output_dim, m);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rem = idx;
        for (int k = 0; k < m; ++k) {
            const auto q = rem % points_per_axis;
            rem /= points_per_axis;
            x(k) = points_per_axis == 1 ? lo(k) : lo(k) + span(k) * q / (points_per_axis - 1);
        }
        for (int k = 0; k < m; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
            Eigen::VectorXd xp = x;
            Eigen::VectorXd xm = x;
            xp(k) += h;
            xm(k) -= h;
            J.col(k) = (phi(xp) - phi(xm)) / (2.0 * h);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        best = std::max(best, svd.singularValues()(0));
    }
    return best;
}

void BoundReport::add(std::string quantity, double empirical, double bound, double tolerance,
                      bool asserted) {
    BoundRow row;
    row.quantity = std::move(quantity);
    row.empirical = empirical;
    row.bound = bound;
    row.tolerance = tolerance;
    row.asserted = asserted;
    if (bound > 0.0) {
        row.ratio = empirical / bound;
    } else {
        row.ratio = empirical > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    row.pass = row.ratio <= tolerance;
    rows.push_back(std::move(row));
}

bool BoundReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const BoundRow& r) { return !r.asserted || r.pass; });
}

double sine_derivative(const SineFixture& f, int d, double t) {
    return f.amplitude * std::pow(f.omega, d) * std::sin(f.omega * t + d * std::numbers::pi / 2.0);
}

double sine_derivative_sup(const SineFixture& f, int k, double a, double b) {
    const double scale = std::abs(f.amplitude) * std::pow(f.omega, k);
    const double phase_a = f.omega * a + k * std::numbers::pi / 2.0;
    const double phase_b = f.omega * b + k * std::numbers::pi / 2.0;
    // |sin| reaches 1 at pi/2 + j pi; check whether one lies in the phase span.
    const double first = std::ceil((phase_a - std::numbers::pi / 2.0) / std::numbers::pi);
    if (std::numbers::pi / 2.0 + first * std::numbers::pi <= phase_b) return scale;
    return scale * std::max(std::abs(std::sin(phase_a)), std::abs(std::sin(phase_b)));
}

BoundReport sine_bound_report(const SineFixture& f, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("sine_bound_report: trials must be positive");
    const WindowPlan plan = plan_windows(f.n, f.N);
    const WeightFunction rho = WeightFunction::uniform(f.N);
    const PolynomialFamily family = orthogonal_family(f.N, f.m, rho);
    const int m = f.m;

    Trajectory traj;
    traj.T = f.T;
    traj.times.resize(f.n);
    traj.states.resize(f.n, 1);
    for (int k = 1; k <= f.n; ++k) {
        traj.times(k - 1) = f.T * k / f.n;
        traj.states(k - 1, 0) = sine_derivative(f, 0, traj.times(k - 1));
    }
    std::vector<double> clean(traj.states.col(0).data(), traj.states.col(0).data() + f.n);
    const DerivativeEstimates noiseless = estimate_derivatives(clean, f.T, m, plan, rho);

    Eigen::MatrixXd truth(plan.count, m + 1);
    for (int i = 0; i < plan.count; ++i) {
        for (int d = 0; d <= m; ++d) truth(i, d) = sine_derivative(f, d, plan.start_time(i, f.T));
    }

    std::vector<CompensatedSum> sq(static_cast<std::size_t>(plan.count * (m + 1)));
    const NoiseModel noise = NoiseModel::gaussian(f.noise_variance);
    for (int r = 0; r < trials; ++r) {
        const auto z = observe(traj, noise, derive_seed(seed, static_cast<std::uint64_t>(r)));
        const DerivativeEstimates est = estimate_derivatives(z, f.T, m, plan, rho);
        for (int i = 0; i < plan.count; ++i) {
            for (int d = 0; d <= m; ++d) {
                const double err = est.values(i, d) - truth(i, d);
                sq[static_cast<std::size_t>(i * (m + 1) + d)].add(err * err);
            }
        }
    }

    BoundReport report;
    report.fixture = "sine";
    double total_mc = 0.0;
    double total_bound = 0.0;
    for (int i = 0; i < plan.count; ++i) {
        const double t0 = plan.start_time(i, f.T);
        const double t1 = t0 + f.N * f.T / f.n;
        for (int d = 0; d <= m; ++d) {
            const auto in = theory::filter_bound_inputs(family, d, f.n, f.T,
                                                        sine_derivative_sup(f, d + 1, t0, t1),
                                                        f.noise_variance);
            const double bound = theory::mse_bound(in);
            const auto c = filter_coefficients(family, d, f.n, f.T).weights;
            double var = 0.0;
            for (double cj : c) var += cj * cj * f.noise_variance;
            const double bias = noiseless.values(i, d) - truth(i, d);
            const double mc = sq[static_cast<std::size_t>(i * (m + 1) + d)].value() / trials;
            const std::string tag = "[i=" + std::to_string(i) + " d=" + std::to_string(d) + "]";
            report.add("exact_mse" + tag, bias * bias + var, bound, 1.0, true);
            report.add("mc_mse" + tag, mc, bound, 1.05, true);
            total_mc += mc;
            total_bound += bound;
        }
    }
    report.add("mc_total_mse", total_mc, total_bound, 1.05, true);
    return report;
}

double sine_total_mse(const SineFixture& f) {
    const WindowPlan plan = plan_windows(f.n, f.N);
    const WeightFunction rho = WeightFunction::uniform(f.N);
    const PolynomialFamily family = orthogonal_family(f.N, f.m, rho);
    std::vector<double> clean(static_cast<std::size_t>(f.n));
    for (int k = 1; k <= f.n; ++k) {
        clean[static_cast<std::size_t>(k - 1)] = sine_derivative(f, 0, f.T * k / f.n);
    }
    const DerivativeEstimates est = estimate_derivatives(clean, f.T, f.m, plan, rho);
    CompensatedSum total;
    for (int d = 0; d <= f.m; ++d) {
        double var = 0.0;
        for (double c : filter_coefficients(family, d, f.n, f.T).weights) {
            var += c * c * f.noise_variance;
        }
        for (int i = 0; i < plan.count; ++i) {
            const double bias = est.values(i, d) - sine_derivative(f, d, plan.start_time(i, f.T));
            total.add(bias * bias + var);
        }
    }
    return total.value();
}

int sine_auto_window(const SineFixture& f) {
    int N = std::clamp(f.N, min_window(f.m), f.n);
    for (int iter = 0; iter < 20; ++iter) {
        const PolynomialFamily family = orthogonal_family(N, f.m, WeightFunction::uniform(N));
        double A = 0.0;
        double B = 0.0;
        for (int d = 0; d <= f.m; ++d) {
            const auto in = theory::filter_bound_inputs(family, d, f.n, f.T,
                                                        sine_derivative_sup(f, d + 1, 0.0, f.T),
                                                        f.noise_variance);
            A += theory::mse_constant_A(in);
            B += theory::mse_constant_B(in);
        }
        const int next = select_window_size(A, B, f.m, f.n);
        if (next == N) break;
        N = next;
    }
    return N;
}

BoundReport van_der_pol_bound_report(const ExperimentConfig& config, int N) {
    config.model.validate();
    check_window(config, N);
    const SystemModel& model = config.model;
    const int m = model.order();
    const int n = config.n;
    const double T = model.T;
    const Trajectory traj = integrate(model, n, config.substeps);
    const WindowPlan plan = plan_windows(n, N);
    const PolynomialFamily family = orthogonal_family(N, m, WeightFunction::uniform(N));

    // Ground truth at the window starts.
    Eigen::MatrixXd truth(plan.count, m + 1);
    for (int i = 0; i < plan.count; ++i) {
        truth.row(i) = traj.derivatives_at(plan.starts[static_cast<std::size_t>(i)]).transpose();
    }
    Eigen::MatrixXd Phi(plan.count, model.params());
    for (int i = 0; i < plan.count; ++i) {
        Phi.row(i) = model.phi(truth.row(i).head(m).transpose()).transpose();
    }
    const double sqrt_np = std::sqrt(static_cast<double>(plan.count));
    const double sigma_bar = min_singular_value(Phi) / sqrt_np;
    const double U_bar = truth.col(m).norm() / sqrt_np;

    Eigen::VectorXd lo = traj.initial.head(m);
    Eigen::VectorXd hi = lo;
    for (int k = 0; k < traj.samples(); ++k) {
        lo = lo.cwiseMin(traj.states.row(k).head(m).transpose());
        hi = hi.cwiseMax(traj.states.row(k).head(m).transpose());
    }
    const double C_phi = local_lipschitz(model.phi, lo, hi);

    const auto z0 = observe(traj, config.noise, trial_seed(config.seed, 0));
    const PlugInWindow plug = plug_in_window(z0, T, m);

    double A_all = 0.0;
    double B_all = 0.0;
    double A_top = 0.0;
    double B_top = 0.0;
    double deriv_bound = 0.0;
    for (int d = 0; d <= m; ++d) {
        const auto in = theory::filter_bound_inputs(family, d, n, T, plug.M(d), plug.noise_variance);
        A_all += theory::mse_constant_A(in);
        B_all += theory::mse_constant_B(in);
        if (d == m) {
            A_top = theory::mse_constant_A(in);
            B_top = theory::mse_constant_B(in);
        }
        deriv_bound += plan.count * theory::mse_bound(in);
    }
    const double eps_N = theory::epsilon_N(plan.count * A_all, plan.count * B_all, m, plan.count);
    const double eps_N_m = theory::epsilon_N(plan.count * A_top, plan.count * B_top, m, plan.count);

    CompensatedSum deriv_sq;
    CompensatedSum theta_abs;
    for (int r = 0; r < config.trials; ++r) {
        const auto z = observe(traj, config.noise, trial_seed(config.seed, r));
        const DerivativeEstimates est = estimate_derivatives(z, T, m, plan);
        deriv_sq.add((est.values - truth).squaredNorm());
        const Estimate theta = ridge_solve(build_regression(est, model.phi, config.lambda));
        theta_abs.add((theta.theta_hat - model.theta).norm());
    }

    theory::MAEBoundInputs mae;
    mae.eps_N = eps_N;
    mae.eps_N_m = eps_N_m;
    mae.sigma_bar = sigma_bar;
    mae.U_bar = U_bar;
    mae.C_phi = C_phi;
    mae.alpha = model.phi.alpha;
    mae.m = m;
    mae.n = n;
    mae.n_prime = plan.count;
    mae.lambda = config.lambda > 0.0 ? config.lambda : 1e-12;

    BoundReport report;
    report.fixture = model.name + " (plug-in constants)";
    report.add("derivative_total_mse", deriv_sq.value() / config.trials, deriv_bound, 1.0, false);
    report.add("theta_mean_abs_error", theta_abs.value() / config.trials,
               theory::delta_theta_mae_bound(mae).total, 1.0, false);
    return report;
}

}  // namespace hyperid
