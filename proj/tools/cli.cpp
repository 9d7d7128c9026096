#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyperid/bench.hpp"
#include "hyperid/errors.hpp"
#include "hyperid/io.hpp"

namespace hyperid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Values given on the command line; unset members leave the config untouched.
struct Overrides {
    std::string config_path;
    std::string preset;
    int n = 0;
    std::vector<int> windows;
    double lambda = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string noise;
    int substeps = 0;
    int threads = 0;
    std::string output_dir;
    bool verbose = false;

    CLI::Option* o_preset = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_windows = nullptr;
    CLI::Option* o_lambda = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_noise = nullptr;
    CLI::Option* o_substeps = nullptr;
    CLI::Option* o_threads = nullptr;
    CLI::Option* o_output = nullptr;
};

enum Flags : unsigned {
    kWindows = 1u << 0,
    kLambda = 1u << 1,
    kTrials = 1u << 2,
    kThreads = 1u << 3,
};

void add_common(CLI::App* sub, Overrides& o, unsigned flags) {
    sub->add_option("-c,--config", o.config_path, "JSON config file; flags override its values");
    o.o_preset = sub->add_option("--preset", o.preset, "model preset")
                     ->check(CLI::IsMember(preset_names()));
    o.o_n = sub->add_option("-n,--n", o.n, "number of samples")->check(CLI::PositiveNumber);
    o.o_seed = sub->add_option("--seed", o.seed, "base seed");
    o.o_noise = sub->add_option("--noise", o.noise, "none | gaussian:<var> | sign_flip:<e>");
    o.o_substeps = sub->add_option("--substeps", o.substeps, "RK4 steps per sample interval")
                       ->check(CLI::PositiveNumber);
    o.o_output = sub->add_option("-o,--output-dir", o.output_dir, "output directory");
    sub->add_flag("-v,--verbose", o.verbose, "echo the effective config to stderr");
    if (flags & kWindows) {
        o.o_windows = sub->add_option("-N,--N", o.windows, "window length(s), comma separated")
                          ->delimiter(',');
    }
    if (flags & kLambda) {
        o.o_lambda = sub->add_option("--lambda", o.lambda, "ridge parameter (>= 0)");
    }
    if (flags & kTrials) {
        o.o_trials = sub->add_option("--trials", o.trials, "Monte Carlo trials")
                         ->check(CLI::PositiveNumber);
    }
    if (flags & kThreads) {
        o.o_threads = sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")
                          ->check(CLI::NonNegativeNumber);
    }
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

RunConfig effective_config(const Overrides& o, std::ostream& err) {
    RunConfig cfg;
    if (!o.config_path.empty()) {
        if (!fs::exists(o.config_path)) {
            throw ConfigError("config file not found: " + o.config_path);
        }
        cfg = load_run_config(o.config_path);
    }
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        cfg.output_dir = env;
    }
    auto& ex = cfg.experiment;
    if (given(o.o_preset)) {
        cfg.preset = o.preset;
        ex.model = model_preset(o.preset);
    }
    if (given(o.o_n)) ex.n = o.n;
    if (given(o.o_windows)) ex.windows = o.windows;
    if (given(o.o_lambda)) ex.lambda = o.lambda;
    if (given(o.o_trials)) ex.trials = o.trials;
    if (given(o.o_seed)) ex.seed = o.seed;
    if (given(o.o_noise)) ex.noise = NoiseModel::parse(o.noise);
    if (given(o.o_substeps)) ex.substeps = o.substeps;
    if (given(o.o_threads)) ex.threads = o.threads;
    if (given(o.o_output)) cfg.output_dir = o.output_dir;
    ex.model.validate();
    if (o.verbose) {
        json j = to_json(ex);
        j["output_dir"] = cfg.output_dir.string();
        err << j.dump(2) << '\n';
    }
    return cfg;
}

json sidecar(const RunConfig& cfg, std::string_view command) {
    json meta = run_metadata(cfg.experiment.seed);
    meta["command"] = std::string(command);
    json c = to_json(cfg.experiment);
    c["preset"] = cfg.preset;
    return json{{"config", c}, {"metadata", meta}};
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int cmd_simulate(const Overrides& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    const auto& ex = cfg.experiment;
    const Trajectory traj = integrate(ex.model, ex.n, ex.substeps);
    const auto z = observe(traj, ex.noise, trial_seed(ex.seed, 0));
    const fs::path csv = cfg.output_dir / "trajectory.csv";
    write_file_atomic(csv, trajectory_csv(traj, z));
    json meta = sidecar(cfg, "simulate");
    meta["observation_seed"] = trial_seed(ex.seed, 0);
    write_file_atomic(cfg.output_dir / "trajectory.json", meta.dump(2) + "\n");
    out << "wrote " << csv.string() << " (" << ex.n << " rows)\n";
    return kExitOk;
}

int cmd_estimate(const Overrides& o, const std::string& data_path, std::optional<double> horizon,
                 std::ostream& out, std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    const auto& ex = cfg.experiment;
    const ObservationData data = read_observations(data_path);
    if (data.z.empty()) throw ConfigError("data file " + data_path + " has no rows");
    double T = ex.model.T;
    if (horizon) {
        T = *horizon;
    } else if (!data.time.empty()) {
        T = data.time.back();
    }
    const int m = ex.model.order();
    int N = 0;
    if (given(o.o_windows)) {
        if (o.windows.size() != 1) throw ConfigError("estimate takes a single window length");
        N = o.windows.front();
    } else {
        N = plug_in_window(data.z, T, m).window;
    }
    const int rows = static_cast<int>(data.z.size());
    if (N < min_window(m) || N > rows) {
        throw ConfigError("window length " + std::to_string(N) + " outside [" +
                          std::to_string(min_window(m)) + ", " + std::to_string(rows) + "]");
    }
    const Estimate est = estimate_parameters(data.z, T, ex.model.phi, N, ex.lambda);

    json theta = json::array();
    for (Eigen::Index k = 0; k < est.theta_hat.size(); ++k) {
        out << "theta_hat_" << k + 1 << " = " << format_double(est.theta_hat(k)) << '\n';
        theta.push_back(est.theta_hat(k));
    }
    out << "sigma_min_phi_hat = " << format_double(est.sigma_min_phi_hat) << '\n';
    json result = sidecar(cfg, "estimate");
    result["data"] = data_path;
    result["samples"] = rows;
    result["T"] = T;
    result["N"] = N;
    result["lambda"] = est.lambda_used;
    result["theta_hat"] = theta;
    result["sigma_min_phi_hat"] = est.sigma_min_phi_hat;
    write_file_atomic(cfg.output_dir / "estimate.json", result.dump(2) + "\n");
    return kExitOk;
}

int cmd_benchmark(const Overrides& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    const ExperimentResult result = monte_carlo(cfg.experiment);
    write_file_atomic(cfg.output_dir / "trials.csv", trials_csv(result));
    json summary = summary_json(result);
    summary["config"]["preset"] = cfg.preset;
    write_file_atomic(cfg.output_dir / "summary.json", summary.dump(2) + "\n");

    const auto p = cfg.experiment.model.theta.size();
    out << "N";
    for (Eigen::Index k = 1; k <= p; ++k) out << "\trmse_" << k;
    out << "\tvec_rmse\tvec_mse";
    for (Eigen::Index k = 1; k <= p; ++k) out << "\trrmse_" << k << "_%";
    out << "\tvec_rrmse_%\n";
    for (const auto& s : result.summaries) {
        out << s.window;
        for (Eigen::Index k = 0; k < p; ++k) out << '\t' << fmt("%.4g", s.rmse(k));
        out << '\t' << fmt("%.4g", s.vector_rmse) << '\t' << fmt("%.4g", s.vector_mse);
        for (Eigen::Index k = 0; k < p; ++k) out << '\t' << fmt("%.3f", 100.0 * s.rrmse(k));
        out << '\t' << fmt("%.3f", 100.0 * s.vector_rrmse) << '\n';
    }
    out << "wrote " << (cfg.output_dir / "trials.csv").string() << " and "
        << (cfg.output_dir / "summary.json").string() << '\n';
    return kExitOk;
}

int cmd_scan(const Overrides& o, std::optional<int> axis, std::optional<int> points,
             std::optional<double> half_width, std::ostream& out, std::ostream& err) {
    RunConfig cfg = effective_config(o, err);
    if (points) cfg.scan_points = *points;
    if (half_width) cfg.scan_half_width = *half_width;
    const auto& ex = cfg.experiment;
    const int p = ex.model.params();
    if (axis && (*axis < 1 || *axis > p)) {
        throw ConfigError("--axis must lie in [1, " + std::to_string(p) + "]");
    }
    const Trajectory traj = integrate(ex.model, ex.n, ex.substeps);
    const auto z = observe(traj, ex.noise, trial_seed(ex.seed, 0));

    json meta = sidecar(cfg, "scan");
    meta["points"] = cfg.scan_points;
    meta["half_width"] = cfg.scan_half_width;
    meta["curves"] = json::array();
    for (int k = 0; k < p; ++k) {
        if (axis && *axis != k + 1) continue;
        const auto grid = default_scan_grid(ex.model.theta(k), cfg.scan_points, cfg.scan_half_width);
        const LikelihoodCurve curve = likelihood_scan(z, ex.model, grid, k, ex.substeps);
        const std::string name = "likelihood_theta" + std::to_string(k + 1) + ".csv";
        write_file_atomic(cfg.output_dir / name, curve_csv(curve));
        const auto best = curve.argmax();
        out << name << ": " << curve.interior_local_maxima() << " interior local maxima";
        if (best) out << ", argmax " << format_double(curve.grid[*best]);
        out << '\n';
        meta["curves"].push_back(json{{"file", name},
                                      {"axis", k + 1},
                                      {"interior_local_maxima", curve.interior_local_maxima()},
                                      {"argmax", best ? json(curve.grid[*best]) : json()}});
    }
    write_file_atomic(cfg.output_dir / "scan.json", meta.dump(2) + "\n");
    return kExitOk;
}

int cmd_bounds(const Overrides& o, const std::string& fixture, std::ostream& out,
               std::ostream& err) {
    const RunConfig cfg = effective_config(o, err);
    const auto& ex = cfg.experiment;
    BoundReport report;
    if (fixture == "sine") {
        SineFixture f;
        if (given(o.o_n)) f.n = ex.n;
        if (given(o.o_windows)) f.N = o.windows.front();
        if (ex.noise.kind == NoiseModel::Kind::Gaussian) f.noise_variance = ex.noise.param;
        if (f.N < min_window(f.m) || f.N > f.n) {
            throw ConfigError("window length " + std::to_string(f.N) + " outside [" +
                              std::to_string(min_window(f.m)) + ", " + std::to_string(f.n) + "]");
        }
        report = sine_bound_report(f, ex.trials, ex.seed);
    } else {
        int N = ex.windows.front();
        if (!given(o.o_windows) && cfg.experiment.windows == ExperimentConfig{}.windows) {
            const Trajectory traj = integrate(ex.model, ex.n, ex.substeps);
            N = plug_in_window(observe(traj, ex.noise, trial_seed(ex.seed, 0)), ex.model.T,
                               ex.model.order())
                    .window;
        }
        report = van_der_pol_bound_report(ex, N);
    }
    const std::string name = "bounds_" + fixture + ".csv";
    write_file_atomic(cfg.output_dir / name, bound_report_csv(report));
    json meta = sidecar(cfg, "bounds");
    meta["fixture"] = report.fixture;
    meta["all_pass"] = report.all_pass();
    write_file_atomic(cfg.output_dir / ("bounds_" + fixture + ".json"), meta.dump(2) + "\n");

    int failed = 0;
    for (const auto& r : report.rows) {
        if (r.asserted && !r.pass) ++failed;
    }
    const bool brief = report.rows.size() > 12;
    for (const auto& r : report.rows) {
        if (brief && r.asserted && r.pass) continue;
        out << r.quantity << "\tempirical " << fmt("%.4g", r.empirical) << "\tbound "
            << fmt("%.4g", r.bound) << "\tratio " << fmt("%.4f", r.ratio) << '\t'
            << (r.asserted ? (r.pass ? "pass" : "FAIL") : "info") << '\n';
    }
    out << report.fixture << ": " << report.rows.size() << " rows, " << failed
        << " asserted failures; wrote " << (cfg.output_dir / name).string() << '\n';
    return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Parameter identification for parameter-linear hyperjerk systems", "hyperid"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Overrides sim_o;
    auto* sim = app.add_subcommand("simulate", "integrate a model and write trajectory.csv");
    add_common(sim, sim_o, 0);

    Overrides est_o;
    std::string data_path;
    std::optional<double> horizon;
    auto* est = app.add_subcommand("estimate", "estimate theta from an observation CSV");
    add_common(est, est_o, kWindows | kLambda);
    est->add_option("-d,--data", data_path, "CSV with a 'z' column")->required();
    est->add_option("--T", horizon, "horizon; default: last time value, else the preset's");

    Overrides bench_o;
    auto* bench = app.add_subcommand("benchmark", "Monte Carlo over window lengths");
    add_common(bench, bench_o, kWindows | kLambda | kTrials | kThreads);

    Overrides scan_o;
    std::optional<int> axis;
    std::optional<int> points;
    std::optional<double> half_width;
    auto* scan = app.add_subcommand("scan", "likelihood along parameter axes");
    add_common(scan, scan_o, 0);
    scan->add_option("--axis", axis, "1-based parameter index; default: all");
    scan->add_option("--points", points, "grid points")->check(CLI::PositiveNumber);
    scan->add_option("--half-width", half_width, "grid half width relative to |theta_k|")
        ->check(CLI::NonNegativeNumber);

    Overrides bounds_o;
    std::string fixture = "sine";
    auto* bounds = app.add_subcommand("bounds", "empirical errors against theoretical bounds");
    add_common(bounds, bounds_o, kWindows | kLambda | kTrials);
    bounds->add_option("--fixture", fixture, "sine | model")
        ->check(CLI::IsMember({"sine", "model"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) return cmd_simulate(sim_o, out, err);
        if (*est) return cmd_estimate(est_o, data_path, horizon, out, err);
        if (*bench) return cmd_benchmark(bench_o, out, err);
        if (*scan) return cmd_scan(scan_o, axis, points, half_width, out, err);
        if (*bounds) return cmd_bounds(bounds_o, fixture, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace hyperid::cli
