#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperid/bench.hpp"
#include "hyperid/simulator.hpp"

namespace hyperid {

/// Thrown for malformed configuration or input files (exit code 2 at the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Effective settings of a CLI run: the experiment plus output and scan knobs.
struct RunConfig {
    ExperimentConfig experiment;
    std::string preset = "vdp";
    std::filesystem::path output_dir = "out";
    int scan_points = 201;
    double scan_half_width = 2.0;
};

/// Overlays the keys of a JSON object onto `base`. Accepted keys:
///   preset, theta, xi0, T, n, windows, lambda, trials, seed, noise,
///   substeps, threads, output_dir, scan_points, scan_half_width.
/// Unknown keys or wrong types raise ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
nlohmann::json to_json(const ExperimentConfig& config);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

/// Header: index,time,y_true,z,d0,...,dm. index is 1-based.
std::string trajectory_csv(const Trajectory& traj, std::span<const double> z);

struct ObservationData {
    std::vector<double> time;  // empty when the file has no time column
    std::vector<double> z;
};
/// Reads any CSV with a header containing a "z" column (and optionally "time").
ObservationData read_observations(const std::filesystem::path& path);

/// Header: N,trial,seed,theta_hat_1..p,error_1..p,sigma_min_phi_hat.
std::string trials_csv(const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentResult& result);
/// Header: value,objective. Diverged grid points carry "nan".
std::string curve_csv(const LikelihoodCurve& curve);
/// Header: quantity,empirical,bound,ratio,tolerance,asserted,pass.
std::string bound_report_csv(const BoundReport& report);

nlohmann::json run_metadata(std::uint64_t seed);

}  // namespace hyperid
