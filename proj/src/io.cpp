#include "hyperid/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hyperid/rng.hpp"

namespace hyperid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Eigen::VectorXd vector_from_json(const json& j, const char* key) {
    if (!j.is_array()) throw ConfigError(std::string("config key '") + key + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) {
            throw ConfigError(std::string("config key '") + key + "' must hold numbers");
        }
        v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
    }
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
    return out;
}

template <typename T>
T get_as(const json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg = std::move(base);
    auto& ex = cfg.experiment;

    if (j.contains("preset")) {
        cfg.preset = get_as<std::string>(j["preset"], "preset");
        try {
            ex.model = model_preset(cfg.preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "preset") {
            continue;
        } else if (key == "theta") {
            ex.model.theta = vector_from_json(value, "theta");
        } else if (key == "xi0") {
            ex.model.xi0 = vector_from_json(value, "xi0");
        } else if (key == "T") {
            ex.model.T = get_as<double>(value, key);
        } else if (key == "n") {
            ex.n = get_as<int>(value, key);
        } else if (key == "windows") {
            ex.windows = get_as<std::vector<int>>(value, key);
        } else if (key == "lambda") {
            ex.lambda = get_as<double>(value, key);
        } else if (key == "trials") {
            ex.trials = get_as<int>(value, key);
        } else if (key == "seed") {
            ex.seed = get_as<std::uint64_t>(value, key);
        } else if (key == "noise") {
            try {
                ex.noise = NoiseModel::parse(get_as<std::string>(value, key));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "substeps") {
            ex.substeps = get_as<int>(value, key);
        } else if (key == "threads") {
            ex.threads = get_as<int>(value, key);
        } else if (key == "output_dir") {
            cfg.output_dir = get_as<std::string>(value, key);
        } else if (key == "scan_points") {
            cfg.scan_points = get_as<int>(value, key);
        } else if (key == "scan_half_width") {
            cfg.scan_half_width = get_as<double>(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j, std::move(base));
}

json to_json(const ExperimentConfig& c) {
    return json{
        {"model", c.model.name},
        {"theta", vector_to_json(c.model.theta)},
        {"xi0", vector_to_json(c.model.xi0)},
        {"T", c.model.T},
        {"n", c.n},
        {"windows", c.windows},
        {"lambda", c.lambda},
        {"trials", c.trials},
        {"seed", c.seed},
        {"noise", c.noise.to_string()},
        {"substeps", c.substeps},
    };
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trajectory_csv(const Trajectory& traj, std::span<const double> z) {
    const int n = traj.samples();
    if (static_cast<int>(z.size()) != n) {
        throw std::invalid_argument("trajectory_csv: observation length differs from trajectory");
    }
    const int m = traj.order();
    std::string out = "index,time,y_true,z";
    for (int d = 0; d <= m; ++d) out += ",d" + std::to_string(d);
    out += '\n';
    for (int k = 0; k < n; ++k) {
        out += std::to_string(k + 1);
        out += ',' + format_double(traj.times(k));
        out += ',' + format_double(traj.states(k, 0));
        out += ',' + format_double(z[static_cast<std::size_t>(k)]);
        for (int d = 0; d <= m; ++d) out += ',' + format_double(traj.states(k, d));
        out += '\n';
    }
    return out;
}

ObservationData read_observations(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("data file " + path.string() + " is empty");
    const auto header = split_csv_line(line);
    int z_col = -1;
    int t_col = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "z") z_col = static_cast<int>(k);
        if (header[k] == "time") t_col = static_cast<int>(k);
    }
    if (z_col < 0) throw ConfigError("data file " + path.string() + " has no 'z' column");

    ObservationData data;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        auto cell_value = [&](int col) {
            if (col >= static_cast<int>(cells.size())) {
                throw ConfigError(path.string() + ":" + std::to_string(row) + ": missing column");
            }
            const std::string& s = cells[static_cast<std::size_t>(col)];
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size()) {
                throw ConfigError(path.string() + ":" + std::to_string(row) + ": bad number '" +
                                  s + "'");
            }
            return v;
        };
        data.z.push_back(cell_value(z_col));
        if (t_col >= 0) data.time.push_back(cell_value(t_col));
    }
    return data;
}

std::string trials_csv(const ExperimentResult& result) {
    const auto p = result.config.model.theta.size();
    std::string out = "N,trial,seed";
    for (Eigen::Index k = 1; k <= p; ++k) out += ",theta_hat_" + std::to_string(k);
    for (Eigen::Index k = 1; k <= p; ++k) out += ",error_" + std::to_string(k);
    out += ",sigma_min_phi_hat\n";
    for (const auto& r : result.records) {
        out += std::to_string(r.window) + ',' + std::to_string(r.trial) + ',' +
               std::to_string(r.seed);
        for (Eigen::Index k = 0; k < p; ++k) out += ',' + format_double(r.theta_hat(k));
        for (Eigen::Index k = 0; k < p; ++k) out += ',' + format_double(r.error(k));
        out += ',' + format_double(r.sigma_min_phi_hat) + '\n';
    }
    return out;
}

json run_metadata(std::uint64_t seed) {
    return json{
        {"generator", "hyperid"},
        {"version", std::string(kVersion)},
        {"rng", std::string(CounterRng::kName)},
        {"base_seed", seed},
    };
}

json summary_json(const ExperimentResult& result) {
    json rows = json::array();
    for (const auto& s : result.summaries) {
        rows.push_back(json{
            {"N", s.window},
            {"trials", s.trials},
            {"bias", vector_to_json(s.mean_error)},
            {"variance", vector_to_json(s.variance)},
            {"variance_se", vector_to_json(s.variance_se)},
            {"rmse", vector_to_json(s.rmse)},
            {"rrmse", vector_to_json(s.rrmse)},
            {"vector_rmse", s.vector_rmse},
            {"vector_mse", s.vector_mse},
            {"vector_rrmse", s.vector_rrmse},
            {"mean_abs_error", s.mean_abs_error},
        });
    }
    json meta = run_metadata(result.config.seed);
    meta["timestamp"] = result.timestamp;
    return json{{"config", to_json(result.config)}, {"per_N", rows}, {"metadata", meta}};
}

std::string curve_csv(const LikelihoodCurve& curve) {
    std::string out = "value,objective\n";
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        const auto& v = curve.objective[k];
        out += format_double(curve.grid[k]) + ',' +
               (v ? format_double(*v) : std::string("nan")) + '\n';
    }
    return out;
}

std::string bound_report_csv(const BoundReport& report) {
    std::string out = "quantity,empirical,bound,ratio,tolerance,asserted,pass\n";
    for (const auto& r : report.rows) {
        out += r.quantity + ',' + format_double(r.empirical) + ',' +
               format_double(r.bound) + ',' + format_double(r.ratio) + ',' +
               format_double(r.tolerance) + ',' + (r.asserted ? "1" : "0") + ',' +
               (r.pass ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace hyperid
