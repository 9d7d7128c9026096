#include "hyperid/simulator.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hyperid/errors.hpp"
#include "hyperid/rng.hpp"

namespace hyperid {

void SystemModel::validate() const {
    if (!phi.eval) throw std::invalid_argument("SystemModel: feature map has no evaluator");
    if (phi.state_dim < 1 || phi.output_dim < 1) {
        throw std::invalid_argument("SystemModel: feature map dimensions must be positive");
    }
    if (theta.size() != phi.output_dim) {
        throw std::invalid_argument("SystemModel: theta has " + std::to_string(theta.size()) +
                                    " entries, feature map produces " +
                                    std::to_string(phi.output_dim));
    }
    if (xi0.size() != phi.state_dim) {
        throw std::invalid_argument("SystemModel: initial state has " +
                                    std::to_string(xi0.size()) + " entries, expected " +
                                    std::to_string(phi.state_dim));
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("SystemModel: horizon must be positive");
    }
}

SystemModel van_der_pol(double theta1, double theta2, double x0, double xdot0, double T) {
    SystemModel model;
    model.name = "vdp";
    model.phi = van_der_pol_features();
    model.theta = Eigen::Vector2d(theta1, theta2);
    model.xi0 = Eigen::Vector2d(x0, xdot0);
    model.T = T;
    return model;
}

SystemModel van_der_pol_reference() { return van_der_pol(40.0, -400.0, 1.0, 20.0, 1.0); }

SystemModel damped_oscillator(double omega, double zeta, double x0, double v0, double T) {
    SystemModel model;
    model.name = "damped";
    model.phi = identity_features(2);
    model.theta = Eigen::Vector2d(-omega * omega, -2.0 * zeta * omega);
    model.xi0 = Eigen::Vector2d(x0, v0);
    model.T = T;
    return model;
}

SystemModel exponential_decay(double rate, double y0, double T) {
    SystemModel model;
    model.name = "decay";
    model.phi = identity_features(1);
    model.theta = Eigen::VectorXd::Constant(1, -rate);
    model.xi0 = Eigen::VectorXd::Constant(1, y0);
    model.T = T;
    return model;
}

SystemModel constant_acceleration(double c, double y0, double v0, double T) {
    SystemModel model;
    model.name = "const_accel";
    model.phi = constant_features(2);
    model.theta = Eigen::VectorXd::Constant(1, c);
    model.xi0 = Eigen::Vector2d(y0, v0);
    model.T = T;
    return model;
}

SystemModel model_preset(std::string_view name) {
    if (name == "vdp") return van_der_pol_reference();
    if (name == "harmonic") {
        SystemModel model = van_der_pol(0.0, -400.0, 1.0, 0.0, 1.0);
        model.name = "harmonic";
        return model;
    }
    if (name == "damped") return damped_oscillator(2.0, 0.25, 1.0, 0.0, 10.0);
    if (name == "decay") return exponential_decay(1.0, 1.0, 1.0);
    if (name == "const_accel") return constant_acceleration(-9.81, 0.0, 5.0, 1.0);
    throw std::invalid_argument("unknown model preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"vdp", "harmonic", "damped", "decay", "const_accel"};
}

NoiseModel NoiseModel::gaussian(double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw std::invalid_argument("NoiseModel: variance must be finite and >= 0");
    }
    return {Kind::Gaussian, variance};
}

NoiseModel NoiseModel::sign_flip(double e) {
    if (!std::isfinite(e)) throw std::invalid_argument("NoiseModel: offset must be finite");
    return {Kind::SignFlip, e};
}

NoiseModel NoiseModel::parse(std::string_view text) {
    if (text == "none") return none();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("noise spec '" + std::string(text) +
                                    "' is not none, gaussian:<var> or sign_flip:<e>");
    }
    const auto kind = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
        throw std::invalid_argument("noise spec '" + std::string(text) + "' has a bad number");
    }
    if (kind == "gaussian") return gaussian(value);
    if (kind == "sign_flip") return sign_flip(value);
    throw std::invalid_argument("unknown noise kind '" + std::string(kind) + "'");
}

std::string NoiseModel::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::None:
            return "none";
        case Kind::Gaussian:
            os << "gaussian:" << param;
            break;
        case Kind::SignFlip:
            os << "sign_flip:" << param;
            break;
    }
    return os.str();
}

Eigen::VectorXd Trajectory::derivatives_at(int k) const {
    if (k == 0) return initial;
    return states.row(k - 1).transpose();
}

namespace {

// Companion-form right-hand side: (xi_1, ..., xi_{m-1}, theta^T phi(xi)).
void companion(const SystemModel& model, const Eigen::VectorXd& xi, Eigen::VectorXd& out) {
    const auto m = xi.size();
    for (Eigen::Index k = 0; k + 1 < m; ++k) out(k) = xi(k + 1);
    out(m - 1) = model.flow(xi);
}

Eigen::VectorXd full_state(const SystemModel& model, const Eigen::VectorXd& xi) {
    Eigen::VectorXd s(xi.size() + 1);
    s.head(xi.size()) = xi;
    s(xi.size()) = model.flow(xi);
    return s;
}

}  // namespace

Trajectory integrate(const SystemModel& model, int n, int substeps) {
    model.validate();
    if (n < 2) throw std::invalid_argument("integrate: need n >= 2");
    if (substeps < 1) throw std::invalid_argument("integrate: need substeps >= 1");

    const int m = model.order();
    const double h = model.T / n / substeps;
    Trajectory traj;
    traj.T = model.T;
    traj.times.resize(n);
    traj.states.resize(n, m + 1);
    traj.initial = full_state(model, model.xi0);
    if (!traj.initial.allFinite()) {
        throw IntegrationDivergedError("integrate: non-finite initial state", 0.0);
    }

    Eigen::VectorXd xi = model.xi0;
    Eigen::VectorXd k1(m), k2(m), k3(m), k4(m), tmp(m);
    for (int k = 1; k <= n; ++k) {
        for (int s = 0; s < substeps; ++s) {
            companion(model, xi, k1);
            tmp = xi + 0.5 * h * k1;
            companion(model, tmp, k2);
            tmp = xi + 0.5 * h * k2;
            companion(model, tmp, k3);
            tmp = xi + h * k3;
            companion(model, tmp, k4);
            xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const double t = model.T * k / n;
        if (!xi.allFinite()) {
            throw IntegrationDivergedError("integrate: state diverged near t=" + std::to_string(t), t);
        }
        traj.times(k - 1) = t;
        traj.states.row(k - 1).head(m) = xi.transpose();
        const double top = model.flow(xi);
        if (!std::isfinite(top)) {
            throw IntegrationDivergedError("integrate: flow diverged near t=" + std::to_string(t), t);
        }
        traj.states(k - 1, m) = top;
    }
    return traj;
}

std::vector<double> observe(const Trajectory& traj, const NoiseModel& noise, std::uint64_t seed) {
    const int n = traj.samples();
    std::vector<double> z(static_cast<std::size_t>(n));
    CounterRng rng(seed);
    const double sd = noise.kind == NoiseModel::Kind::Gaussian ? std::sqrt(noise.param) : 0.0;
    for (int k = 0; k < n; ++k) {
        const double y = traj.states(k, 0);
        double w = 0.0;
        switch (noise.kind) {
            case NoiseModel::Kind::None:
                break;
            case NoiseModel::Kind::Gaussian:
                w = sd * rng.gaussian();
                break;
            case NoiseModel::Kind::SignFlip:
                w = rng.coin() ? noise.param + y : -noise.param - y;
                break;
        }
        z[static_cast<std::size_t>(k)] = y + w;
    }
    return z;
}

}  // namespace hyperid
