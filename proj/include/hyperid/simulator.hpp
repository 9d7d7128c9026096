#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hyperid/feature_map.hpp"

namespace hyperid {

/// Parameter-linear hyperjerk system d^m y/dt^m = theta^T phi(xi), where
/// xi = (y, y', ..., y^{(m-1)}) and xi(0) = xi0, observed on [0, T].
struct SystemModel {
    std::string name;
    FeatureMap phi;
    Eigen::VectorXd theta;
    Eigen::VectorXd xi0;
    double T = 1.0;

    int order() const { return phi.state_dim; }
    int params() const { return phi.output_dim; }
    /// m-th derivative at state xi.
    double flow(const Eigen::VectorXd& xi) const { return theta.dot(phi(xi)); }
    /// Throws std::invalid_argument on inconsistent dimensions or T <= 0.
    void validate() const;
};

/// x'' = theta1 (1 - x^2) x' + theta2 x.
SystemModel van_der_pol(double theta1, double theta2, double x0, double xdot0, double T);
/// Parameter values of the reference Van der Pol experiment.
SystemModel van_der_pol_reference();
/// x'' = -omega^2 x - 2 zeta omega x' with identity features.
SystemModel damped_oscillator(double omega, double zeta, double x0, double v0, double T);
/// y' = -rate y with identity features.
SystemModel exponential_decay(double rate, double y0, double T);
/// y'' = c with constant features; trajectories are quadratics.
SystemModel constant_acceleration(double c, double y0, double v0, double T);

/// Looks up a preset by name: vdp, harmonic, damped, decay, const_accel.
SystemModel model_preset(std::string_view name);
std::vector<std::string> preset_names();

struct NoiseModel {
    enum class Kind { None, Gaussian, SignFlip };
    Kind kind = Kind::None;
    /// Variance for Gaussian; offset e for SignFlip.
    double param = 0.0;

    static NoiseModel none() { return {}; }
    static NoiseModel gaussian(double variance);
    static NoiseModel sign_flip(double e);
    /// Parses "none", "gaussian:<variance>" or "sign_flip:<e>".
    static NoiseModel parse(std::string_view text);
    std::string to_string() const;
};

/// Exact trajectory on the sample grid t_k = k T / n, k = 1..n.
struct Trajectory {
    double T = 1.0;
    Eigen::VectorXd times;   // n
    Eigen::MatrixXd states;  // n x (m+1), column d = d-th derivative
    Eigen::VectorXd initial; // m+1 derivatives at t = 0

    int samples() const { return static_cast<int>(times.size()); }
    int order() const { return static_cast<int>(states.cols()) - 1; }
    Eigen::VectorXd y() const { return states.col(0); }
    /// Derivatives at time k T / n; k = 0 is the initial state.
    Eigen::VectorXd derivatives_at(int k) const;
};

/// Fixed-step classical RK4 on the companion system with step (T/n)/substeps.
/// Throws IntegrationDivergedError on a non-finite state.
Trajectory integrate(const SystemModel& model, int n, int substeps = 10);

/// z_k = y_k + w_k under the given noise law, reproducible from the seed.
std::vector<double> observe(const Trajectory& traj, const NoiseModel& noise, std::uint64_t seed);

}  // namespace hyperid
