#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace hyperid {

/// Known state-to-regressor map phi: R^m -> R^p of the flow
/// d^m y / dt^m = theta^T phi(xi), declared alpha-Hoelder with coefficient C_phi.
/// The Hoelder pair is metadata; it is not verified.
struct FeatureMap {
    std::string name;
    int state_dim = 0;  // m
    int output_dim = 0;  // p
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
    double alpha = 1.0;
    double C_phi = 1.0;

    Eigen::VectorXd operator()(const Eigen::VectorXd& xi) const { return eval(xi); }
};

/// phi(xi) = ((1 - xi0^2) xi1, xi0).
FeatureMap van_der_pol_features();

/// phi(xi) = xi (p = m).
FeatureMap identity_features(int m);

/// phi(xi) = (1): constant m-th derivative, polynomial trajectories.
FeatureMap constant_features(int m);

}  // namespace hyperid
