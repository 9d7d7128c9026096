#include "hyperid/feature_map.hpp"

#include <stdexcept>
#include <string>

namespace hyperid {

FeatureMap van_der_pol_features() {
    FeatureMap phi;
    phi.name = "van_der_pol";
    phi.state_dim = 2;
    phi.output_dim = 2;
    phi.eval = [](const Eigen::VectorXd& xi) {
        Eigen::VectorXd out(2);
        out << (1.0 - xi(0) * xi(0)) * xi(1), xi(0);
        return out;
    };
    return phi;
}

FeatureMap identity_features(int m) {
    if (m < 1) throw std::invalid_argument("identity_features: m must be positive");
    FeatureMap phi;
    phi.name = "identity";
    phi.state_dim = m;
    phi.output_dim = m;
    phi.eval = [](const Eigen::VectorXd& xi) { return Eigen::VectorXd(xi); };
    phi.alpha = 1.0;
    phi.C_phi = 1.0;
    return phi;
}

FeatureMap constant_features(int m) {
    if (m < 1) throw std::invalid_argument("constant_features: m must be positive");
    FeatureMap phi;
    phi.name = "constant";
    phi.state_dim = m;
    phi.output_dim = 1;
    phi.eval = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); };
    phi.alpha = 1.0;
    phi.C_phi = 0.0;
    return phi;
}

}  // namespace hyperid
