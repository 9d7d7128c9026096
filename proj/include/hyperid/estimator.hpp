#pragma once

#include <Eigen/Dense>

#include "hyperid/differentiator.hpp"
#include "hyperid/feature_map.hpp"

namespace hyperid {

/// Default ridge coefficient.
inline constexpr double kDefaultLambda = 1.0;

/// Rows of Phi_hat are phi applied to the first m derivative estimates of each
/// window; u_hat holds the m-th derivative estimates.
struct RegressionProblem {
    Eigen::MatrixXd Phi_hat;  // n' x p
    Eigen::VectorXd u_hat;    // n'
    double lambda = kDefaultLambda;

    Eigen::Index windows() const { return Phi_hat.rows(); }
    Eigen::Index params() const { return Phi_hat.cols(); }
};

struct Estimate {
    Eigen::VectorXd theta_hat;
    double sigma_min_phi_hat = 0.0;
    double lambda_used = 0.0;
};

RegressionProblem build_regression(const DerivativeEstimates& derivs, const FeatureMap& phi,
                                   double lambda);

/// theta_hat = pinv([lambda I; Phi_hat]) [0; u_hat], with the pseudoinverse
/// taken by SVD of the stacked matrix. Singular values at or below 1e-12 of
/// the largest count as zero. Throws SingularProblemError when lambda = 0 and
/// Phi_hat is rank deficient.
Estimate ridge_solve(const RegressionProblem& problem);

/// Least singular value; zero when the matrix has fewer rows than columns.
double min_singular_value(const Eigen::MatrixXd& A);

/// Parsimonious regularization lambda* = sqrt(n') C_phi eps_N^{alpha/2} n^{-alpha/(2m+3)}.
double lambda_star(double C_phi, double eps_N, double alpha, int m, int n, int n_prime);

}  // namespace hyperid
