#include "hyperid/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperid/errors.hpp"

namespace hyperid {

namespace {
constexpr double kRankTolerance = 1e-12;
}

RegressionProblem build_regression(const DerivativeEstimates& derivs, const FeatureMap& phi,
                                   double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("build_regression: lambda must be finite and >= 0");
    }
    if (derivs.windows() == 0) {
        throw std::invalid_argument("build_regression: no windows");
    }
    const int m = phi.state_dim;
    if (derivs.order() != m) {
        throw std::invalid_argument("build_regression: derivative order " +
                                    std::to_string(derivs.order()) +
                                    " does not match feature map state dimension " +
                                    std::to_string(m));
    }
    const int p = phi.output_dim;
    RegressionProblem prob;
    prob.lambda = lambda;
    prob.Phi_hat.resize(derivs.windows(), p);
    prob.u_hat = derivs.values.col(m);
    for (int i = 0; i < derivs.windows(); ++i) {
        const Eigen::VectorXd xi = derivs.values.row(i).head(m).transpose();
        const Eigen::VectorXd row = phi(xi);
        if (row.size() != p) {
            throw std::invalid_argument("build_regression: feature map returned " +
                                        std::to_string(row.size()) + " entries, expected " +
                                        std::to_string(p));
        }
        prob.Phi_hat.row(i) = row.transpose();
    }
    return prob;
}

double min_singular_value(const Eigen::MatrixXd& A) {
    if (A.rows() < A.cols() || A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

Estimate ridge_solve(const RegressionProblem& problem) {
    const Eigen::Index p = problem.params();
    const Eigen::Index rows = problem.windows();
    if (p == 0 || rows == 0) {
        throw std::invalid_argument("ridge_solve: empty problem");
    }
    if (problem.u_hat.size() != rows) {
        throw std::invalid_argument("ridge_solve: predictor length differs from row count");
    }
    if (!(problem.lambda >= 0.0)) {
        throw std::invalid_argument("ridge_solve: lambda must be >= 0");
    }

    Eigen::MatrixXd R(p + rows, p);
    R.topRows(p) = problem.lambda * Eigen::MatrixXd::Identity(p, p);
    R.bottomRows(rows) = problem.Phi_hat;
    Eigen::VectorXd u(p + rows);
    u.head(p).setZero();
    u.tail(rows) = problem.u_hat;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = kRankTolerance * (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > cutoff) ++rank;
    }
    if (problem.lambda == 0.0 && rank < p) {
        throw SingularProblemError("ridge_solve: regressor matrix has rank " +
                                   std::to_string(rank) + " < " + std::to_string(p) +
                                   " and lambda = 0");
    }

    Eigen::VectorXd proj = svd.matrixU().leftCols(rank).transpose() * u;
    for (Eigen::Index k = 0; k < rank; ++k) proj(k) /= s(k);

    Estimate est;
    est.theta_hat = svd.matrixV().leftCols(rank) * proj;
    est.sigma_min_phi_hat = min_singular_value(problem.Phi_hat);
    est.lambda_used = problem.lambda;
    return est;
}

double lambda_star(double C_phi, double eps_N, double alpha, int m, int n, int n_prime) {
    if (!(C_phi > 0.0) || !(eps_N > 0.0) || !(alpha > 0.0) || alpha > 1.0 || m < 0 || n < 1 ||
        n_prime < 1) {
        throw std::invalid_argument("lambda_star: inputs must be positive with alpha in (0, 1]");
    }
    return std::sqrt(static_cast<double>(n_prime)) * C_phi * std::pow(eps_N, alpha / 2.0) *
           std::pow(static_cast<double>(n), -alpha / (2.0 * m + 3.0));
}

}  // namespace hyperid
