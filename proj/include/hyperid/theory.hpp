#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>

#include "hyperid/orthopoly.hpp"

namespace hyperid::theory {

/// Constants of the derivative-filter error bounds for one window and order.
struct FilterBoundInputs {
    double M = 0.0;         // sup |y^{(d+1)}| over the window
    double T = 1.0;         // horizon
    int d = 0;              // derivative order
    int N = 1;              // window length
    int n = 1;              // total samples
    double g_over_h = 1.0;  // g^d / h^d
    double s = 0.0;         // noise functional s_i^d (not squared)
    double h = 1.0;         // h^d
};

/// (M T / (d+1)) (N / n) (g / h).
double bias_bound(const FilterBoundInputs& in);
/// (n^{2d} / N^{2d+1}) (d! s / (T^d h))^2; equality holds for independent noise.
double variance_bound(const FilterBoundInputs& in);
/// bias_bound^2 + variance_bound.
double mse_bound(const FilterBoundInputs& in);
/// A = (M T / (d+1))^2 (g/h)^2, the coefficient of N^2/n^2 in the MSE bound.
double mse_constant_A(const FilterBoundInputs& in);
/// B = (d! s / (T^d h))^2, the coefficient of n^{2d}/N^{2d+1}.
double mse_constant_B(const FilterBoundInputs& in);

/// s_i^d = sqrt((1/N) sum_j rho(j/N)^2 p^d(j/N)^2 Var w_j) for the window's
/// per-sample noise variances.
double noise_functional(const PolynomialFamily& family, int d,
                        std::span<const double> noise_variance);

/// Bound inputs for a window with constant noise variance.
FilterBoundInputs filter_bound_inputs(const PolynomialFamily& family, int d, int n, double T,
                                      double M, double noise_variance);

/// eps_N = 2 (2m+1)^{1/(2m+3)} A^{(2m+1)/(2m+3)} B^{2/(2m+3)} / n'.
double epsilon_N(double A_tilde, double B_tilde, int m, int n_prime);

/// ||pinv([lambda I; A + D]) - pinv([0; A])|| <= 2 (lambda + delta) /
/// (sigma (lambda + (sigma - delta)^+)) for sigma = sigma_min(A), delta = ||D||.
double wedin_S_bound(double sigma, double delta, double lambda);

/// Law of the perturbation norm delta as seen by the head-body-tail split.
struct DeltaLaw {
    /// P(delta > v).
    std::function<double(double)> survival;
    /// E[delta 1{delta > t}].
    std::function<double(double)> tail_moment;
};

struct HeadBodyTail {
    double head = 0.0;
    double body = 0.0;
    double tail = 0.0;
    double total() const { return head + body + tail; }
};

/// s_head = 4 lambda / sigma^2,
/// s_body = 3 int_lambda^sigma (lambda + sigma) P(delta > v) / (sigma (lambda + sigma - v)^2) dv,
/// s_tail = 4 E[delta 1{delta > sigma}] / (sigma lambda).
/// Requires 0 < lambda < sigma.
HeadBodyTail head_body_tail(double sigma, double lambda, const DeltaLaw& law);

/// Adaptive Simpson quadrature to the given relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 50);

struct MAEBoundInputs {
    double eps_N = 0.0;
    double eps_N_m = 0.0;
    double sigma_bar = 1.0;  // sigma_min(Phi) / sqrt(n')
    double U_bar = 0.0;      // ||u|| / sqrt(n')
    double C_phi = 1.0;
    double alpha = 1.0;
    int m = 1;
    std::int64_t n = 1;
    std::int64_t n_prime = 1;
    double lambda = 1.0;
};

struct MAEBound {
    /// v term, S u head, S u body, S u tail, S v cross term.
    std::array<double, 5> terms{};
    double total = 0.0;
};

/// Five-term bound on E ||theta_hat - theta||.
MAEBound delta_theta_mae_bound(const MAEBoundInputs& in);

}  // namespace hyperid::theory
