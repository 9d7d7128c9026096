#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hyperid/orthopoly.hpp"

namespace hyperid {

/// Disjoint partition of n samples into windows of N consecutive samples.
/// Window i covers 1-based samples starts[i]+1 .. starts[i]+N; trailing
/// n mod N samples are unused.
struct WindowPlan {
    int n = 0;
    int window = 0;
    int count = 0;
    std::vector<int> starts;

    /// t_i = starts[i] * T / n.
    double start_time(int i, double T) const;
    std::vector<double> start_times(double T) const;
};

WindowPlan plan_windows(int n, int N);

/// Entry (i, d) estimates the d-th derivative of the output at the start of
/// window i.
struct DerivativeEstimates {
    Eigen::MatrixXd values;  // count x (m+1)
    WindowPlan plan;
    double horizon = 0.0;

    int order() const { return static_cast<int>(values.cols()) - 1; }
    int windows() const { return static_cast<int>(values.rows()); }
};

/// Applies the order-0..m filters to every window of z (z[k] is the sample at
/// time (k+1) T / n).
DerivativeEstimates estimate_derivatives(std::span<const double> z, double T, int m,
                                         const WindowPlan& plan, const WeightFunction& rho);

/// Convenience overload with the uniform weight.
DerivativeEstimates estimate_derivatives(std::span<const double> z, double T, int m,
                                         const WindowPlan& plan);

/// Smallest window the pipeline accepts for derivative order m.
constexpr int min_window(int m) { return 2 * (m + 1); }

/// Bias-variance balancing window size
///   N = [(2m+1) B / (2 A)]^{1/(2m+3)} n^{(2m+2)/(2m+3)},
/// rounded and clamped to [2(m+1), n].
int select_window_size(double A_hat, double B_hat, int m, int n);

}  // namespace hyperid
