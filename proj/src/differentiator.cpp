#include "hyperid/differentiator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperid {

double WindowPlan::start_time(int i, double T) const {
    return static_cast<double>(starts.at(static_cast<std::size_t>(i))) * T / n;
}

std::vector<double> WindowPlan::start_times(double T) const {
    std::vector<double> t(starts.size());
    for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = start_time(i, T);
    return t;
}

WindowPlan plan_windows(int n, int N) {
    if (N < 1) {
        throw std::invalid_argument("plan_windows: window length must be positive");
    }
    if (N > n) {
        throw std::invalid_argument("plan_windows: window length " + std::to_string(N) +
                                    " exceeds sample count " + std::to_string(n));
    }
    WindowPlan plan;
    plan.n = n;
    plan.window = N;
    plan.count = n / N;
    plan.starts.resize(static_cast<std::size_t>(plan.count));
    for (int i = 0; i < plan.count; ++i) plan.starts[static_cast<std::size_t>(i)] = i * N;
    return plan;
}

DerivativeEstimates estimate_derivatives(std::span<const double> z, double T, int m,
                                         const WindowPlan& plan, const WeightFunction& rho) {
    if (static_cast<int>(z.size()) != plan.n) {
        throw std::invalid_argument("estimate_derivatives: data length " +
                                    std::to_string(z.size()) + " differs from plan n=" +
                                    std::to_string(plan.n));
    }
    if (m < 0 || m >= plan.window) {
        throw std::invalid_argument("estimate_derivatives: order m=" + std::to_string(m) +
                                    " needs window length > m (N=" +
                                    std::to_string(plan.window) + ")");
    }
    if (rho.size() != plan.window) {
        throw std::invalid_argument("estimate_derivatives: weight length differs from N");
    }
    const PolynomialFamily family = orthogonal_family(plan.window, m, rho);
    std::vector<FilterCoefficients> filters;
    filters.reserve(static_cast<std::size_t>(m) + 1);
    for (int d = 0; d <= m; ++d) filters.push_back(filter_coefficients(family, d, plan.n, T));

    DerivativeEstimates out;
    out.plan = plan;
    out.horizon = T;
    out.values.resize(plan.count, m + 1);
    for (int i = 0; i < plan.count; ++i) {
        const auto window = z.subspan(static_cast<std::size_t>(plan.starts[static_cast<std::size_t>(i)]),
                                      static_cast<std::size_t>(plan.window));
        for (int d = 0; d <= m; ++d) {
            const auto& c = filters[static_cast<std::size_t>(d)].weights;
            double acc = 0.0;
            for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * window[j];
            out.values(i, d) = acc;
        }
    }
    return out;
}

DerivativeEstimates estimate_derivatives(std::span<const double> z, double T, int m,
                                         const WindowPlan& plan) {
    return estimate_derivatives(z, T, m, plan, WeightFunction::uniform(plan.window));
}

int select_window_size(double A_hat, double B_hat, int m, int n) {
    if (!(A_hat > 0.0) || !(B_hat > 0.0)) {
        throw std::invalid_argument("select_window_size: constants must be positive");
    }
    if (m < 0 || n < min_window(m)) {
        throw std::invalid_argument("select_window_size: need m >= 0 and n >= 2(m+1)");
    }
    const double e = 2.0 * m + 3.0;
    const double raw = std::pow((2.0 * m + 1.0) * B_hat / (2.0 * A_hat), 1.0 / e) *
                       std::pow(static_cast<double>(n), (2.0 * m + 2.0) / e);
    const double lo = min_window(m);
    const double hi = n;
    return static_cast<int>(std::clamp(std::round(raw), lo, hi));
}

}  // namespace hyperid
