#include "hyperid/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperid::theory {

namespace {

double factorial(int d) {
    double f = 1.0;
    for (int k = 2; k <= d; ++k) f *= k;
    return f;
}

void check_filter_inputs(const FilterBoundInputs& in) {
    if (in.d < 0 || in.N < 1 || in.n < in.N || !(in.T > 0.0) || !(in.h > 0.0) ||
        in.M < 0.0 || in.s < 0.0 || in.g_over_h < 0.0) {
        throw std::invalid_argument("theory: invalid filter bound inputs");
    }
}

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double bias_bound(const FilterBoundInputs& in) {
    check_filter_inputs(in);
    return (in.M * in.T / (in.d + 1.0)) * (static_cast<double>(in.N) / in.n) * in.g_over_h;
}

double variance_bound(const FilterBoundInputs& in) {
    check_filter_inputs(in);
    return std::pow(static_cast<double>(in.n), 2 * in.d) / std::pow(in.N, 2 * in.d + 1) *
           mse_constant_B(in);
}

double mse_bound(const FilterBoundInputs& in) {
    const double b = bias_bound(in);
    return b * b + variance_bound(in);
}

double mse_constant_A(const FilterBoundInputs& in) {
    check_filter_inputs(in);
    const double a = in.M * in.T / (in.d + 1.0) * in.g_over_h;
    return a * a;
}

double mse_constant_B(const FilterBoundInputs& in) {
    check_filter_inputs(in);
    const double b = factorial(in.d) * in.s / (std::pow(in.T, in.d) * in.h);
    return b * b;
}

double noise_functional(const PolynomialFamily& family, int d,
                        std::span<const double> noise_variance) {
    const int N = family.window();
    if (static_cast<int>(noise_variance.size()) != N) {
        throw std::invalid_argument("noise_functional: variance length differs from N");
    }
    const auto p = family.node_values(d);
    const auto rho = family.weight().samples();
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
        const auto k = static_cast<std::size_t>(j);
        if (noise_variance[k] < 0.0) {
            throw std::invalid_argument("noise_functional: negative variance");
        }
        acc += rho[k] * rho[k] * p[k] * p[k] * noise_variance[k];
    }
    return std::sqrt(acc / N);
}

FilterBoundInputs filter_bound_inputs(const PolynomialFamily& family, int d, int n, double T,
                                      double M, double noise_variance) {
    const std::vector<double> var(static_cast<std::size_t>(family.window()), noise_variance);
    FilterBoundInputs in;
    in.M = M;
    in.T = T;
    in.d = d;
    in.N = family.window();
    in.n = n;
    in.h = family.h(d);
    in.g_over_h = family.g(d) / family.h(d);
    in.s = noise_functional(family, d, var);
    return in;
}

double epsilon_N(double A_tilde, double B_tilde, int m, int n_prime) {
    if (A_tilde < 0.0 || B_tilde < 0.0 || m < 0 || n_prime < 1) {
        throw std::invalid_argument("epsilon_N: need A, B >= 0, m >= 0, n' >= 1");
    }
    const double e = 2.0 * m + 3.0;
    return 2.0 * std::pow(2.0 * m + 1.0, 1.0 / e) * std::pow(A_tilde, (2.0 * m + 1.0) / e) *
           std::pow(B_tilde, 2.0 / e) / n_prime;
}

double wedin_S_bound(double sigma, double delta, double lambda) {
    if (!(sigma > 0.0) || !(lambda > 0.0) || !(delta >= 0.0)) {
        throw std::invalid_argument("wedin_S_bound: need sigma > 0, lambda > 0, delta >= 0");
    }
    return 2.0 * (lambda + delta) / (sigma * (lambda + std::max(0.0, sigma - delta)));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    // Coarse composite pass sets the absolute scale and keeps narrow features
    // from being missed by the first Simpson panel.
    constexpr int kPanels = 16;
    const double w = (b - a) / kPanels;
    std::array<double, 2 * kPanels + 1> fx{};
    for (int k = 0; k <= 2 * kPanels; ++k) fx[static_cast<std::size_t>(k)] = f(a + 0.5 * w * k);
    double coarse = 0.0;
    std::array<double, kPanels> panel{};
    for (int k = 0; k < kPanels; ++k) {
        const auto i = static_cast<std::size_t>(2 * k);
        panel[static_cast<std::size_t>(k)] =
            simpson(fx[i], fx[i + 1], fx[i + 2], a + k * w, a + (k + 1) * w);
        coarse += std::abs(panel[static_cast<std::size_t>(k)]);
    }
    const double tol = rel_tol * std::max(coarse, 1e-300) / kPanels;
    double total = 0.0;
    for (int k = 0; k < kPanels; ++k) {
        const auto i = static_cast<std::size_t>(2 * k);
        total += simpson_step(f, a + k * w, a + (k + 1) * w, fx[i], fx[i + 1], fx[i + 2],
                              panel[static_cast<std::size_t>(k)], tol, max_depth);
    }
    return total;
}

HeadBodyTail head_body_tail(double sigma, double lambda, const DeltaLaw& law) {
    if (!(lambda > 0.0) || !(lambda < sigma)) {
        throw std::invalid_argument("head_body_tail: need 0 < lambda < sigma");
    }
    HeadBodyTail out;
    out.head = 4.0 * lambda / (sigma * sigma);

    const double upper = sigma - 1e-9 * (sigma - lambda);
    auto integrand = [&](double v) {
        const double gap = lambda + sigma - v;
        return (lambda + sigma) * law.survival(v) / (sigma * gap * gap);
    };
    out.body = 3.0 * adaptive_simpson(integrand, lambda, upper, 1e-10);
    out.tail = 4.0 * law.tail_moment(sigma) / (sigma * lambda);
    return out;
}

MAEBound delta_theta_mae_bound(const MAEBoundInputs& in) {
    if (!(in.sigma_bar > 0.0) || !(in.lambda > 0.0) || in.eps_N < 0.0 || in.eps_N_m < 0.0 ||
        in.U_bar < 0.0 || in.C_phi < 0.0 || !(in.alpha > 0.0) || in.alpha > 1.0 || in.m < 0 ||
        in.n < 1 || in.n_prime < 1) {
        throw std::invalid_argument("delta_theta_mae_bound: invalid inputs");
    }
    const double a = in.alpha;
    const double e = 2.0 * in.m + 3.0;
    const double n = static_cast<double>(in.n);
    const double np = static_cast<double>(in.n_prime);
    const double sqrt_np = std::sqrt(np);
    const double sb = in.sigma_bar;
    const double lam = in.lambda;
    const double n_1 = std::pow(n, 1.0 / e);  // n^{1/(2m+3)}
    const double n_2 = std::pow(n, 2.0 / e);  // n^{2/(2m+3)}
    const double sb_2a = std::pow(sb, 2.0 / a);
    const double C_2a = std::pow(in.C_phi, 2.0 / a);

    MAEBound out;
    // ||v|| / sigma_min(R)
    out.terms[0] = std::sqrt(in.eps_N_m) / (sb * n_1);
    // ||u|| s_head
    out.terms[1] = 4.0 * in.U_bar * lam / (sb * sb * sqrt_np);
    // ||u|| s_body
    out.terms[2] = 6.0 * in.C_phi * in.C_phi * in.U_bar * std::pow(in.eps_N, a) /
                   std::pow(n, 2.0 * a / e) *
                   (2.0 * std::log(sb * sqrt_np / lam) / (sb * sb * sb) +
                    sqrt_np / (lam * sb * sb));
    // ||u|| s_tail
    out.terms[3] = 4.0 * C_2a * in.U_bar * in.eps_N * sqrt_np / (lam * sb_2a * n_2);
    // E ||S|| ||v|| via Hoelder
    const double inner = C_2a * in.eps_N * std::pow(np, 1.0 / a) /
                             (sb_2a * n_2 * std::pow(lam, 2.0 / a)) +
                         1.0 / sb_2a;
    out.terms[4] = std::pow(2.0, 2.0 - a / 2.0) * std::sqrt(in.eps_N_m) / n_1 *
                   std::pow(inner, a / 2.0);
    for (double t : out.terms) out.total += t;
    return out;
}

}  // namespace hyperid::theory
