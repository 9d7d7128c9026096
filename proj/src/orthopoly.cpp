#include "hyperid/orthopoly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperid {

WeightFunction::WeightFunction(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw std::invalid_argument("WeightFunction: no samples");
    }
    for (double w : samples_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("WeightFunction: weights must be finite and positive");
        }
    }
}

WeightFunction WeightFunction::uniform(int N) {
    if (N < 1) {
        throw std::invalid_argument("WeightFunction: N must be positive");
    }
    return WeightFunction(std::vector<double>(static_cast<std::size_t>(N), 1.0));
}

WeightFunction WeightFunction::sampled(int N, const std::function<double(double)>& rho) {
    if (N < 1) {
        throw std::invalid_argument("WeightFunction: N must be positive");
    }
    std::vector<double> w(static_cast<std::size_t>(N));
    for (int j = 1; j <= N; ++j) {
        w[static_cast<std::size_t>(j - 1)] = rho(static_cast<double>(j) / N);
    }
    return WeightFunction(std::move(w));
}

std::vector<double> window_nodes(int N) {
    std::vector<double> x(static_cast<std::size_t>(N));
    for (int j = 1; j <= N; ++j) {
        x[static_cast<std::size_t>(j - 1)] = static_cast<double>(j) / N;
    }
    return x;
}

double inner_product(std::span<const double> f, std::span<const double> g,
                     const WeightFunction& rho) {
    const auto N = static_cast<std::size_t>(rho.size());
    if (f.size() != N || g.size() != N) {
        throw std::invalid_argument("inner_product: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        acc += rho.samples()[j] * f[j] * g[j];
    }
    return acc / static_cast<double>(N);
}

PolynomialFamily::PolynomialFamily(int N, int m, WeightFunction rho)
    : N_(N), m_(m), weight_(std::move(rho)) {}

void PolynomialFamily::check_degree(int d) const {
    if (d < 0 || d > m_) {
        throw std::invalid_argument("PolynomialFamily: degree " + std::to_string(d) +
                                    " outside [0, " + std::to_string(m_) + "]");
    }
}

std::span<const double> PolynomialFamily::coefficients(int d) const {
    check_degree(d);
    return coeffs_[static_cast<std::size_t>(d)];
}

std::span<const double> PolynomialFamily::node_values(int d) const {
    check_degree(d);
    return values_[static_cast<std::size_t>(d)];
}

double PolynomialFamily::h(int d) const {
    check_degree(d);
    return h_[static_cast<std::size_t>(d)];
}

double PolynomialFamily::g(int d) const {
    check_degree(d);
    return g_[static_cast<std::size_t>(d)];
}

double PolynomialFamily::evaluate(int d, double x) const {
    const auto c = coefficients(d);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

PolynomialFamily orthogonal_family(int N, int m, const WeightFunction& rho) {
    if (N < 1) {
        throw std::invalid_argument("orthogonal_family: N must be positive");
    }
    if (m < 0 || m >= N) {
        throw std::invalid_argument("orthogonal_family: need 0 <= m <= N-1 (got m=" +
                                    std::to_string(m) + ", N=" + std::to_string(N) + ")");
    }
    if (m > kMaxDegree) {
        throw std::invalid_argument("orthogonal_family: degree above cap " +
                                    std::to_string(kMaxDegree));
    }
    if (rho.size() != N) {
        throw std::invalid_argument("orthogonal_family: weight length differs from N");
    }

    PolynomialFamily fam(N, m, rho);
    const auto nodes = window_nodes(N);
    const auto uN = static_cast<std::size_t>(N);

    fam.coeffs_.reserve(static_cast<std::size_t>(m) + 1);
    fam.values_.reserve(static_cast<std::size_t>(m) + 1);
    std::vector<double> norms;

    for (int d = 0; d <= m; ++d) {
        std::vector<double> coeffs(static_cast<std::size_t>(d) + 1, 0.0);
        std::vector<double> values(uN);
        if (d == 0) {
            coeffs[0] = 1.0;
            values.assign(uN, 1.0);
        } else {
            // Candidate x * p^{d-1}: monic of degree d, and far better
            // conditioned than the raw monomial x^d.
            const auto& prev_c = fam.coeffs_.back();
            const auto& prev_v = fam.values_.back();
            for (std::size_t k = 0; k < prev_c.size(); ++k) {
                coeffs[k + 1] = prev_c[k];
            }
            for (std::size_t j = 0; j < uN; ++j) {
                values[j] = nodes[j] * prev_v[j];
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (int k = 0; k < d; ++k) {
                    const auto& pk_v = fam.values_[static_cast<std::size_t>(k)];
                    const auto& pk_c = fam.coeffs_[static_cast<std::size_t>(k)];
                    const double r = inner_product(values, pk_v, rho) /
                                     norms[static_cast<std::size_t>(k)];
                    for (std::size_t j = 0; j < uN; ++j) {
                        values[j] -= r * pk_v[j];
                    }
                    for (std::size_t q = 0; q < pk_c.size(); ++q) {
                        coeffs[q] -= r * pk_c[q];
                    }
                }
            }
        }
        const double norm = inner_product(values, values, rho);
        if (!(norm > 0.0)) {
            throw std::invalid_argument("orthogonal_family: breakdown at degree " +
                                        std::to_string(d));
        }
        norms.push_back(norm);

        double h = 0.0;
        double g = 0.0;
        for (std::size_t j = 0; j < uN; ++j) {
            h += rho.samples()[j] * values[j] * std::pow(nodes[j], d);
            g += rho.samples()[j] * std::abs(values[j]);
        }
        h /= static_cast<double>(N);
        g /= static_cast<double>(N);
        if (h < 0.0) {
            // Not reachable for monic polynomials (h equals the squared norm),
            // kept so h > 0 holds under any normalization.
            for (auto& v : values) v = -v;
            for (auto& c : coeffs) c = -c;
            h = -h;
        }
        fam.coeffs_.push_back(std::move(coeffs));
        fam.values_.push_back(std::move(values));
        fam.h_.push_back(h);
        fam.g_.push_back(g);
    }
    return fam;
}

FilterCoefficients filter_coefficients(const PolynomialFamily& family, int d, int n, double T) {
    const int N = family.window();
    if (d < 0 || d > family.max_degree()) {
        throw std::invalid_argument("filter_coefficients: order " + std::to_string(d) +
                                    " exceeds family degree " +
                                    std::to_string(family.max_degree()));
    }
    if (n < N) {
        throw std::invalid_argument("filter_coefficients: n must be at least N");
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("filter_coefficients: T must be positive");
    }
    double factorial = 1.0;
    for (int k = 2; k <= d; ++k) factorial *= k;
    // C = d! n^d / (N^{d+1} T^d h), grouped as (n / (N T))^d to stay in range.
    const double C = factorial * std::pow(static_cast<double>(n) / (N * T), d) /
                     (N * family.h(d));

    FilterCoefficients out;
    out.order = d;
    out.weights.resize(static_cast<std::size_t>(N));
    const auto p = family.node_values(d);
    const auto rho = family.weight().samples();
    for (std::size_t j = 0; j < out.weights.size(); ++j) {
        out.weights[j] = C * rho[j] * p[j];
    }
    return out;
}

}  // namespace hyperid
