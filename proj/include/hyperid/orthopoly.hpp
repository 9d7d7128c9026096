#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hyperid {

/// Highest polynomial degree the family construction accepts.
inline constexpr int kMaxDegree = 8;

/// Positive weights rho(j/N), j = 1..N, sampled on the window nodes.
class WeightFunction {
public:
    explicit WeightFunction(std::vector<double> samples);

    static WeightFunction uniform(int N);
    static WeightFunction sampled(int N, const std::function<double(double)>& rho);

    int size() const noexcept { return static_cast<int>(samples_.size()); }
    /// Weight at node (j+1)/N.
    double operator[](int j) const { return samples_[static_cast<std::size_t>(j)]; }
    std::span<const double> samples() const noexcept { return samples_; }

private:
    std::vector<double> samples_;
};

/// Window nodes j/N for j = 1..N (left endpoint excluded, right included).
std::vector<double> window_nodes(int N);

/// Discrete weighted inner product (1/N) sum_j rho(j/N) f(j/N) g(j/N) on
/// node values.
double inner_product(std::span<const double> f, std::span<const double> g,
                     const WeightFunction& rho);

/// Monic orthogonal polynomials p^0..p^m under the discrete inner product,
/// together with the filter constants
///   h^d = (1/N) sum rho(j/N) p^d(j/N) (j/N)^d
///   g^d = (1/N) sum rho(j/N) |p^d(j/N)|.
class PolynomialFamily {
public:
    int window() const noexcept { return N_; }
    int max_degree() const noexcept { return m_; }
    const WeightFunction& weight() const noexcept { return weight_; }

    /// Monomial coefficients of p^d, lowest power first; size d+1, leading entry 1.
    std::span<const double> coefficients(int d) const;
    /// p^d evaluated at the nodes j/N, j = 1..N.
    std::span<const double> node_values(int d) const;
    double h(int d) const;
    double g(int d) const;

    /// Horner evaluation of p^d at an arbitrary point.
    double evaluate(int d, double x) const;

private:
    friend PolynomialFamily orthogonal_family(int N, int m, const WeightFunction& rho);
    PolynomialFamily(int N, int m, WeightFunction rho);

    void check_degree(int d) const;

    int N_;
    int m_;
    WeightFunction weight_;
    std::vector<std::vector<double>> coeffs_;
    std::vector<std::vector<double>> values_;
    std::vector<double> h_;
    std::vector<double> g_;
};

/// Builds p^0..p^m by modified Gram-Schmidt with one reorthogonalization
/// pass. Requires 0 <= m <= min(N-1, kMaxDegree) and rho.size() == N.
PolynomialFamily orthogonal_family(int N, int m, const WeightFunction& rho);

struct FilterCoefficients {
    int order = 0;
    /// c_j for j = 1..N, in units of time^-order.
    std::vector<double> weights;
};

/// Weights c_j = C rho(j/N) p^d(j/N) with C = d! n^d / (N^{d+1} T^d h^d), so
/// that sum_j c_j z_{n_i + j} estimates the d-th derivative at the window
/// start. n is the total sample count and T the horizon.
FilterCoefficients filter_coefficients(const PolynomialFamily& family, int d, int n,
                                       double T);

}  // namespace hyperid
