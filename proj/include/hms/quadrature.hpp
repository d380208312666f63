#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace hms {

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussRule {
    std::vector<double> node, weight;
};

inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    GaussRule r;
    r.node.resize(n);
    r.weight.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.node[n - 1 - i] = x;
        r.weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

enum class CuspSubstitution {
    rational,    // y = theta (1-t)/t, decreasing from +inf to 0
    logarithmic, // y = -log(t) / (2 pi lambda)
};

struct QuadratureConfig {
    int nodes_per_dim = 24;
    CuspSubstitution substitution = CuspSubstitution::rational;
    double tolerance = 1e-9;
    long long monte_carlo_samples = 1000000;
    std::uint64_t monte_carlo_seed = 0x5eedULL;
    bool estimate_error = false;   // when set, integrals are re-run at ~1.5n
    double substitution_scale = 1.0;

    void validate() const {
        if (nodes_per_dim < 4) throw std::invalid_argument("quadrature: nodes_per_dim must be >= 4");
    }
};

using Complex = std::complex<double>;

struct IntegralResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
};

namespace detail {

/// 1-D GL sweep of [a, b] split at interior breakpoints, f visited per node.
template <class F>
inline void gl_sweep(double a, double b, const GaussRule& rule,
                     const std::vector<double>& breaks, F&& f) {
    if (!(b > a)) return;
    double lo = a;
    auto run = [&](double s, double e) {
        if (!(e > s)) return;
        const double mid = 0.5 * (s + e), half = 0.5 * (e - s);
        for (std::size_t i = 0; i < rule.node.size(); ++i)
            f(mid + half * rule.node[i], half * rule.weight[i]);
    };
    for (double br : breaks) {
        if (br > lo && br < b) {
            run(lo, br);
            lo = br;
        }
    }
    run(lo, b);
}

} // namespace detail

/**
 * Integral over the ordered simplex {lo <= t_1 <= ... <= t_m <= hi}, with
 * optional per-coordinate interval clamps, by nested Gauss-Legendre.
 * F receives the full coordinate vector.
 */
inline Complex simplex_integrate(int m,
                                 const std::function<Complex(const std::vector<double>&)>& f,
                                 int nodes,
                                 double lo = 0.0, double hi = 1.0,
                                 const std::vector<std::pair<double, double>>* clamps = nullptr,
                                 const std::vector<double>& breaks = {}) {
    const GaussRule& rule = gauss_legendre(nodes);
    std::vector<double> t(m);
    Complex total(0.0, 0.0);
    // recurse from the outermost (largest) coordinate down
    std::function<void(int, double, Complex)> walk = [&](int level, double upper, Complex w) {
        if (level < 0) {
            total += w * f(t);
            return;
        }
        double a = lo, b = upper;
        if (clamps) {
            a = std::max(a, (*clamps)[level].first);
            b = std::min(b, (*clamps)[level].second);
        }
        detail::gl_sweep(a, b, rule, breaks, [&](double x, double wx) {
            t[level] = x;
            walk(level - 1, x, w * wx);
        });
    };
    walk(m - 1, hi, Complex(1.0, 0.0));
    return total;
}

/**
 * Integral over a product of two ordered simplices (the type-b domain),
 * F(t1, t2) with both vectors of length m, full tensor quadrature.
 */
inline Complex product_simplex_integrate(
    int m1, int m2,
    const std::function<Complex(const std::vector<double>&, const std::vector<double>&)>& f,
    int nodes,
    const std::vector<std::pair<double, double>>* clamps1 = nullptr,
    const std::vector<std::pair<double, double>>* clamps2 = nullptr,
    const std::vector<double>& breaks1 = {}, const std::vector<double>& breaks2 = {}) {
    std::vector<double> t2;
    return simplex_integrate(
        m2,
        [&](const std::vector<double>& outer) {
            t2 = outer;
            return simplex_integrate(
                m1, [&](const std::vector<double>& t1) { return f(t1, t2); }, nodes, 0.0, 1.0,
                clamps1, breaks1);
        },
        nodes, 0.0, 1.0, clamps2, breaks2);
}

/**
 * Stratified Monte Carlo over the product of two ordered m-simplices with a
 * fixed seed; returns the estimate and a standard-error sigma.
 */
inline IntegralResult mc_product_simplex(
    int m, const std::function<Complex(const std::vector<double>&, const std::vector<double>&)>& f,
    long long samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int strata = 8;   // leading coordinate of each block is stratified
    const long long cells = strata * strata;
    const long long per_cell = std::max<long long>(1, samples / cells);
    std::vector<double> t1(m), t2(m);
    Complex sum(0, 0);
    double sumsq = 0;
    long long n = 0;
    for (int c1 = 0; c1 < strata; ++c1) {
        for (int c2 = 0; c2 < strata; ++c2) {
            for (long long s = 0; s < per_cell; ++s) {
                t1[0] = (c1 + uni(gen)) / strata;
                t2[0] = (c2 + uni(gen)) / strata;
                for (int i = 1; i < m; ++i) t1[i] = uni(gen);
                for (int i = 1; i < m; ++i) t2[i] = uni(gen);
                std::sort(t1.begin(), t1.end());
                std::sort(t2.begin(), t2.end());
                Complex v = f(t1, t2);
                sum += v;
                sumsq += std::norm(v);
                ++n;
            }
        }
    }
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    const double scale = 1.0 / (fact * fact);
    Complex mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sumsq / n - std::norm(mean));
    IntegralResult r;
    r.value = mean * scale;
    r.error_estimate = std::sqrt(var / n) * scale;
    return r;
}

} // namespace hms
