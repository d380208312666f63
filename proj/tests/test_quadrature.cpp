#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hms/exppoly.hpp"
#include "hms/quadrature.hpp"

using namespace hms;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto& r = gauss_legendre(6);
    double s = 0;
    for (std::size_t i = 0; i < r.node.size(); ++i)
        s += r.weight[i] * std::pow(r.node[i], 10);
    CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
    double w = 0;
    for (double x : r.weight) w += x;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("simplex volumes") {
    for (int m = 1; m <= 4; ++m) {
        double fact = 1;
        for (int i = 2; i <= m; ++i) fact *= i;
        Complex v = simplex_integrate(
            m, [](const std::vector<double>&) { return Complex(1, 0); }, 8);
        CHECK(std::abs(v - Complex(1.0 / fact, 0)) < 1e-13);
    }
}

TEST_CASE("simplex with clamps and breakpoints") {
    // area of {0 <= t1 <= t2 <= 1, t1 <= 0.25, t2 >= 0.5}
    std::vector<std::pair<double, double>> clamps{{0.0, 0.25}, {0.5, 1.0}};
    Complex v = simplex_integrate(
        2, [](const std::vector<double>&) { return Complex(1, 0); }, 10, 0.0, 1.0, &clamps);
    CHECK(std::abs(v - Complex(0.125, 0)) < 1e-13);

    // a kinked integrand handled by a panel split
    auto f = [](const std::vector<double>& t) {
        return Complex(std::abs(t[0] - 0.5), 0.0);
    };
    Complex coarse = simplex_integrate(1, f, 12);
    Complex exact(0.25, 0);
    Complex panel = simplex_integrate(1, f, 12, 0.0, 1.0, nullptr, {0.5});
    CHECK(std::abs(panel - exact) < 1e-14);
    CHECK(std::abs(panel - exact) < std::abs(coarse - exact));
}

TEST_CASE("exppoly nested integrals reproduce hand values") {
    // int_0^1 int_0^{w2} e^{-w1} dw1 dw2 = e^{-1}
    Complex v = simplex_exp_integral({1.0, 0.0}, {}, 0.0, 1.0);
    CHECK(std::abs(v - Complex(std::exp(-1.0), 0)) < 1e-14);

    // pure polynomial level: volume of the 3-simplex scaled
    Complex p = simplex_exp_integral({0.0, 0.0, 0.0}, {}, 0.0, 2.0);
    CHECK(std::abs(p - Complex(8.0 / 6.0, 0)) < 1e-13);

    // reversed sweep changes sign for odd dimension
    Complex r = simplex_exp_integral({0.0}, {}, 1.0, 0.0);
    CHECK(std::abs(r - Complex(-1.0, 0)) < 1e-14);

    // tiny-rate branch consistency: rate below and above the Taylor threshold
    for (double c : {1e-9, 1e-3, 0.2, 3.0, 40.0}) {
        Complex a = simplex_exp_integral({c}, {}, 0.0, 1.0);
        double expect = -std::expm1(-c) / c;
        CHECK(std::abs(a - Complex(expect, 0)) < 1e-13 * std::max(1.0, expect));
    }
}

TEST_CASE("exppoly from infinity") {
    ExpPoly one = ExpPoly::one();
    one.multiply_exp(2.0);
    auto g = one.integrate_from_infinity();
    // int_inf^u e^{-2v} dv = -e^{-2u}/2
    CHECK(std::abs(g.eval(0.7) - Complex(-std::exp(-1.4) / 2.0, 0)) < 1e-15);
    ExpPoly bad = ExpPoly::one();
    CHECK_THROWS_AS(bad.integrate_from_infinity(), std::domain_error);
}

TEST_CASE("monte carlo product simplex estimates the volume") {
    auto f = [](const std::vector<double>&, const std::vector<double>&) { return Complex(1, 0); };
    auto r = mc_product_simplex(3, f, 20000, 99);
    CHECK(std::abs(r.value - Complex(1.0 / 36.0, 0)) < 1e-9);   // constant integrand: exact
    auto g = [](const std::vector<double>& a, const std::vector<double>& b) {
        return Complex(a[0] * b[2], 0.0);
    };
    auto r2 = mc_product_simplex(3, g, 400000, 7);
    // E[t1_(1)] = 1/4, E[t2_(3)] = 3/4 over ordered triples
    Complex expect(0.25 * 0.75 / 36.0, 0.0);
    CHECK(std::abs(r2.value - expect) < 5 * r2.error_estimate + 1e-6);
}

TEST_CASE("config validation") {
    QuadratureConfig q;
    q.nodes_per_dim = 2;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
