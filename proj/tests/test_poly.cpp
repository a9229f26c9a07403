#include "doctest.h"
#include "sosltl/poly.hpp"

#include <cmath>
#include <random>

using namespace sosltl;

namespace {

const std::vector<std::string> kXY = {"x1", "x2"};

Polynomial random_poly(std::mt19937& rng, std::size_t n, int deg, int terms)
{
    std::uniform_int_distribution<int> e(0, deg);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    Polynomial p(n);
    for (int t = 0; t < terms; ++t) {
        Monomial m(n);
        int budget = deg;
        for (std::size_t v = 0; v < n; ++v) {
            const int k = std::min(budget, e(rng));
            m.exps[v] = static_cast<std::uint8_t>(k);
            budget -= k;
        }
        p.add_term(m, c(rng));
    }
    return p;
}

VectorField example_field()
{
    return VectorField({parse_polynomial("x2", kXY), parse_polynomial("-x1 + 1/3*x1^3 - x2", kXY)});
}

} // namespace

TEST_CASE("square of a sum expands")
{
    const auto p = parse_polynomial("(x1 + x2)^2", kXY);
    CHECK(approx_equal(p, parse_polynomial("x1^2 + 2*x1*x2 + x2^2", kXY)));
    CHECK(p.terms().size() == 3);
    CHECK(p.degree() == 2);
}

TEST_CASE("point evaluation")
{
    const auto p = parse_polynomial("x1^2 + x2^2", kXY);
    const double x[] = {3.0, 4.0};
    CHECK(p.evaluate(x) == doctest::Approx(25.0));
}

TEST_CASE("zero coefficients are never stored")
{
    auto p = parse_polynomial("x1 - x1 + 0*x2", kXY);
    CHECK(p.is_zero());
    p.add_term(Monomial({1, 0}), 2.0);
    p.add_term(Monomial({1, 0}), -2.0);
    CHECK(p.terms().empty());
}

TEST_CASE("variable count mismatch throws")
{
    Polynomial a = Polynomial::variable(2, 0);
    Polynomial b = Polynomial::variable(3, 0);
    CHECK_THROWS_AS(a + b, PolyError);
    CHECK_THROWS_AS(a * b, PolyError);
    const double x[] = {1.0};
    CHECK_THROWS_AS(a.evaluate(x), PolyError);
}

TEST_CASE("product evaluates to product of evaluations")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto p = random_poly(rng, n, 4, 6);
        const auto q = random_poly(rng, n, 4, 6);
        std::vector<double> x(n);
        for (auto& v : x)
            v = u(rng);
        const double lhs = (p * q).evaluate(x);
        const double rhs = p.evaluate(x) * q.evaluate(x);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("gradient matches central differences")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto p = random_poly(rng, n, 5, 8);
        std::vector<double> x(n);
        for (auto& v : x)
            v = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-5;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
            const double an = p.derivative(i).evaluate(x);
            CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("lie derivative examples")
{
    const auto f = example_field();
    CHECK(approx_equal(lie_derivative(parse_polynomial("x1", kXY), f), parse_polynomial("x2", kXY)));
    const auto v = lie_derivative(parse_polynomial("x1^2 + x2^2", kXY), f);
    CHECK(approx_equal(v, parse_polynomial("2/3*x1^3*x2 - 2*x2^2", kXY)));
    CHECK(lie_derivative(Polynomial::constant(2, 4.0), f).is_zero());
}

TEST_CASE("lie derivative matches the time derivative along a trajectory")
{
    const auto f = example_field();
    const auto B = parse_polynomial("x1^4 - 2*x1*x2 + 3*x2^3 + 1", kXY);
    const auto dB = lie_derivative(B, f);
    auto rk4 = [&](std::vector<double> x, double h) {
        auto eval = [&](const std::vector<double>& s) {
            std::vector<double> d(2);
            f.evaluate(s, d);
            return d;
        };
        auto add = [](const std::vector<double>& a, const std::vector<double>& b, double c) {
            return std::vector<double>{a[0] + c * b[0], a[1] + c * b[1]};
        };
        const auto k1 = eval(x);
        const auto k2 = eval(add(x, k1, h / 2));
        const auto k3 = eval(add(x, k2, h / 2));
        const auto k4 = eval(add(x, k3, h));
        for (int i = 0; i < 2; ++i)
            x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        return x;
    };
    const std::vector<double> x0 = {0.7, -0.4};
    double prev_err = 0;
    for (double h : {1e-2, 5e-3}) {
        const auto xp = rk4(x0, h);
        const auto xm = rk4(x0, -h);
        const double fd = (B.evaluate(xp) - B.evaluate(xm)) / (2 * h);
        const double err = std::abs(fd - dB.evaluate(x0));
        if (prev_err > 0)
            CHECK(err < prev_err / 3.0);
        prev_err = err;
    }
}

TEST_CASE("printing and parsing round-trip")
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_poly(rng, 2, 6, 7);
        const auto q = parse_polynomial(p.to_string(), kXY);
        CHECK(max_coefficient_difference(p, q) == 0.0);
    }
    CHECK(parse_polynomial("-x1 + 0.3333333333*x1^3 - x2", kXY).to_string() == "-x2 - x1 + 0.3333333333*x1^3");
    CHECK(Polynomial(2).to_string() == "0");
}

TEST_CASE("parse errors carry a position")
{
    CHECK_THROWS_AS(parse_polynomial("x1 +", kXY), PolyParseError);
    CHECK_THROWS_AS(parse_polynomial("x3", kXY), PolyParseError);
    CHECK_THROWS_AS(parse_polynomial("x1 / x2", kXY), PolyParseError);
    CHECK_THROWS_AS(parse_polynomial("x1 ^ -1", kXY), PolyParseError);
    try {
        parse_polynomial("x1 + $", kXY);
        FAIL("expected parse error");
    } catch (const PolyParseError& e) {
        CHECK(e.position == 5);
    }
}

TEST_CASE("affine pullback")
{
    const auto p = parse_polynomial("x1^2 + x2^2 - 49", kXY);
    const double c[] = {0.0, 0.0};
    const auto q = p.affine_pullback(c, 7.0);
    CHECK(approx_equal(q, parse_polynomial("49*x1^2 + 49*x2^2 - 49", kXY)));
    const double c2[] = {1.0, -2.0};
    const auto r = p.affine_pullback(c2, 0.5);
    const double z[] = {0.3, 0.9};
    const double x[] = {1.0 + 0.5 * 0.3, -2.0 + 0.5 * 0.9};
    CHECK(r.evaluate(z) == doctest::Approx(p.evaluate(x)));
}

TEST_CASE("pulled-back field preserves lie derivative values")
{
    const auto f = example_field();
    const auto B = parse_polynomial("x1^3 - x2 + x1*x2", kXY);
    const double c[] = {0.5, -1.0};
    const double s = 3.0;
    const auto fz = f.affine_pullback(c, s);
    const auto Bz = B.affine_pullback(c, s);
    const double z[] = {0.2, -0.1};
    const double x[] = {0.5 + 3.0 * 0.2, -1.0 + 3.0 * -0.1};
    CHECK(lie_derivative(Bz, fz).evaluate(z) == doctest::Approx(lie_derivative(B, f).evaluate(x)));
}

TEST_CASE("monomial basis enumeration")
{
    const auto b = monomials_up_to(2, 2);
    REQUIRE(b.size() == 6);
    CHECK(b[0].degree() == 0);
    CHECK(std::is_sorted(b.begin(), b.end(), GradedLex{}));
    CHECK(monomials_up_to(3, 4).size() == 35);
}
