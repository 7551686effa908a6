#include "slab/jet.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using slab::Jet;

namespace {

Jet var(int n, int order, int i, double v) { return Jet::variable(n, order, i, v); }

} // namespace

TEST_CASE("layout sizes follow binomial counts")
{
    const auto& l2 = slab::JetLayout::get(2);
    CHECK(l2.size(0) == 1);
    CHECK(l2.size(1) == 3);
    CHECK(l2.size(2) == 6);
    CHECK(l2.size(4) == 15);
    const auto& l4 = slab::JetLayout::get(4);
    CHECK(l4.size(4) == 70);
    const auto& l8 = slab::JetLayout::get(8);
    CHECK(l8.size(4) == 495);
}

TEST_CASE("square of a variable")
{
    Jet x = var(1, 4, 0, 3.0);
    Jet y = x * x;
    CHECK(y.value() == doctest::Approx(9.0));
    CHECK(y.partial({0}) == doctest::Approx(6.0));
    CHECK(y.partial({0, 0}) == doctest::Approx(2.0));
    CHECK(y.partial({0, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("mixed partial of exp(x) sin(y) at the origin")
{
    Jet x = var(2, 3, 0, 0.0);
    Jet y = var(2, 3, 1, 0.0);
    Jet f = slab::exp(x) * slab::sin(y);
    CHECK(f.partial({0, 1}) == doctest::Approx(1.0));
    CHECK(f.partial({1, 0}) == doctest::Approx(1.0));
    CHECK(f.partial({1, 1, 1}) == doctest::Approx(-1.0));
    CHECK(f.partial({0, 0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("elementary functions match closed-form derivatives")
{
    const double a = 0.7;
    Jet x = var(1, 4, 0, a);
    auto check4 = [](const Jet& j, std::array<double, 5> want) {
        std::vector<int> idx;
        for (int k = 0; k <= 4; ++k) {
            CHECK(j.partial(idx) == doctest::Approx(want[k]).epsilon(1e-12));
            idx.push_back(0);
        }
    };
    const double e = std::exp(a);
    check4(slab::exp(x), {e, e, e, e, e});
    check4(slab::log(x), {std::log(a), 1 / a, -1 / (a * a), 2 / std::pow(a, 3), -6 / std::pow(a, 4)});
    check4(slab::sin(x), {std::sin(a), std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)});
    check4(slab::cosh(x), {std::cosh(a), std::sinh(a), std::cosh(a), std::sinh(a), std::cosh(a)});
    const double s = std::sqrt(a);
    check4(slab::sqrt(x), {s, 0.5 / s, -0.25 / (a * s), 0.375 / (a * a * s), -0.9375 / (a * a * a * s)});
    // atan' = 1/(1+x^2), atan'' = -2x/(1+x^2)^2, atan''' = (6x^2-2)/(1+x^2)^3,
    // atan'''' = 24x(1-x^2)/(1+x^2)^4
    const double q = 1 + a * a;
    check4(slab::atan(x), {std::atan(a), 1 / q, -2 * a / (q * q), (6 * a * a - 2) / (q * q * q),
                           24 * a * (1 - a * a) / (q * q * q * q)});
    // asinh' = q^{-1/2}, asinh'' = -x q^{-3/2}, asinh''' = (2x^2-1) q^{-5/2},
    // asinh'''' = (9x - 6x^3) q^{-7/2}
    check4(slab::asinh(x), {std::asinh(a), std::pow(q, -0.5), -a * std::pow(q, -1.5),
                            (2 * a * a - 1) * std::pow(q, -2.5), (9 * a - 6 * a * a * a) * std::pow(q, -3.5)});
    check4(slab::pow(x, 3), {a * a * a, 3 * a * a, 6 * a, 6, 0});
    check4(slab::pow(x, 2.5), {std::pow(a, 2.5), 2.5 * std::pow(a, 1.5), 3.75 * std::pow(a, 0.5),
                               1.875 * std::pow(a, -0.5), -0.9375 * std::pow(a, -1.5)});
}

TEST_CASE("division and reciprocal agree")
{
    Jet x = var(2, 4, 0, 1.3);
    Jet y = var(2, 4, 1, -0.4);
    Jet a = (x + y * y) / (Jet(2.0) + x * y);
    Jet b = (x + y * y) * slab::reciprocal(Jet(2.0) + x * y);
    for (std::size_t i = 0; i < a.coefficients().size(); ++i)
        CHECK(a.coefficient(static_cast<int>(i)) == doctest::Approx(b.coefficient(static_cast<int>(i))).epsilon(1e-13));
}

TEST_CASE("broadcast constants combine with any layout")
{
    Jet x = var(3, 2, 2, 1.5);
    Jet y = 2.0 * x + Jet(1.0);
    CHECK(y.nvars() == 3);
    CHECK(y.value() == doctest::Approx(4.0));
    CHECK(y.partial({2}) == doctest::Approx(2.0));
    CHECK(Jet(5.0).is_broadcast());
}

TEST_CASE("derivative and truncation")
{
    Jet x = var(2, 4, 0, 0.5);
    Jet y = var(2, 4, 1, 2.0);
    Jet f = x * x * x * y;
    Jet fx = f.derivative(0);
    CHECK(fx.order() == 3);
    CHECK(fx.value() == doctest::Approx(3 * 0.25 * 2.0));
    CHECK(fx.partial({0, 1}) == doctest::Approx(6 * 0.5));
    CHECK(f.truncated(1).order() == 1);
}

TEST_CASE("multivariate composition is the chain rule")
{
    // outer(u, v) = u^2 v expanded at (u0, v0); inner u = sin(x), v = x + y.
    const double x0 = 0.3, y0 = -0.2;
    Jet x = var(2, 3, 0, x0);
    Jet y = var(2, 3, 1, y0);
    Jet u = slab::sin(x);
    Jet v = x + y;
    Jet uu = var(2, 3, 0, u.value());
    Jet vv = var(2, 3, 1, v.value());
    Jet outer = uu * uu * vv;
    std::array<Jet, 2> inner{u, v};
    Jet composed = slab::compose(outer, inner);
    Jet direct = u * u * v;
    for (std::size_t i = 0; i < direct.coefficients().size(); ++i)
        CHECK(composed.coefficient(static_cast<int>(i)) ==
              doctest::Approx(direct.coefficient(static_cast<int>(i))).epsilon(1e-13));
}

TEST_CASE("property: partials are symmetric and Leibniz holds on random polynomials")
{
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3;
        std::array<Jet, 3> v;
        for (int i = 0; i < n; ++i) v[i] = var(n, 4, i, U(rng));
        Jet f = v[0] * v[1] + Jet(U(rng)) * v[2] * v[2] * v[0] + slab::exp(v[1] * Jet(U(rng)));
        Jet g = slab::cos(v[2]) + v[0] * v[0] * v[1];
        Jet fg = f * g;
        CHECK(f.partial({0, 1, 2}) == doctest::Approx(f.partial({2, 0, 1})));
        CHECK(f.partial({1, 1, 0, 2}) == doctest::Approx(f.partial({0, 2, 1, 1})));
        // Leibniz: d0(fg) = d0f g + f d0g
        CHECK(fg.partial({0}) == doctest::Approx(f.partial({0}) * g.value() + f.value() * g.partial({0})));
        // d0 d1 (fg)
        const double want = f.partial({0, 1}) * g.value() + f.partial({0}) * g.partial({1}) +
                            f.partial({1}) * g.partial({0}) + f.value() * g.partial({0, 1});
        CHECK(fg.partial({0, 1}) == doctest::Approx(want));
    }
}

TEST_CASE("Eigen matrices of jets")
{
    slab::JetMatrix m(2, 2);
    Jet x = var(1, 2, 0, 2.0);
    m << x, Jet(1.0), Jet(0.0), x* x;
    slab::JetVector w(2);
    w << Jet(1.0), x;
    slab::JetVector r = m * w;
    CHECK(r(0).value() == doctest::Approx(4.0));
    CHECK(r(1).value() == doctest::Approx(8.0));
    CHECK(r(1).partial({0}) == doctest::Approx(12.0));
    CHECK(slab::values(m)(1, 1) == doctest::Approx(4.0));
}
