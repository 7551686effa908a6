#include "slab/fd.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using slab::Expr;

TEST_CASE("cubic first derivative")
{
    slab::Point p(1);
    p << 1.0;
    slab::Jet j = slab::fd_partials(Expr::parse("x^3", 1), p, 1);
    CHECK(std::abs(j.partial({0}) - 3.0) < 1e-8);
}

TEST_CASE("fourth derivative of exp")
{
    slab::Point p(1);
    p << 0.2;
    slab::Jet j = slab::fd_partials(Expr::parse("exp(x)", 1), p, 4, 1e-2);
    CHECK(j.partial({0, 0, 0, 0}) == doctest::Approx(std::exp(0.2)).epsilon(1e-5));
}

TEST_CASE("vector-valued stencils")
{
    slab::Point p(2);
    p << 0.4, -0.3;
    auto f = [](const slab::Point& x) {
        Eigen::VectorXd v(2);
        v << x[0] * x[0] * x[1], std::sin(x[0] + 2 * x[1]);
        return v;
    };
    auto jets = slab::fd_jets(f, p, 2);
    CHECK(jets[0].partial({0, 1}) == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(jets[1].partial({1, 1}) == doctest::Approx(-4 * std::sin(0.4 - 0.6)).epsilon(1e-7));
}

TEST_CASE("property: jet and finite differences agree to 1e-6 for orders 1 to 3")
{
    const char* sources[] = {
        "1/(1+x^2+y^2)",
        "exp(x)*sin(y)",
        "log(2 + x*y + y^2)",
        "atan(x - y) + asinh(x*y)",
        "4/(1+abs2)^2",
    };
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (const char* s : sources) {
        Expr e = Expr::parse(s, 2);
        for (int trial = 0; trial < 4; ++trial) {
            slab::Point p(2);
            p << U(rng), U(rng);
            for (int order = 1; order <= 3; ++order) {
                slab::Jet exact = slab::eval_jet(e, p, order);
                slab::Jet approx = slab::fd_partials(e, p, order);
                const auto& layout = slab::JetLayout::get(2);
                for (int i = 0; i < layout.size(order); ++i) {
                    const double a = exact.coefficient(i) * layout.factorial(i);
                    const double b = approx.coefficient(i) * layout.factorial(i);
                    INFO(std::string(s) << " order " << order << " index " << i);
                    CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
                }
            }
        }
    }
}
