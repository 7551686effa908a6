#include "slab/expr.hpp"

#include <doctest.h>

#include <cmath>

using slab::Expr;

namespace {

slab::Point pt(std::initializer_list<double> v)
{
    slab::Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

} // namespace

TEST_CASE("precedence and associativity")
{
    CHECK(slab::eval(Expr::parse("1 + 2 * 3", 1), pt({0})) == doctest::Approx(7));
    CHECK(slab::eval(Expr::parse("2^3^2", 1), pt({0})) == doctest::Approx(512));
    CHECK(slab::eval(Expr::parse("-2^2", 1), pt({0})) == doctest::Approx(-4));
    CHECK(slab::eval(Expr::parse("8 / 4 / 2", 1), pt({0})) == doctest::Approx(1));
    CHECK(slab::eval(Expr::parse("10 - 3 - 2", 1), pt({0})) == doctest::Approx(5));
    CHECK(slab::eval(Expr::parse("x^-1", 1), pt({4})) == doctest::Approx(0.25));
    CHECK(slab::eval(Expr::parse("2.5e-1 * x", 1), pt({4})) == doctest::Approx(1.0));
}

TEST_CASE("variables and abs2")
{
    CHECK(slab::eval(Expr::parse("x + 2*y + 3*z + 4*w", 4), pt({1, 1, 1, 1})) == doctest::Approx(10));
    CHECK(slab::eval(Expr::parse("x1 * x3", 3), pt({2, 9, 5})) == doctest::Approx(10));
    CHECK(slab::eval(Expr::parse("abs2", 3), pt({1, 2, 2})) == doctest::Approx(9));
    CHECK(slab::eval(Expr::parse("1/(1 + abs2())", 2), pt({1, 1})) == doctest::Approx(1.0 / 3));
}

TEST_CASE("cigar conformal factor at the origin")
{
    Expr e = Expr::parse("1/(1+x^2+y^2)", 2);
    slab::Jet j = slab::eval_jet(e, pt({0, 0}), 2);
    CHECK(j.value() == doctest::Approx(1.0));
    CHECK(j.gradient().norm() == doctest::Approx(0.0));
    CHECK(j.partial({0, 0}) == doctest::Approx(-2.0));
}

TEST_CASE("jet partials of a parsed expression")
{
    Expr e = Expr::parse("x^2", 1);
    slab::Jet j = slab::eval_jet(e, pt({3}), 2);
    CHECK(j.value() == doctest::Approx(9));
    CHECK(j.partial({0}) == doctest::Approx(6));
    CHECK(j.partial({0, 0}) == doctest::Approx(2));
    slab::Jet k = slab::eval_jet(Expr::parse("exp(x)*sin(y)", 2), pt({0, 0}), 2);
    CHECK(k.partial({0, 1}) == doctest::Approx(1.0));
    slab::Jet c = slab::eval_jet(Expr::parse("3", 2), pt({1, 1}), 2);
    CHECK(!c.is_broadcast());
    CHECK(c.partial({0, 1}) == 0.0);
}

TEST_CASE("errors")
{
    CHECK_THROWS_AS(Expr::parse("x +", 1), slab::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("(x", 1), slab::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("x ^ y", 2), slab::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("foo(x)", 1), slab::UnknownIdentifier);
    CHECK_THROWS_AS(Expr::parse("z", 2), slab::VariableOutOfRange);
    CHECK_THROWS_AS(Expr::parse("x9", 8), slab::VariableOutOfRange);
    CHECK_THROWS_AS(Expr::parse("x0", 8), slab::UnknownIdentifier);
    CHECK_THROWS_AS(slab::eval(Expr::parse("log(x)", 1), pt({-1})), slab::DomainError);
    CHECK_THROWS_AS(slab::eval(Expr::parse("1/x", 1), pt({0})), slab::DomainError);
    CHECK_THROWS_AS(slab::eval(Expr::parse("x^0.5", 1), pt({-1})), slab::DomainError);
    CHECK_THROWS_AS(slab::eval_jet(Expr::parse("sqrt(x)", 1), pt({0}), 1), slab::DomainError);
    try {
        Expr::parse("x + * y", 2);
        FAIL("expected SyntaxError");
    } catch (const slab::SyntaxError& e) {
        CHECK(e.position() == 4);
    }
    try {
        slab::eval(Expr::parse("1 + log(x - 2)", 1), pt({1}));
        FAIL("expected DomainError");
    } catch (const slab::DomainError& e) {
        CHECK(std::string(e.what()).find("log((x1 - 2))") != std::string::npos);
    }
}

TEST_CASE("property: print then parse reproduces the tree")
{
    const char* sources[] = {
        "1/(1+x^2+y^2)",
        "-x^-2 + 3.25e-3*sin(y)/cosh(x*y)",
        "exp(-abs2)*atan(x) - asinh(y)^3",
        "sqrt(1 + x^2)^(1/3) - -y",
        "log(2 + cos(x)) * (x - (y - 1))",
        "4/(1+abs2)^2",
    };
    for (const char* s : sources) {
        Expr a = Expr::parse(s, 2);
        Expr b = Expr::parse(a.print(), 2);
        INFO(std::string(s) << " -> " << a.print());
        CHECK(a.same_tree(b));
        CHECK(b.print() == a.print());
        CHECK(slab::eval(a, pt({0.3, -0.7})) == doctest::Approx(slab::eval(b, pt({0.3, -0.7}))));
    }
}
