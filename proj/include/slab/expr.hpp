#pragma once

// Closed-form scalar expressions over chart coordinates x1..x8.
//
// Grammar (loosest to tightest):
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' exponent)?          right associative
//   primary := number | variable | 'abs2' | func '(' expr ')' | '(' expr ')'
// Exponents must be constant; they are folded to a single number at parse time.

#include "slab/error.hpp"
#include "slab/jet.hpp"

#include <Eigen/Core>

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slab {

using Point = Eigen::VectorXd;

enum class Func { Exp, Log, Sqrt, Sin, Cos, Sinh, Cosh, Atan, Asinh };

class Expr {
public:
    enum class Kind { Number, Variable, Abs2, Add, Sub, Mul, Div, Pow, Neg, Call };

    struct Node {
        Kind kind;
        double number = 0.0; // Number literal, or the folded exponent of Pow
        int index = 0;       // Variable index (0-based) or abs2 dimension
        Func func = Func::Exp;
        std::shared_ptr<const Node> lhs, rhs;
    };

    Expr() = default;

    /// Parse `source` for a chart of dimension `dim`.
    static Expr parse(std::string_view source, int dim);
    static Expr constant(double c);

    int dim() const noexcept { return dim_; }
    const Node& root() const { return *root_; }
    bool valid() const noexcept { return static_cast<bool>(root_); }

    /// Fully parenthesised canonical form; parse(print(e)) reproduces the tree.
    std::string print() const;
    /// Structural equality of the trees.
    bool same_tree(const Expr& other) const;
    /// True if the expression is a literal number (possibly negated).
    bool is_constant() const;

    template <class T>
    T evaluate(std::span<const T> x) const;

    /// Wrap an existing tree.
    Expr(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}

private:
    template <class T>
    T eval_node(const Node& n, std::span<const T> x) const;

    std::shared_ptr<const Node> root_;
    int dim_ = 0;
};

std::string print_node(const Expr::Node& n);
const char* func_name(Func f);

/// Value of `e` at `p`.
double eval(const Expr& e, const Point& p);
/// Value and all partials of `e` at `p` up to `order` (0..4).
Jet eval_jet(const Expr& e, const Point& p, int order);

// ---------------------------------------------------------------------------

template <class T>
T Expr::evaluate(std::span<const T> x) const
{
    if (static_cast<int>(x.size()) < dim_) throw std::invalid_argument("expression: point dimension mismatch");
    return eval_node(*root_, x);
}

template <class T>
T Expr::eval_node(const Node& n, std::span<const T> x) const
{
    using std::asinh;
    using std::atan;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    switch (n.kind) {
    case Kind::Number:
        return T(n.number);
    case Kind::Variable:
        return x[n.index];
    case Kind::Abs2: {
        T s = x[0] * x[0];
        for (int i = 1; i < n.index; ++i) s += x[i] * x[i];
        return s;
    }
    case Kind::Add:
        return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Kind::Sub:
        return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Kind::Mul:
        return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Kind::Div: {
        T den = eval_node(*n.rhs, x);
        if (value_of(den) == 0.0) throw DomainError("division by zero in " + print_node(n));
        return eval_node(*n.lhs, x) / den;
    }
    case Kind::Neg:
        return -eval_node(*n.lhs, x);
    case Kind::Pow: {
        T base = eval_node(*n.lhs, x);
        const double e = n.number;
        const double b = value_of(base);
        if (std::nearbyint(e) == e && std::abs(e) < 1e9) {
            if (e < 0 && b == 0.0) throw DomainError("zero raised to a negative power in " + print_node(n));
            if constexpr (std::is_floating_point_v<T>) return std::pow(base, static_cast<T>(e));
            else return pow(base, static_cast<int>(e));
        }
        if (!(b > 0.0)) throw DomainError("non-integer power of non-positive base in " + print_node(n));
        return exp(T(e) * log(base));
    }
    case Kind::Call: {
        T a = eval_node(*n.lhs, x);
        const double v = value_of(a);
        switch (n.func) {
        case Func::Exp:
            return exp(a);
        case Func::Log:
            if (!(v > 0.0)) throw DomainError("log of non-positive argument in " + print_node(n));
            return log(a);
        case Func::Sqrt:
            if (v < 0.0) throw DomainError("sqrt of negative argument in " + print_node(n));
            if constexpr (!std::is_floating_point_v<T>) {
                if (v == 0.0 && a.order() > 0 && !a.is_broadcast())
                    throw DomainError("sqrt is not differentiable at zero in " + print_node(n));
            }
            return sqrt(a);
        case Func::Sin:
            return sin(a);
        case Func::Cos:
            return cos(a);
        case Func::Sinh:
            return sinh(a);
        case Func::Cosh:
            return cosh(a);
        case Func::Atan:
            return atan(a);
        case Func::Asinh:
            return asinh(a);
        }
    }
    }
    throw std::logic_error("expression: corrupt node");
}

} // namespace slab
