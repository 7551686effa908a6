#include "slab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace slab {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_number(double v)
{
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Kind::Number;
    n->number = v;
    return n;
}

const std::map<std::string, Func, std::less<>>& functions()
{
    static const std::map<std::string, Func, std::less<>> table = {
        {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt}, {"sin", Func::Sin},     {"cos", Func::Cos},
        {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"atan", Func::Atan}, {"asinh", Func::Asinh},
    };
    return table;
}

bool has_variables(const Expr::Node& n)
{
    switch (n.kind) {
    case Expr::Kind::Number:
        return false;
    case Expr::Kind::Variable:
    case Expr::Kind::Abs2:
        return true;
    default:
        return (n.lhs && has_variables(*n.lhs)) || (n.rhs && has_variables(*n.rhs));
    }
}

class Parser {
public:
    Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

    NodePtr parse()
    {
        skip();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "empty expression");
        NodePtr e = expr();
        skip();
        if (pos_ < src_.size()) throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
        return e;
    }

private:
    void skip()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) throw SyntaxError(pos_, std::string("expected '") + c + "'");
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Expr::Kind::Add, lhs, term());
            else if (accept('-')) lhs = make(Expr::Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Expr::Kind::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Expr::Kind::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept('-')) return make(Expr::Kind::Neg, unary());
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        skip();
        const std::size_t at = pos_;
        if (!accept('^')) return base;
        NodePtr e = exponent();
        if (has_variables(*e)) throw SyntaxError(at, "exponent must be constant");
        const double value = Expr(e, 0).evaluate<double>(std::span<const double>());
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Kind::Pow;
        n->lhs = base;
        n->number = value;
        return n;
    }

    NodePtr exponent()
    {
        if (accept('-')) return make(Expr::Kind::Neg, exponent());
        return power();
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    NodePtr number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw SyntaxError(start, "malformed number '" + text + "'");
        return make_number(v);
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        if (auto it = functions().find(name); it != functions().end()) {
            skip();
            if (!accept('(')) throw SyntaxError(pos_, "expected '(' after " + std::string(name));
            NodePtr arg = expr();
            expect(')');
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Kind::Call;
            n->func = it->second;
            n->lhs = arg;
            return n;
        }
        if (name == "abs2") {
            const std::size_t save = pos_;
            if (accept('(')) {
                if (!accept(')')) pos_ = save;
            }
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Kind::Abs2;
            n->index = dim_;
            return n;
        }

        int index = -1;
        if (name.size() == 1) {
            switch (name[0]) {
            case 'x': index = 0; break;
            case 'y': index = 1; break;
            case 'z': index = 2; break;
            case 'w': index = 3; break;
            default: break;
            }
        } else if (name[0] == 'x') {
            int v = 0;
            auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
            if (ec == std::errc() && p == name.data() + name.size() && v >= 1) index = v - 1;
        }
        if (index < 0) throw UnknownIdentifier("unknown identifier '" + std::string(name) + "' at " + std::to_string(start));
        if (index >= dim_ || index >= kMaxJetVars)
            throw VariableOutOfRange("variable '" + std::string(name) + "' exceeds chart dimension " + std::to_string(dim_));
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Kind::Variable;
        n->index = index;
        return n;
    }

    std::string_view src_;
    int dim_;
    std::size_t pos_ = 0;
};

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            s = buf;
            break;
        }
    }
    if (v < 0) return "(" + s + ")";
    return s;
}

bool same_node(const Expr::Node& a, const Expr::Node& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Number:
        return a.number == b.number;
    case Expr::Kind::Variable:
    case Expr::Kind::Abs2:
        return a.index == b.index;
    case Expr::Kind::Pow:
        return a.number == b.number && same_node(*a.lhs, *b.lhs);
    case Expr::Kind::Neg:
        return same_node(*a.lhs, *b.lhs);
    case Expr::Kind::Call:
        return a.func == b.func && same_node(*a.lhs, *b.lhs);
    default:
        return same_node(*a.lhs, *b.lhs) && same_node(*a.rhs, *b.rhs);
    }
}

} // namespace

const char* func_name(Func f)
{
    switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Atan: return "atan";
    case Func::Asinh: return "asinh";
    }
    return "?";
}

std::string print_node(const Expr::Node& n)
{
    switch (n.kind) {
    case Expr::Kind::Number:
        return format_number(n.number);
    case Expr::Kind::Variable:
        return "x" + std::to_string(n.index + 1);
    case Expr::Kind::Abs2:
        return "abs2";
    case Expr::Kind::Add:
        return "(" + print_node(*n.lhs) + " + " + print_node(*n.rhs) + ")";
    case Expr::Kind::Sub:
        return "(" + print_node(*n.lhs) + " - " + print_node(*n.rhs) + ")";
    case Expr::Kind::Mul:
        return "(" + print_node(*n.lhs) + " * " + print_node(*n.rhs) + ")";
    case Expr::Kind::Div:
        return "(" + print_node(*n.lhs) + " / " + print_node(*n.rhs) + ")";
    case Expr::Kind::Pow:
        return "(" + print_node(*n.lhs) + "^" + format_number(n.number) + ")";
    case Expr::Kind::Neg:
        return "(-" + print_node(*n.lhs) + ")";
    case Expr::Kind::Call:
        return std::string(func_name(n.func)) + "(" + print_node(*n.lhs) + ")";
    }
    return "?";
}

Expr Expr::parse(std::string_view source, int dim)
{
    if (dim < 1 || dim > kMaxJetVars) throw std::invalid_argument("expression: dimension must be in 1..8");
    return Expr(Parser(source, dim).parse(), dim);
}

Expr Expr::constant(double c) { return Expr(make_number(c), 0); }

std::string Expr::print() const { return root_ ? print_node(*root_) : std::string(); }

bool Expr::same_tree(const Expr& other) const
{
    if (!root_ || !other.root_) return root_ == other.root_;
    return same_node(*root_, *other.root_);
}

bool Expr::is_constant() const { return root_ && !has_variables(*root_); }

double eval(const Expr& e, const Point& p)
{
    return e.evaluate<double>(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

Jet eval_jet(const Expr& e, const Point& p, int order)
{
    const int n = static_cast<int>(p.size());
    if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("eval_jet: order must be in 0..4");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) throw std::invalid_argument("eval_jet: non-finite point");
    std::vector<Jet> vars;
    vars.reserve(n);
    for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(n, order, i, p[i]));
    Jet r = e.evaluate<Jet>(std::span<const Jet>(vars));
    if (r.is_broadcast()) return Jet::constant(n, order, r.value());
    return r;
}

} // namespace slab
