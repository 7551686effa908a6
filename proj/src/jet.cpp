#include "slab/jet.hpp"

#include "slab/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace slab {

namespace {

constexpr int kCodeBase = kMaxJetOrder + 1;

int encode(std::span<const std::uint8_t> a)
{
    int code = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) code = code * kCodeBase + *it;
    return code;
}

void enumerate(int nvars, int var, int remaining, std::vector<std::uint8_t>& current,
               std::vector<std::uint8_t>& out)
{
    if (var == nvars - 1) {
        current[var] = static_cast<std::uint8_t>(remaining);
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[var] = static_cast<std::uint8_t>(e);
        enumerate(nvars, var + 1, remaining - e, current, out);
    }
}

double int_pow(double base, int n)
{
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

} // namespace

JetLayout::JetLayout(int nvars) : nvars_(nvars)
{
    // Graded enumeration of monomials.
    if (nvars == 0) {
        exponents_.clear();
        degree_.push_back(0);
        factorial_.push_back(1.0);
        prefix_.fill(1);
        code_to_index_.assign(1, 0);
        products_.push_back({0, 0, 0});
        product_prefix_.fill(1);
        return;
    }
    std::vector<std::uint8_t> current(nvars, 0);
    for (int d = 0; d <= kMaxJetOrder; ++d) {
        const std::size_t before = exponents_.size() / nvars;
        enumerate(nvars, 0, d, current, exponents_);
        const std::size_t after = exponents_.size() / nvars;
        for (std::size_t i = before; i < after; ++i) degree_.push_back(d);
        prefix_[d] = static_cast<int>(after);
    }
    const int count = prefix_[kMaxJetOrder];

    int table_size = 1;
    for (int i = 0; i < nvars; ++i) table_size *= kCodeBase;
    code_to_index_.assign(table_size, -1);
    factorial_.resize(count);
    for (int i = 0; i < count; ++i) {
        auto a = exponents(i);
        code_to_index_[encode(a)] = i;
        double f = 1.0;
        for (auto e : a)
            for (int k = 2; k <= e; ++k) f *= k;
        factorial_[i] = f;
    }

    std::vector<std::uint8_t> sum(nvars);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) {
            if (degree_[i] + degree_[j] > kMaxJetOrder) continue;
            auto a = exponents(i);
            auto b = exponents(j);
            for (int v = 0; v < nvars; ++v) sum[v] = static_cast<std::uint8_t>(a[v] + b[v]);
            products_.push_back({i, j, code_to_index_[encode(sum)]});
        }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [this](const Product& x, const Product& y) { return degree_[x.out] < degree_[y.out]; });
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        product_prefix_[k] = static_cast<int>(
            std::count_if(products_.begin(), products_.end(), [&](const Product& p) { return degree_[p.out] <= k; }));
    }

    shifts_.resize(nvars);
    shift_prefix_.resize(nvars);
    for (int v = 0; v < nvars; ++v) {
        auto& table = shifts_[v];
        for (int i = 0; i < count; ++i) {
            auto a = exponents(i);
            if (a[v] == 0) continue;
            std::vector<std::uint8_t> lowered(a.begin(), a.end());
            lowered[v] -= 1;
            table.push_back({i, code_to_index_[encode(lowered)], static_cast<double>(a[v])});
        }
        std::stable_sort(table.begin(), table.end(),
                         [this](const Shift& x, const Shift& y) { return degree_[x.from] < degree_[y.from]; });
        for (int k = 0; k <= kMaxJetOrder; ++k) {
            shift_prefix_[v][k] = static_cast<int>(
                std::count_if(table.begin(), table.end(), [&](const Shift& s) { return degree_[s.from] <= k; }));
        }
    }
}

const JetLayout& JetLayout::get(int nvars)
{
    static const auto layouts = [] {
        std::array<std::unique_ptr<JetLayout>, kMaxJetVars + 1> all;
        for (int n = 0; n <= kMaxJetVars; ++n) all[n].reset(new JetLayout(n));
        return all;
    }();
    if (nvars < 0 || nvars > kMaxJetVars)
        throw std::invalid_argument("jet: unsupported number of variables " + std::to_string(nvars));
    return *layouts[nvars];
}

int JetLayout::index(std::span<const int> exponents) const
{
    int total = 0;
    std::vector<std::uint8_t> a(nvars_, 0);
    for (int v = 0; v < nvars_; ++v) {
        total += exponents[v];
        if (exponents[v] < 0 || total > kMaxJetOrder) return -1;
        a[v] = static_cast<std::uint8_t>(exponents[v]);
    }
    return code_to_index_[encode(a)];
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(const JetLayout* layout, int order) : layout_(layout), order_(order)
{
    coeffs_.assign(layout->size(order), 0.0);
}

Jet Jet::constant(int nvars, int order, double c)
{
    if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet: order out of range");
    Jet r(&JetLayout::get(nvars), order);
    r.coeffs_[0] = c;
    return r;
}

Jet Jet::variable(int nvars, int order, int var, double value)
{
    Jet r = constant(nvars, order, value);
    if (var < 0 || var >= nvars) throw std::invalid_argument("jet: variable index out of range");
    if (order >= 1) r.coeffs_[1 + var] = 1.0;
    return r;
}

Jet Jet::from_coefficients(int nvars, int order, std::span<const double> coeffs)
{
    Jet r = constant(nvars, order, 0.0);
    if (coeffs.size() != r.coeffs_.size()) throw std::invalid_argument("jet: coefficient count mismatch");
    std::copy(coeffs.begin(), coeffs.end(), r.coeffs_.begin());
    return r;
}

double Jet::partial(std::span<const int> vars) const
{
    if (vars.empty()) return value();
    if (!layout_) return 0.0;
    std::array<int, kMaxJetVars> a{};
    for (int v : vars) {
        if (v < 0 || v >= layout_->nvars()) throw std::invalid_argument("jet: partial variable out of range");
        ++a[v];
    }
    if (static_cast<int>(vars.size()) > order_) throw std::invalid_argument("jet: partial exceeds jet order");
    const int idx = layout_->index(std::span<const int>(a.data(), layout_->nvars()));
    return layout_->factorial(idx) * coeffs_[idx];
}

Eigen::VectorXd Jet::gradient() const
{
    const int n = nvars();
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = partial({i});
    return g;
}

Eigen::MatrixXd Jet::hessian() const
{
    const int n = nvars();
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h(i, j) = h(j, i) = partial({i, j});
    return h;
}

Jet Jet::derivative(int var) const
{
    if (!layout_) return Jet(0.0);
    if (order_ == 0) throw std::invalid_argument("jet: cannot differentiate an order-0 jet");
    Jet r(layout_, order_ - 1);
    for (const auto& s : layout_->derivative(var, order_)) r.coeffs_[s.to] += s.factor * coeffs_[s.from];
    return r;
}

Jet Jet::truncated(int order) const
{
    if (!layout_ || order >= order_) return *this;
    Jet r(layout_, order);
    std::copy_n(coeffs_.begin(), r.coeffs_.size(), r.coeffs_.begin());
    return r;
}

Jet& Jet::operator+=(const Jet& rhs)
{
    if (!rhs.layout_) {
        coeffs_[0] += rhs.coeffs_[0];
        return *this;
    }
    if (!layout_) {
        const double c = coeffs_[0];
        *this = rhs;
        coeffs_[0] += c;
        return *this;
    }
    if (layout_ != rhs.layout_) throw std::invalid_argument("jet: mismatched variable count");
    if (rhs.order_ < order_) *this = truncated(rhs.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs)
{
    if (!rhs.layout_) {
        coeffs_[0] -= rhs.coeffs_[0];
        return *this;
    }
    if (!layout_) {
        const double c = coeffs_[0];
        *this = -rhs;
        coeffs_[0] += c;
        return *this;
    }
    if (layout_ != rhs.layout_) throw std::invalid_argument("jet: mismatched variable count");
    if (rhs.order_ < order_) *this = truncated(rhs.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(double s)
{
    for (auto& c : coeffs_) c *= s;
    return *this;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet Jet::operator-() const
{
    Jet r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

Jet operator*(const Jet& lhs, const Jet& rhs)
{
    if (!lhs.layout_) return rhs * lhs.coeffs_[0];
    if (!rhs.layout_) return lhs * rhs.coeffs_[0];
    if (lhs.layout_ != rhs.layout_) throw std::invalid_argument("jet: mismatched variable count");
    Jet r(lhs.layout_, std::min(lhs.order_, rhs.order_));
    const double* a = lhs.coeffs_.data();
    const double* b = rhs.coeffs_.data();
    double* c = r.coeffs_.data();
    for (const auto& p : lhs.layout_->products(r.order_)) c[p.out] += a[p.lhs] * b[p.rhs];
    return r;
}

Jet operator/(const Jet& lhs, const Jet& rhs)
{
    if (!rhs.layout_) {
        if (rhs.coeffs_[0] == 0.0) throw DomainError("division by zero");
        return lhs * (1.0 / rhs.coeffs_[0]);
    }
    return lhs * reciprocal(rhs);
}

Jet Jet::compose(std::span<const double> series) const
{
    if (!layout_) return Jet(series[0]);
    if (static_cast<int>(series.size()) < order_ + 1) throw std::invalid_argument("jet: series too short");
    Jet h = *this;
    h.coeffs_[0] = 0.0;
    Jet r = constant(nvars(), order_, series[order_]);
    for (int j = order_ - 1; j >= 0; --j) {
        r = r * h;
        r.coeffs_[0] += series[j];
    }
    return r;
}

JetComposer::JetComposer(std::span<const Jet> inner) : ny_(static_cast<int>(inner.size()))
{
    const Jet* first = nullptr;
    order_ = kMaxJetOrder;
    for (const auto& j : inner) {
        if (!j.is_broadcast()) {
            if (first && first->layout() != j.layout())
                throw std::invalid_argument("jet compose: inner jets use different variables");
            first = &j;
            order_ = std::min(order_, j.order());
        }
    }
    if (!first) return;
    constant_ = false;
    nx_ = first->nvars();

    // Powers of the centred inner jets.
    powers_.resize(ny_);
    for (int b = 0; b < ny_; ++b) {
        Jet delta = inner[b].is_broadcast() ? Jet::constant(nx_, order_, 0.0) : inner[b].truncated(order_);
        delta -= Jet(delta.value());
        powers_[b][0] = Jet::constant(nx_, order_, 1.0);
        for (int k = 1; k <= order_; ++k) powers_[b][k] = powers_[b][k - 1] * delta;
    }
}

Jet JetComposer::operator()(const Jet& outer) const
{
    if (outer.is_broadcast() || constant_) return Jet(outer.value());
    if (outer.nvars() != ny_) throw std::invalid_argument("jet compose: wrong number of inner jets");
    const int order = std::min(order_, outer.order());
    const JetLayout& ly = *outer.layout();
    Jet result = Jet::constant(nx_, order, 0.0);
    for (int idx = 0; idx < ly.size(order); ++idx) {
        const double c = outer.coefficient(idx);
        if (c == 0.0) continue;
        auto a = ly.exponents(idx);
        Jet term = Jet::constant(nx_, order, c);
        for (int b = 0; b < ny_; ++b)
            if (a[b] > 0) term = term * powers_[b][a[b]];
        result += term;
    }
    return result;
}

Jet compose(const Jet& outer, std::span<const Jet> inner)
{
    if (static_cast<int>(inner.size()) != outer.nvars() && !outer.is_broadcast())
        throw std::invalid_argument("jet compose: wrong number of inner jets");
    return JetComposer(inner)(outer);
}

// ---------------------------------------------------------------------------
// Elementary functions

namespace {

using Series = std::array<double, kMaxJetOrder + 1>;

Jet apply_series(const Jet& x, const Series& s) { return x.compose(std::span<const double>(s.data(), s.size())); }

// Series of an antiderivative: s[0] = f(a), s[j] = g_{j-1} / j where g is the
// Taylor series of f' at a.
Series integrate(double f0, const Jet& derivative_series)
{
    Series s{};
    s[0] = f0;
    const int n = derivative_series.order();
    for (int j = 1; j <= n + 1 && j <= kMaxJetOrder; ++j) s[j] = derivative_series.coefficient(j - 1) / j;
    return s;
}

} // namespace

Jet reciprocal(const Jet& x)
{
    const double a = x.value();
    if (a == 0.0) throw DomainError("division by zero");
    Series s{};
    double inv = 1.0 / a;
    double term = inv;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        s[j] = term;
        term *= -inv;
    }
    return apply_series(x, s);
}

Jet exp(const Jet& x)
{
    Series s{};
    double term = std::exp(x.value());
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        s[j] = term;
        term /= (j + 1);
    }
    return apply_series(x, s);
}

Jet log(const Jet& x)
{
    const double a = x.value();
    if (!(a > 0.0)) throw DomainError("log of non-positive argument");
    Series s{};
    s[0] = std::log(a);
    for (int j = 1; j <= kMaxJetOrder; ++j) s[j] = ((j % 2) ? 1.0 : -1.0) / (j * int_pow(a, j));
    return apply_series(x, s);
}

Jet sqrt(const Jet& x)
{
    const double a = x.value();
    if (a < 0.0 || (a == 0.0 && x.order() > 0 && !x.is_broadcast())) throw DomainError("sqrt of non-positive argument");
    Series s{};
    const double root = std::sqrt(a);
    double binom = 1.0;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        s[j] = root * binom / (j == 0 ? 1.0 : int_pow(a, j));
        binom *= (0.5 - j) / (j + 1);
    }
    return apply_series(x, s);
}

Jet sin(const Jet& x)
{
    const double sv = std::sin(x.value()), cv = std::cos(x.value());
    const double cycle[4] = {sv, cv, -sv, -cv};
    Series s{};
    double fact = 1.0;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        if (j > 0) fact *= j;
        s[j] = cycle[j % 4] / fact;
    }
    return apply_series(x, s);
}

Jet cos(const Jet& x)
{
    const double sv = std::sin(x.value()), cv = std::cos(x.value());
    const double cycle[4] = {cv, -sv, -cv, sv};
    Series s{};
    double fact = 1.0;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        if (j > 0) fact *= j;
        s[j] = cycle[j % 4] / fact;
    }
    return apply_series(x, s);
}

Jet sinh(const Jet& x)
{
    const double sv = std::sinh(x.value()), cv = std::cosh(x.value());
    Series s{};
    double fact = 1.0;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        if (j > 0) fact *= j;
        s[j] = ((j % 2) ? cv : sv) / fact;
    }
    return apply_series(x, s);
}

Jet cosh(const Jet& x)
{
    const double sv = std::sinh(x.value()), cv = std::cosh(x.value());
    Series s{};
    double fact = 1.0;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        if (j > 0) fact *= j;
        s[j] = ((j % 2) ? sv : cv) / fact;
    }
    return apply_series(x, s);
}

Jet atan(const Jet& x)
{
    if (x.is_broadcast()) return Jet(std::atan(x.value()));
    if (x.order() == 0) return Jet::constant(x.nvars(), 0, std::atan(x.value()));
    const Jet t = Jet::variable(1, x.order() - 1, 0, x.value());
    const Jet d = reciprocal(1.0 + t * t);
    return apply_series(x, integrate(std::atan(x.value()), d));
}

Jet asinh(const Jet& x)
{
    if (x.is_broadcast()) return Jet(std::asinh(x.value()));
    if (x.order() == 0) return Jet::constant(x.nvars(), 0, std::asinh(x.value()));
    const Jet t = Jet::variable(1, x.order() - 1, 0, x.value());
    const Jet d = reciprocal(sqrt(1.0 + t * t));
    return apply_series(x, integrate(std::asinh(x.value()), d));
}

Jet pow(const Jet& x, int exponent)
{
    if (exponent < 0) return pow(reciprocal(x), -exponent);
    Jet result = x.is_broadcast() ? Jet(1.0) : Jet::constant(x.nvars(), x.order(), 1.0);
    Jet base = x;
    unsigned e = static_cast<unsigned>(exponent);
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return result;
}

Jet pow(const Jet& x, double exponent)
{
    if (std::nearbyint(exponent) == exponent && std::abs(exponent) < 1e9) return pow(x, static_cast<int>(exponent));
    return exp(exponent * log(x));
}

Eigen::MatrixXd values(const JetMatrix& m)
{
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).value();
    return r;
}

Eigen::VectorXd values(const JetVector& v)
{
    Eigen::VectorXd r(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) r[i] = v[i].value();
    return r;
}

} // namespace slab
