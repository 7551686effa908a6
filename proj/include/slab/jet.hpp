#pragma once

// Multivariate truncated Taylor arithmetic.
//
// A Jet stores the Taylor coefficients c_a of a function around a point for
// every multi-index |a| <= order, so that the mixed partial d^a f = a! c_a.
// Mixed partials are symmetric by construction: d_i d_j and d_j d_i read the
// same coefficient.

#include <boost/container/small_vector.hpp>

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace slab {

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetVars = 8;

/// Monomial table for a fixed number of variables, graded by total degree.
/// Monomials of degree <= k form a prefix of the table, so a jet of order k
/// uses the first size(k) slots.
class JetLayout {
public:
    struct Product {
        int lhs, rhs, out;
    };
    struct Shift {
        int from, to;
        double factor;
    };

    /// Shared layout for `nvars` variables (0 <= nvars <= kMaxJetVars).
    static const JetLayout& get(int nvars);

    int nvars() const noexcept { return nvars_; }
    int size(int order) const noexcept { return prefix_[order]; }
    int degree(int index) const noexcept { return degree_[index]; }
    std::span<const std::uint8_t> exponents(int index) const noexcept
    {
        return {exponents_.data() + static_cast<std::size_t>(index) * nvars_, static_cast<std::size_t>(nvars_)};
    }
    /// Index of a monomial given its exponents; -1 if the degree exceeds kMaxJetOrder.
    int index(std::span<const int> exponents) const;
    /// a! for the monomial at `index`.
    double factorial(int index) const noexcept { return factorial_[index]; }

    /// All (lhs, rhs) pairs whose product monomial has degree <= order.
    std::span<const Product> products(int order) const noexcept
    {
        return {products_.data(), static_cast<std::size_t>(product_prefix_[order])};
    }
    /// Coefficient moves for d/dx_var applied to a jet of the given order.
    std::span<const Shift> derivative(int var, int order) const noexcept
    {
        const auto& table = shifts_[var];
        return {table.data(), static_cast<std::size_t>(shift_prefix_[var][order])};
    }

private:
    explicit JetLayout(int nvars);

    int nvars_;
    std::array<int, kMaxJetOrder + 1> prefix_{};
    std::vector<std::uint8_t> exponents_;
    std::vector<int> degree_;
    std::vector<double> factorial_;
    std::vector<int> code_to_index_;
    std::vector<Product> products_;
    std::array<int, kMaxJetOrder + 1> product_prefix_{};
    std::vector<std::vector<Shift>> shifts_;
    std::vector<std::array<int, kMaxJetOrder + 1>> shift_prefix_;
};

class Jet {
public:
    using Coefficients = boost::container::small_vector<double, 35>;

    /// Broadcast constant: combines with a jet of any layout and order.
    Jet() : coeffs_{0.0} {}
    Jet(double c) : coeffs_{c} {} // NOLINT(google-explicit-constructor)

    static Jet constant(int nvars, int order, double c);
    /// The coordinate function x_var expanded at x_var = value.
    static Jet variable(int nvars, int order, int var, double value);
    /// Jet with explicit Taylor coefficients (size must equal layout size at `order`).
    static Jet from_coefficients(int nvars, int order, std::span<const double> coeffs);

    bool is_broadcast() const noexcept { return layout_ == nullptr; }
    int nvars() const noexcept { return layout_ ? layout_->nvars() : 0; }
    int order() const noexcept { return layout_ ? order_ : kMaxJetOrder; }
    const JetLayout* layout() const noexcept { return layout_; }

    double value() const noexcept { return coeffs_[0]; }
    std::span<const double> coefficients() const noexcept { return {coeffs_.data(), coeffs_.size()}; }
    double coefficient(int index) const noexcept { return coeffs_[index]; }

    /// Mixed partial derivative along the listed variables, e.g. {0, 1, 1} is d0 d1 d1.
    double partial(std::span<const int> vars) const;
    double partial(std::initializer_list<int> vars) const
    {
        return partial(std::span<const int>(vars.begin(), vars.size()));
    }
    /// Gradient (requires order >= 1).
    Eigen::VectorXd gradient() const;
    /// Matrix of second partials (requires order >= 2).
    Eigen::MatrixXd hessian() const;

    /// d/dx_var; the result has order one less.
    Jet derivative(int var) const;
    Jet truncated(int order) const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(const Jet& rhs);
    Jet& operator/=(const Jet& rhs);
    Jet& operator*=(double s);

    Jet operator-() const;

    friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
    friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
    friend Jet operator*(const Jet& lhs, const Jet& rhs);
    friend Jet operator/(const Jet& lhs, const Jet& rhs);
    friend Jet operator*(Jet lhs, double s) { return lhs *= s; }
    friend Jet operator*(double s, Jet rhs) { return rhs *= s; }

    /// Apply a univariate function given its Taylor series at value():
    /// series[j] = f^(j)(value()) / j!, j = 0..order().
    Jet compose(std::span<const double> series) const;

private:
    Jet(const JetLayout* layout, int order);

    const JetLayout* layout_ = nullptr;
    int order_ = 0;
    Coefficients coeffs_;
};

/// Substitute y_b = inner[b] into `outer`, a jet in the y variables expanded at
/// y_b = inner[b].value(). The result is a jet in the variables of `inner`.
Jet compose(const Jet& outer, std::span<const Jet> inner);

/// Reusable form of compose() for many outer jets sharing the same inner jets.
class JetComposer {
public:
    explicit JetComposer(std::span<const Jet> inner);
    Jet operator()(const Jet& outer) const;

private:
    int ny_ = 0;
    int nx_ = 0;
    int order_ = 0;
    bool constant_ = true;
    std::vector<std::array<Jet, kMaxJetOrder + 1>> powers_;
};

Jet reciprocal(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet sinh(const Jet& x);
Jet cosh(const Jet& x);
Jet atan(const Jet& x);
Jet asinh(const Jet& x);
Jet pow(const Jet& x, int exponent);
Jet pow(const Jet& x, double exponent);

// Comparisons look at values only; Eigen needs them for its generic kernels.
inline bool operator==(const Jet& a, const Jet& b) { return a.value() == b.value(); }
inline bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
inline bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }
inline bool operator<=(const Jet& a, const Jet& b) { return a.value() <= b.value(); }
inline bool operator>=(const Jet& a, const Jet& b) { return a.value() >= b.value(); }

inline Jet abs(const Jet& x) { return x.value() < 0.0 ? -x : x; }
inline const Jet& conj(const Jet& x) { return x; }
inline const Jet& real(const Jet& x) { return x; }
inline Jet imag(const Jet&) { return Jet(0.0); }
inline Jet abs2(const Jet& x) { return x * x; }

inline double value_of(double x) { return x; }
inline double value_of(long double x) { return static_cast<double>(x); }
inline double value_of(const Jet& x) { return x.value(); }

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;
using JetVector = Eigen::Matrix<Jet, Eigen::Dynamic, 1>;

/// Values of a matrix of jets.
Eigen::MatrixXd values(const JetMatrix& m);
Eigen::VectorXd values(const JetVector& v);

} // namespace slab

namespace Eigen {

template <>
struct NumTraits<slab::Jet> : GenericNumTraits<double> {
    using Real = slab::Jet;
    using NonInteger = slab::Jet;
    using Nested = slab::Jet;
    using Literal = slab::Jet;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 20,
        MulCost = 100
    };
};

} // namespace Eigen
