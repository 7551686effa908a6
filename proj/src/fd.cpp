#include "slab/fd.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <utility>

namespace slab {

namespace {

struct StencilEntry {
    int offset;
    double weight;
};

// Central stencils for the d-th derivative with unit step.
const std::vector<StencilEntry>& stencil(int d)
{
    static const std::array<std::vector<StencilEntry>, 5> table = {{
        {{0, 1.0}},
        {{-1, -0.5}, {1, 0.5}},
        {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
        {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
        {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
    }};
    return table[d];
}

template <class Real>
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
using FieldR = std::function<VecR<Real>(const VecR<Real>&)>;

template <class Real>
class CachedField {
public:
    CachedField(const FieldR<Real>& f, const Point& p, double step) : f_(f), p_(p.cast<Real>()), step_(step) {}

    const VecR<Real>& at(const std::vector<int>& offset)
    {
        auto it = cache_.find(offset);
        if (it != cache_.end()) return it->second;
        VecR<Real> q = p_;
        for (std::size_t i = 0; i < offset.size(); ++i) q[i] += step_ * offset[i];
        return cache_.emplace(offset, f_(q)).first->second;
    }

private:
    const FieldR<Real>& f_;
    VecR<Real> p_;
    Real step_;
    std::map<std::vector<int>, VecR<Real>> cache_;
};

// Tensor-product stencil estimate of d^alpha with step scale*h.
template <class Real>
VecR<Real> apply_stencil(CachedField<Real>& field, std::span<const std::uint8_t> alpha, int scale, Real h)
{
    const int n = static_cast<int>(alpha.size());
    std::vector<int> active;
    for (int v = 0; v < n; ++v)
        if (alpha[v] > 0) active.push_back(v);

    VecR<Real> acc;
    std::vector<std::size_t> cursor(active.size(), 0);
    std::vector<int> offset(n, 0);
    for (;;) {
        Real w = 1.0;
        std::fill(offset.begin(), offset.end(), 0);
        for (std::size_t k = 0; k < active.size(); ++k) {
            const auto& s = stencil(alpha[active[k]])[cursor[k]];
            w *= s.weight;
            offset[active[k]] = s.offset * scale;
        }
        const VecR<Real>& v = field.at(offset);
        if (acc.size() == 0) acc = VecR<Real>::Zero(v.size());
        acc += w * v;

        std::size_t k = 0;
        while (k < active.size()) {
            if (++cursor[k] < stencil(alpha[active[k]]).size()) break;
            cursor[k] = 0;
            ++k;
        }
        if (k == active.size()) break;
    }
    int degree = 0;
    for (auto a : alpha) degree += a;
    Real hs = 1.0;
    for (int i = 0; i < degree; ++i) hs *= scale * h;
    return acc / hs;
}

template <class Real>
std::vector<Jet> fd_jets_impl(const FieldR<Real>& f, const Point& p, int order, double step)
{
    if (order < 1 || order > kMaxJetOrder) throw std::invalid_argument("fd: order must be in 1..4");
    if (!(step > 0.0)) throw std::invalid_argument("fd: step must be positive");
    const int n = static_cast<int>(p.size());
    const JetLayout& layout = JetLayout::get(n);
    CachedField<Real> field(f, p, step);

    const VecR<Real>& centre = field.at(std::vector<int>(n, 0));
    const Eigen::Index q = centre.size();
    std::vector<std::vector<double>> coeffs(q, std::vector<double>(layout.size(order), 0.0));
    for (Eigen::Index c = 0; c < q; ++c) coeffs[c][0] = static_cast<double>(centre[c]);

    for (int idx = 1; idx < layout.size(order); ++idx) {
        auto alpha = layout.exponents(idx);
        const VecR<Real> fine = apply_stencil<Real>(field, alpha, 1, step);
        const VecR<Real> coarse = apply_stencil<Real>(field, alpha, 2, step);
        const VecR<Real> extrapolated = (Real(4) * fine - coarse) / Real(3);
        for (Eigen::Index c = 0; c < q; ++c)
            coeffs[c][idx] = static_cast<double>(extrapolated[c] / Real(layout.factorial(idx)));
    }

    std::vector<Jet> out;
    out.reserve(q);
    for (Eigen::Index c = 0; c < q; ++c) out.push_back(Jet::from_coefficients(n, order, coeffs[c]));
    return out;
}

} // namespace

std::vector<Jet> fd_jets(const VectorField& f, const Point& p, int order, double step)
{
    return fd_jets_impl<double>(f, p, order, step);
}

Jet fd_jet(const ScalarField& f, const Point& p, int order, double step)
{
    VectorField vf = [&f](const Point& x) {
        Eigen::VectorXd v(1);
        v[0] = f(x);
        return v;
    };
    return fd_jets(vf, p, order, step).front();
}

Jet fd_partials(const Expr& e, const Point& p, int order, double step)
{
    // Extended precision keeps the evaluation noise well below the stencil
    // amplification of order-3 and order-4 differences.
    using LD = long double;
    FieldR<LD> f = [&e](const VecR<LD>& x) {
        VecR<LD> v(1);
        v[0] = e.evaluate<LD>(std::span<const LD>(x.data(), static_cast<std::size_t>(x.size())));
        return v;
    };
    return fd_jets_impl<LD>(f, p, order, step).front();
}

} // namespace slab
