#include "slab/maps.hpp"

#include "slab/error.hpp"
#include "slab/fd.hpp"
#include "slab/soliton.hpp"

#include <cmath>
#include <cstdio>

namespace slab {

SmoothMap::SmoothMap(std::string name, Chart source, Chart target, std::vector<Expr> components)
    : name_(std::move(name)), source_(std::move(source)), target_(std::move(target)), components_(std::move(components))
{
    if (static_cast<int>(components_.size()) != target_.dim())
        throw ConfigError("map " + name_ + ": expected " + std::to_string(target_.dim()) + " components");
    for (const auto& c : components_)
        if (c.dim() > source_.dim()) throw ConfigError("map " + name_ + ": component uses too many variables");
}

SmoothMap SmoothMap::from_strings(std::string name, Chart source, Chart target,
                                  const std::vector<std::string>& components)
{
    std::vector<Expr> parsed;
    parsed.reserve(components.size());
    for (const auto& s : components) parsed.push_back(Expr::parse(s, source.dim()));
    return SmoothMap(std::move(name), std::move(source), std::move(target), std::move(parsed));
}

Point SmoothMap::image(const Point& p) const
{
    source_.require(p);
    Point q(n());
    for (int a = 0; a < n(); ++a) q[a] = eval(components_[a], p);
    if (!target_.contains(q))
        throw ImageOutsideTargetDomain("map " + name_ + ": image leaves the domain of " + target_.name());
    return q;
}

std::vector<Jet> SmoothMap::jets(const Point& p, int order, DerivSource src) const
{
    std::vector<Jet> out;
    out.reserve(components_.size());
    for (const auto& c : components_)
        out.push_back(src == DerivSource::FiniteDifference && order > 0 ? fd_partials(c, p, order)
                                                                        : eval_jet(c, p, order));
    return out;
}

MapJets map_jets(const SmoothMap& phi, const Point& p, int order, DerivSource src)
{
    if (order < 1 || order > kMaxJetOrder) throw std::invalid_argument("map_jets: order must be in 1..4");
    MapJets mj;
    mj.order = order;
    mj.m = phi.m();
    mj.n = phi.n();
    mj.base = p;
    mj.image = phi.image(p);
    const int metric_order = std::max(order - 1, 1);
    mj.source = local_geometry(phi.source(), p, metric_order, src);
    mj.phi = phi.jets(p, order, src);

    LocalGeometry target = local_geometry(phi.target(), mj.image, metric_order, src);
    JetComposer along(mj.phi);
    const int n = mj.n;
    mj.h.resize(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            mj.h(a, b) = along(target.g(a, b));
            mj.h(b, a) = mj.h(a, b);
        }
    mj.gamma_n.assign(n, JetMatrix(n, n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = b; c < n; ++c) {
                mj.gamma_n[a](b, c) = along(target.gamma[a](b, c));
                mj.gamma_n[a](c, b) = mj.gamma_n[a](b, c);
            }
    mj.dphi.resize(n, mj.m);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < mj.m; ++i) mj.dphi(a, i) = mj.phi[a].derivative(i);
    return mj;
}

std::vector<JetMatrix> second_fundamental_form(const MapJets& mj)
{
    const int m = mj.m, n = mj.n;
    std::vector<JetMatrix> sff(n, JetMatrix(m, m));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                Jet s = mj.dphi(a, i).derivative(j);
                for (int k = 0; k < m; ++k) s -= mj.source.gamma[k](i, j) * mj.dphi(a, k);
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c) s += mj.gamma_n[a](b, c) * mj.dphi(b, i) * mj.dphi(c, j);
                sff[a](i, j) = s;
                sff[a](j, i) = s;
            }
    return sff;
}

JetVector tension(const MapJets& mj, const std::vector<JetMatrix>& sff)
{
    JetVector tau(mj.n);
    for (int a = 0; a < mj.n; ++a) {
        Jet s(0.0);
        for (int i = 0; i < mj.m; ++i)
            for (int j = 0; j < mj.m; ++j) s += mj.source.ginv(i, j) * sff[a](i, j);
        tau(a) = s;
    }
    return tau;
}

JetMatrix pullback_derivative(const MapJets& mj, const JetVector& v)
{
    const int m = mj.m, n = mj.n;
    JetMatrix cov(n, m);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i) {
            Jet s = v(a).derivative(i);
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) s += mj.gamma_n[a](b, c) * mj.dphi(b, i) * v(c);
            cov(a, i) = s;
        }
    return cov;
}

JetVector rough_laplacian(const MapJets& mj, const JetVector& v)
{
    const int m = mj.m, n = mj.n;
    const JetMatrix cov = pullback_derivative(mj, v);
    JetVector out(n);
    for (int a = 0; a < n; ++a) {
        Jet s(0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Jet t = cov(a, j).derivative(i);
                for (int k = 0; k < m; ++k) t -= mj.source.gamma[k](i, j) * cov(a, k);
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c) t += mj.gamma_n[a](b, c) * mj.dphi(b, i) * cov(c, j);
                s += mj.source.ginv(i, j) * t;
            }
        out(a) = s;
    }
    return out;
}

Eigen::VectorXd curvature_term(const MapJets& mj, const CurvatureBundle& rn, const Eigen::VectorXd& v)
{
    const int n = mj.n;
    const Eigen::MatrixXd ginv = values(mj.source.ginv);
    const Eigen::MatrixXd dphi = values(mj.dphi);
    // w(d, b) = g^ij d_i phi^d d_j phi^b
    const Eigen::MatrixXd w = dphi * ginv * dphi.transpose();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) out[a] += rn.R(a, b, c, d) * v[c] * w(d, b);
    return out;
}

namespace {

Jet energy_density_jet(const MapJets& mj)
{
    Jet s(0.0);
    for (int i = 0; i < mj.m; ++i)
        for (int j = 0; j < mj.m; ++j) {
            Jet inner(0.0);
            for (int a = 0; a < mj.n; ++a)
                for (int b = 0; b < mj.n; ++b) inner += mj.h(a, b) * mj.dphi(a, i) * mj.dphi(b, j);
            s += mj.source.ginv(i, j) * inner;
        }
    return s;
}

KatoGap kato_from(const MapJets& mj, const std::vector<JetMatrix>& sff)
{
    KatoGap k;
    const Jet e = energy_density_jet(mj);
    const double hess = hessian_norm_sq(mj, sff);
    if (!(e.value() > 0.0)) {
        k.zero_differential = true;
        k.value = hess;
        return k;
    }
    const Eigen::VectorXd de = e.gradient();
    const double grad_norm_sq = de.dot(values(mj.source.ginv) * de) / (4.0 * e.value());
    k.value = hess - grad_norm_sq;
    return k;
}

Eigen::VectorXd tension_values_exact(const SmoothMap& phi, const Point& p)
{
    MapJets mj = map_jets(phi, p, 2);
    return values(tension(mj, second_fundamental_form(mj)));
}

} // namespace

double energy_density(const MapJets& mj)
{
    const Eigen::MatrixXd ginv = values(mj.source.ginv);
    const Eigen::MatrixXd h = values(mj.h);
    const Eigen::MatrixXd dphi = values(mj.dphi);
    return std::max(0.0, (dphi.transpose() * h * dphi).cwiseProduct(ginv).sum());
}

double hessian_norm_sq(const MapJets& mj, const std::vector<JetMatrix>& sff)
{
    const Eigen::MatrixXd ginv = values(mj.source.ginv);
    const Eigen::MatrixXd h = values(mj.h);
    std::vector<Eigen::MatrixXd> b;
    for (const auto& s : sff) b.push_back(values(s));
    double total = 0.0;
    for (int a = 0; a < mj.n; ++a)
        for (int c = 0; c < mj.n; ++c) total += h(a, c) * (ginv * b[a] * ginv).cwiseProduct(b[c]).sum();
    return std::max(0.0, total);
}

double pullback_norm_sq(const MapJets& mj, const Eigen::VectorXd& v)
{
    return std::max(0.0, v.dot(values(mj.h) * v));
}

Eigen::MatrixXd differential(const SmoothMap& phi, const Point& p)
{
    phi.image(p);
    Eigen::MatrixXd d(phi.n(), phi.m());
    const auto jets = phi.jets(p, 1);
    for (int a = 0; a < phi.n(); ++a) d.row(a) = jets[a].gradient().transpose();
    return d;
}

double energy_density(const SmoothMap& phi, const Point& p) { return energy_density(map_jets(phi, p, 1)); }

std::vector<Eigen::MatrixXd> second_fund_form(const SmoothMap& phi, const Point& p, DerivSource src)
{
    MapJets mj = map_jets(phi, p, 2, src);
    std::vector<Eigen::MatrixXd> out;
    for (const auto& s : second_fundamental_form(mj)) out.push_back(values(s));
    return out;
}

PullbackField tension(const SmoothMap& phi, const Point& p, DerivSource src)
{
    MapJets mj = map_jets(phi, p, 2, src);
    return {p, values(tension(mj, second_fundamental_form(mj)))};
}

PullbackField rough_laplacian_tension(const SmoothMap& phi, const Point& p, DerivSource src)
{
    if (src == DerivSource::Exact) {
        MapJets mj = map_jets(phi, p, 4);
        return {p, values(rough_laplacian(mj, tension(mj, second_fundamental_form(mj))))};
    }
    MapJets mj = map_jets(phi, p, 3);
    std::vector<Jet> tj = fd_jets([&phi](const Point& x) { return tension_values_exact(phi, x); }, p, 2);
    JetVector tau(phi.n());
    for (int a = 0; a < phi.n(); ++a) tau(a) = tj[a];
    return {p, values(rough_laplacian(mj, tau))};
}

PullbackField curvature_term(const SmoothMap& phi, const Point& p)
{
    MapJets mj = map_jets(phi, p, 2);
    const Eigen::VectorXd tau = values(tension(mj, second_fundamental_form(mj)));
    return {p, curvature_term(mj, curvature(phi.target(), mj.image), tau)};
}

PullbackField bitension(const SmoothMap& phi, const Point& p, DerivSource src)
{
    if (src == DerivSource::Exact) {
        MapJets mj = map_jets(phi, p, 4);
        const JetVector tau = tension(mj, second_fundamental_form(mj));
        const Eigen::VectorXd lap = values(rough_laplacian(mj, tau));
        return {p, lap + curvature_term(mj, curvature(phi.target(), mj.image), values(tau))};
    }
    MapJets mj = map_jets(phi, p, 3);
    std::vector<Jet> tj = fd_jets([&phi](const Point& x) { return tension_values_exact(phi, x); }, p, 2);
    JetVector tau(phi.n());
    for (int a = 0; a < phi.n(); ++a) tau(a) = tj[a];
    const Eigen::VectorXd lap = values(rough_laplacian(mj, tau));
    const CurvatureBundle rn = curvature(phi.target(), mj.image, DerivSource::FiniteDifference);
    return {p, lap + curvature_term(mj, rn, values(tau))};
}

KatoGap kato_gap(const SmoothMap& phi, const Point& p)
{
    MapJets mj = map_jets(phi, p, 3);
    return kato_from(mj, second_fundamental_form(mj));
}

BochnerTerms bochner(const SmoothMap& phi, const Point& p, double harmonic_tol)
{
    MapJets mj = map_jets(phi, p, 3);
    const auto sff = second_fundamental_form(mj);
    const Eigen::VectorXd tau = values(tension(mj, sff));
    const double tau_norm = std::sqrt(pullback_norm_sq(mj, tau));
    if (tau_norm > harmonic_tol)
        throw NotHarmonicAtPoint("map " + phi.name() + ": |tau| = " + std::to_string(tau_norm) +
                                 " exceeds the harmonic tolerance");
    const int m = mj.m, n = mj.n;
    BochnerTerms t;

    const Jet e = energy_density_jet(mj);
    const JetMatrix he = hessian(e, mj.source);
    const Eigen::MatrixXd ginv = values(mj.source.ginv);
    t.laplacian_half_energy = 0.5 * ginv.cwiseProduct(values(he)).sum();
    t.hessian_norm_sq = hessian_norm_sq(mj, sff);

    const Eigen::MatrixXd ric = values(ricci(riemann(mj.source)));
    const Eigen::MatrixXd h = values(mj.h);
    const Eigen::MatrixXd dphi = values(mj.dphi);
    // pulled back metric phi*h with both indices raised
    const Eigen::MatrixXd pull = ginv * dphi.transpose() * h * dphi * ginv;
    t.ricci_term = ric.cwiseProduct(pull).sum();

    const CurvatureBundle rn = curvature(phi.target(), mj.image);
    // sum over i, j of <R(X_i, X_j) Y_j, Y_i> with X_i = d_i phi and Y_k = g^ki X_i
    const Eigen::MatrixXd w = dphi * ginv;
    double target = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXd xi = dphi.col(i);
            const Eigen::VectorXd xj = dphi.col(j);
            const Eigen::VectorXd yi = w.col(i);
            const Eigen::VectorXd yj = w.col(j);
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
            for (int e2 = 0; e2 < n; ++e2)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) r[e2] += rn.R(e2, b, c, d) * xi[c] * xj[d] * yj[b];
            target += yi.dot(h * r);
        }
    t.target_term = target;
    t.residual = t.laplacian_half_energy - (t.hessian_norm_sq + t.ricci_term - t.target_term);
    return t;
}

double bochner_residual(const SmoothMap& phi, const Point& p, double harmonic_tol)
{
    return bochner(phi, p, harmonic_tol).residual;
}

MapPointReport analyze_point(const SmoothMap& phi, const Point& p)
{
    MapJets mj = map_jets(phi, p, 4);
    const auto sff = second_fundamental_form(mj);
    const JetVector tau = tension(mj, sff);
    MapPointReport r;
    r.point = p;
    r.energy_density = energy_density(mj);
    r.hessian_norm_sq = hessian_norm_sq(mj, sff);
    r.tension = values(tau);
    r.tension_norm_sq = pullback_norm_sq(mj, r.tension);
    r.bitension =
        values(rough_laplacian(mj, tau)) + curvature_term(mj, curvature(phi.target(), mj.image), r.tension);
    r.bitension_norm = std::sqrt(pullback_norm_sq(mj, r.bitension));
    r.kato = kato_from(mj, sff);
    r.full_hessian_density = r.hessian_norm_sq + r.energy_density;
    return r;
}

namespace {

std::string format_coefficient(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string variable(int i) { return "x" + std::to_string(i + 1); }

} // namespace

SmoothMap constant_map(const Chart& source, const Chart& target, const Point& value)
{
    std::vector<std::string> comps;
    for (Eigen::Index a = 0; a < value.size(); ++a) comps.push_back("(" + format_coefficient(value[a]) + ")");
    return SmoothMap::from_strings("constant", source, target, comps);
}

SmoothMap linear_map(const Chart& source, const Eigen::MatrixXd& A)
{
    if (A.cols() != source.dim()) throw ConfigError("linear map: matrix width must equal the source dimension");
    std::vector<std::string> comps;
    for (Eigen::Index a = 0; a < A.rows(); ++a) {
        std::string c = "0";
        for (Eigen::Index i = 0; i < A.cols(); ++i)
            if (A(a, i) != 0.0) c += " + (" + format_coefficient(A(a, i)) + ")*" + variable(static_cast<int>(i));
        comps.push_back(c);
    }
    return SmoothMap::from_strings("linear", source, euclidean(static_cast<int>(A.rows())), comps);
}

SmoothMap quadratic_map(const Chart& source)
{
    return SmoothMap::from_strings("quadratic", source, euclidean(1), {"abs2"});
}

SmoothMap quartic_map() { return SmoothMap::from_strings("quartic", euclidean(1), euclidean(1), {"x^4"}); }

SmoothMap coordinate_map(const Chart& source, int k)
{
    return SmoothMap::from_strings("coordinate", source, euclidean(1), {variable(k)});
}

SmoothMap stereographic_identity(const Chart& source)
{
    if (source.dim() != 2) throw ConfigError("stereographic identity needs a 2-dimensional source");
    return SmoothMap::from_strings("stereo", source, round_sphere_chart(), {"x", "y"});
}

} // namespace slab
