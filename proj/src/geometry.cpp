#include "slab/geometry.hpp"

#include "slab/error.hpp"
#include "slab/fd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace slab {

namespace {

int packed_index(int dim, int i, int j)
{
    if (i > j) std::swap(i, j);
    return i * dim - i * (i - 1) / 2 + (j - i);
}

std::string describe(const Point& p)
{
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

void check_spd(const Eigen::MatrixXd& g, const std::string& chart, const Point& p)
{
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!std::isfinite(g.data()[i])) throw NotSPD("metric of " + chart + " is not finite at " + describe(p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi)
        throw NotSPD("metric of " + chart + " is not positive definite at " + describe(p));
}

} // namespace

Chart::Chart(std::string name, int dim, std::vector<Expr> metric, Expr domain, bool radial)
    : name_(std::move(name)), dim_(dim), metric_(std::move(metric)), domain_(std::move(domain)), radial_(radial)
{
    if (dim_ < 1 || dim_ > kMaxJetVars) throw ConfigError("chart " + name_ + ": dimension must be in 1..8");
    if (static_cast<int>(metric_.size()) != dim_ * (dim_ + 1) / 2)
        throw ConfigError("chart " + name_ + ": expected " + std::to_string(dim_ * (dim_ + 1) / 2) + " metric entries");
    if (!domain_.valid()) domain_ = Expr::parse("1", dim_);
}

Chart Chart::from_strings(std::string name, int dim, const std::vector<std::string>& metric, const std::string& domain,
                          bool radial)
{
    std::vector<Expr> entries;
    entries.reserve(metric.size());
    for (const auto& s : metric) entries.push_back(Expr::parse(s, dim));
    return Chart(std::move(name), dim, std::move(entries), Expr::parse(domain, dim), radial);
}

Chart Chart::conformal(std::string name, int dim, const std::string& factor, const std::string& domain, bool radial)
{
    std::vector<std::string> entries;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) entries.push_back(i == j ? factor : "0");
    return from_strings(std::move(name), dim, entries, domain, radial);
}

const Expr& Chart::metric(int i, int j) const { return metric_[packed_index(dim_, i, j)]; }

bool Chart::contains(const Point& p) const
{
    if (p.size() != dim_) return false;
    try {
        return eval(domain_, p) > 0.0;
    } catch (const DomainError&) {
        return false;
    }
}

void Chart::require(const Point& p) const
{
    if (p.size() != dim_)
        throw std::invalid_argument("chart " + name_ + ": point has dimension " + std::to_string(p.size()));
    if (!contains(p)) throw OutsideDomain("point " + describe(p) + " is outside the domain of " + name_);
}

JetMatrix metric_jets(const Chart& c, const Point& p, int order, DerivSource src)
{
    c.require(p);
    const int m = c.dim();
    JetMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const Expr& e = c.metric(i, j);
            Jet v = (src == DerivSource::FiniteDifference && order > 0) ? fd_partials(e, p, order)
                                                                        : eval_jet(e, p, order);
            g(i, j) = v;
            g(j, i) = v;
        }
    check_spd(values(g), c.name(), p);
    return g;
}

JetMatrix inverse(const JetMatrix& g)
{
    const Eigen::Index m = g.rows();
    const Eigen::MatrixXd g0 = values(g);
    const Eigen::MatrixXd g0inv = g0.inverse();
    int order = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!g.data()[i].is_broadcast()) order = std::max(order, g.data()[i].order());

    // g^{-1} = sum_j (-g0^{-1} H)^j g0^{-1}, H = g - g0 nilpotent of degree order + 1
    JetMatrix h = g;
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] -= Jet(g0.data()[i]);
    const JetMatrix step = -(g0inv.cast<Jet>() * h);
    JetMatrix term = g0inv.cast<Jet>();
    JetMatrix sum = term;
    for (int j = 1; j <= order; ++j) {
        term = step * term;
        sum += term;
    }
    (void)m;
    return sum;
}

LocalGeometry local_geometry(JetMatrix g)
{
    LocalGeometry geo;
    geo.dim = static_cast<int>(g.rows());
    geo.order = g(0, 0).order();
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!g.data()[i].is_broadcast()) geo.order = std::min(geo.order, g.data()[i].order());
    if (geo.order < 1) throw std::invalid_argument("local_geometry: metric jets need order >= 1");
    geo.ginv = inverse(g);
    geo.g = std::move(g);

    const int m = geo.dim;
    // dg[l](i, j) = d_l g_ij
    std::vector<JetMatrix> dg(m, JetMatrix(m, m));
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                dg[l](i, j) = geo.g(i, j).derivative(l);
                dg[l](j, i) = dg[l](i, j);
            }
    geo.gamma.assign(m, JetMatrix(m, m));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                Jet s(0.0);
                for (int l = 0; l < m; ++l) s += geo.ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
                s *= 0.5;
                geo.gamma[k](i, j) = s;
                geo.gamma[k](j, i) = s;
            }
    return geo;
}

LocalGeometry local_geometry(const Chart& c, const Point& p, int order, DerivSource src)
{
    return local_geometry(metric_jets(c, p, order, src));
}

Riemann riemann(const LocalGeometry& geo)
{
    const int m = geo.dim;
    Riemann rm(m);
    // dgamma[c][a](d, b) = d_c Gamma^a_db
    std::vector<std::vector<JetMatrix>> dgamma(m, std::vector<JetMatrix>(m, JetMatrix(m, m)));
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int d = 0; d < m; ++d)
                for (int b = d; b < m; ++b) {
                    dgamma[c][a](d, b) = geo.gamma[a](d, b).derivative(c);
                    dgamma[c][a](b, d) = dgamma[c][a](d, b);
                }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = c + 1; d < m; ++d) {
                    Jet r = dgamma[c][a](d, b) - dgamma[d][a](c, b);
                    for (int e = 0; e < m; ++e)
                        r += geo.gamma[a](c, e) * geo.gamma[e](d, b) - geo.gamma[a](d, e) * geo.gamma[e](c, b);
                    rm(a, b, c, d) = r;
                    rm(a, b, d, c) = -r;
                }
    return rm;
}

JetMatrix ricci(const Riemann& rm)
{
    const int m = rm.dim();
    JetMatrix ric(m, m);
    for (int b = 0; b < m; ++b)
        for (int d = b; d < m; ++d) {
            Jet s(0.0);
            for (int c = 0; c < m; ++c) s += rm(c, b, c, d);
            ric(b, d) = s;
        }
    // Symmetric for Levi-Civita; average the two contractions to keep it exact.
    for (int b = 0; b < m; ++b)
        for (int d = 0; d < b; ++d) {
            Jet s(0.0);
            for (int c = 0; c < m; ++c) s += rm(c, b, c, d);
            ric(d, b) = 0.5 * (ric(d, b) + s);
            ric(b, d) = ric(d, b);
        }
    return ric;
}

Jet scalar_curvature(const JetMatrix& ginv, const JetMatrix& ric)
{
    Jet s(0.0);
    for (Eigen::Index i = 0; i < ric.rows(); ++i)
        for (Eigen::Index j = 0; j < ric.cols(); ++j) s += ginv(i, j) * ric(i, j);
    return s;
}

SymTensor2Value metric_at(const Chart& c, const Point& p)
{
    return {values(metric_jets(c, p, 0)), Variance::Covariant};
}

SymTensor2Value inverse_metric_at(const Chart& c, const Point& p)
{
    Eigen::MatrixXd g = metric_at(c, p).value;
    Eigen::MatrixXd inv = g.inverse();
    inv = 0.5 * (inv + inv.transpose()).eval();
    return {inv, Variance::Contravariant};
}

std::vector<Eigen::MatrixXd> christoffel(const Chart& c, const Point& p, DerivSource src)
{
    LocalGeometry geo = local_geometry(c, p, 1, src);
    std::vector<Eigen::MatrixXd> out;
    for (const auto& gk : geo.gamma) out.push_back(values(gk));
    return out;
}

CurvatureBundle curvature(const Chart& c, const Point& p, DerivSource src)
{
    LocalGeometry geo = local_geometry(c, p, 2, src);
    Riemann rm = riemann(geo);
    JetMatrix ric = ricci(rm);
    CurvatureBundle out;
    out.dim = geo.dim;
    const int m = geo.dim;
    out.riemann.resize(static_cast<std::size_t>(m) * m * m * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cc = 0; cc < m; ++cc)
                for (int d = 0; d < m; ++d)
                    out.riemann[((static_cast<std::size_t>(a) * m + b) * m + cc) * m + d] = rm(a, b, cc, d).value();
    out.ricci = {values(ric), Variance::Covariant};
    out.scal = scalar_curvature(geo.ginv, ric).value();
    return out;
}

JetMatrix hessian(const Jet& f, const LocalGeometry& geo)
{
    const int m = geo.dim;
    std::vector<Jet> df(m);
    for (int k = 0; k < m; ++k) df[k] = f.derivative(k);
    JetMatrix h(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Jet s = df[i].derivative(j);
            for (int k = 0; k < m; ++k) s -= geo.gamma[k](i, j) * df[k];
            h(i, j) = s;
            h(j, i) = s;
        }
    return h;
}

SymTensor2Value hessian(const Expr& f, const Chart& c, const Point& p, DerivSource src)
{
    LocalGeometry geo = local_geometry(c, p, 1, src);
    Jet fj = src == DerivSource::Exact ? eval_jet(f, p, 2) : fd_partials(f, p, 2);
    return {values(hessian(fj, geo)), Variance::Covariant};
}

double laplacian(const Expr& f, const Chart& c, const Point& p, DerivSource src)
{
    LocalGeometry geo = local_geometry(c, p, 1, src);
    Jet fj = src == DerivSource::Exact ? eval_jet(f, p, 2) : fd_partials(f, p, 2);
    const Eigen::MatrixXd h = values(hessian(fj, geo));
    return (values(geo.ginv).cwiseProduct(h)).sum();
}

double gradient_norm_sq(const Expr& f, const Chart& c, const Point& p, DerivSource src)
{
    const Eigen::MatrixXd ginv = inverse_metric_at(c, p).value;
    Jet fj = src == DerivSource::Exact ? eval_jet(f, p, 1) : fd_partials(f, p, 1);
    const Eigen::VectorXd df = fj.gradient();
    return std::max(0.0, df.dot(ginv * df));
}

JetVector div_sym2(const JetMatrix& T, const LocalGeometry& geo)
{
    const int m = geo.dim;
    JetVector out(m);
    for (int i = 0; i < m; ++i) {
        Jet s(0.0);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                Jet nabla = T(k, i).derivative(j);
                for (int l = 0; l < m; ++l) nabla -= geo.gamma[l](j, k) * T(l, i) + geo.gamma[l](j, i) * T(k, l);
                s += geo.ginv(j, k) * nabla;
            }
        out(i) = s;
    }
    return out;
}

Eigen::VectorXd div_sym2(const SymTensor2Field& T, const Chart& c, const Point& p, double step)
{
    const int m = c.dim();
    LocalGeometry geo = local_geometry(c, p, 1);
    VectorField flat = [&T, m](const Point& x) {
        Eigen::MatrixXd t = T(x);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.data(), m * m));
    };
    std::vector<Jet> jets = fd_jets(flat, p, 1, step);
    JetMatrix tj(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) tj(i, j) = jets[static_cast<std::size_t>(j) * m + i];
    return values(div_sym2(tj, geo));
}

} // namespace slab
