#include "slab/soliton.hpp"

#include "slab/error.hpp"
#include "slab/fd.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace slab {

SolitonType classify(double constant)
{
    if (constant > 0.0) return SolitonType::Shrinking;
    if (constant < 0.0) return SolitonType::Expanding;
    return SolitonType::Steady;
}

const char* to_string(SolitonType t)
{
    switch (t) {
    case SolitonType::Steady: return "steady";
    case SolitonType::Shrinking: return "shrinking";
    case SolitonType::Expanding: return "expanding";
    }
    return "?";
}

namespace {

Jet potential_jet(const Expr& f, const Point& p, int order, DerivSource src)
{
    return src == DerivSource::Exact ? eval_jet(f, p, order) : fd_partials(f, p, order);
}

struct SolitonPoint {
    Eigen::MatrixXd residual;
    double scal = 0.0;
    double grad_f_sq = 0.0;
    double f = 0.0;
    double trace_identity = 0.0;
    Eigen::VectorXd identity_a;
    Eigen::MatrixXd ricci;
    Eigen::MatrixXd g;
};

// Everything at one point from a single order-3 metric expansion.
SolitonPoint evaluate(const RicciSolitonData& s, const Point& p, DerivSource src, bool with_identity_a)
{
    const int order = with_identity_a ? 3 : 2;
    LocalGeometry geo = local_geometry(s.chart, p, order, src);
    Riemann rm = riemann(geo);
    JetMatrix ric = ricci(rm);
    Jet scal = scalar_curvature(geo.ginv, ric);
    Jet f = potential_jet(s.f, p, 2, src);

    SolitonPoint out;
    out.g = values(geo.g);
    out.ricci = values(ric);
    const Eigen::MatrixXd ginv = values(geo.ginv);
    const Eigen::MatrixXd hess = values(hessian(f, geo));
    out.residual = out.ricci + hess - s.lambda * out.g;
    out.scal = scal.value();
    const Eigen::VectorXd df = f.gradient();
    out.grad_f_sq = std::max(0.0, df.dot(ginv * df));
    out.f = f.value();
    const double lap = ginv.cwiseProduct(hess).sum();
    out.trace_identity = lap - (s.chart.dim() * s.lambda - out.scal);
    if (with_identity_a) {
        const Eigen::VectorXd dscal = scal.gradient();
        out.identity_a = dscal - 2.0 * out.ricci * (ginv * df);
    }
    return out;
}

} // namespace

SymTensor2Value ricci_residual(const RicciSolitonData& s, const Point& p, DerivSource src)
{
    return {evaluate(s, p, src, false).residual, Variance::Covariant};
}

double trace_identity_residual(const RicciSolitonData& s, const Point& p)
{
    return evaluate(s, p, DerivSource::Exact, false).trace_identity;
}

double soliton_constant(const RicciSolitonData& s, const Point& p)
{
    SolitonPoint sp = evaluate(s, p, DerivSource::Exact, false);
    return sp.scal + sp.grad_f_sq - 2.0 * s.lambda * sp.f;
}

Eigen::VectorXd identity_a_residual(const RicciSolitonData& s, const Point& p)
{
    return evaluate(s, p, DerivSource::Exact, true).identity_a;
}

SolitonReport soliton_report(const RicciSolitonData& s, const std::vector<Point>& samples,
                             const std::string& description, DerivSource src)
{
    if (samples.empty()) throw std::invalid_argument("soliton report: empty sample set");
    SolitonReport r;
    r.sample_set = description;
    r.samples = samples.size();
    r.scal_inf = std::numeric_limits<double>::infinity();
    r.ricci_eigen_sup = -std::numeric_limits<double>::infinity();
    std::vector<double> constants;
    constants.reserve(samples.size());
    for (const Point& p : samples) {
        SolitonPoint sp = evaluate(s, p, src, true);
        r.residual_sup = std::max(r.residual_sup, sp.residual.norm());
        r.grad_f_sq_sup = std::max(r.grad_f_sq_sup, sp.grad_f_sq);
        r.scal_inf = std::min(r.scal_inf, sp.scal);
        r.trace_identity_sup = std::max(r.trace_identity_sup, std::abs(sp.trace_identity));
        r.identity_a_sup = std::max(r.identity_a_sup, sp.identity_a.norm());
        // Eigenvalues of Ric relative to g.
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sp.ricci, sp.g, Eigen::EigenvaluesOnly);
        r.ricci_eigen_sup = std::max(r.ricci_eigen_sup, es.eigenvalues().maxCoeff());
        constants.push_back(sp.scal + sp.grad_f_sq - 2.0 * s.lambda * sp.f);
    }
    double mean = 0.0;
    for (double c : constants) mean += c;
    mean /= static_cast<double>(constants.size());
    double var = 0.0;
    for (double c : constants) var += (c - mean) * (c - mean);
    r.constant_mean = mean;
    r.constant_stddev = std::sqrt(var / static_cast<double>(constants.size()));
    return r;
}

SolitonReport steady_bounds(const RicciSolitonData& s, const std::vector<Point>& samples,
                            const std::string& description)
{
    if (s.lambda != 0.0) throw NotSteady("soliton " + s.name + " has lambda = " + std::to_string(s.lambda));
    return soliton_report(s, samples, description);
}

SymTensor2Value yamabe_residual(const YamabeSolitonData& y, const Point& p)
{
    LocalGeometry geo = local_geometry(y.chart, p, 2);
    JetMatrix ric = ricci(riemann(geo));
    const double scal = scalar_curvature(geo.ginv, ric).value();
    const Eigen::MatrixXd hess = values(hessian(eval_jet(y.F, p, 2), geo));
    return {hess - (scal - y.rho) * values(geo.g), Variance::Covariant};
}

SymTensor2Value concircular_residual(const Expr& F, const Expr& phi, const Chart& c, const Point& p)
{
    LocalGeometry geo = local_geometry(c, p, 1);
    const Eigen::MatrixXd hess = values(hessian(eval_jet(F, p, 2), geo));
    return {hess - eval(phi, p) * values(geo.g), Variance::Covariant};
}

Chart euclidean(int m) { return Chart::conformal("euclidean" + std::to_string(m), m, "1", "1", true); }

Chart cigar_chart() { return Chart::conformal("cigar", 2, "1/(1+abs2)", "1", true); }

Chart round_sphere_chart()
{
    // The pole sits at infinity; stay well inside the chart.
    return Chart::conformal("sphere2", 2, "4/(1+abs2)^2", "1e36 - abs2", true);
}

RicciSolitonData cigar() { return {"cigar", cigar_chart(), Expr::parse("-log(1+abs2)", 2), 0.0}; }

RicciSolitonData gaussian(int m, double lambda)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "abs2*%.17g/2", lambda);
    const std::string potential = lambda == 1.0 ? "abs2/2" : buf;
    return {"gaussian" + std::to_string(m), euclidean(m), Expr::parse(potential, m), lambda};
}

RicciSolitonData flat(int m) { return {"euclidean" + std::to_string(m), euclidean(m), Expr::parse("0", m), 0.0}; }

YamabeSolitonData euclidean_yamabe(int m)
{
    return {"euclidean-yamabe" + std::to_string(m), euclidean(m), Expr::parse("abs2/2", m), -1.0};
}

std::vector<Point> polar_grid(double rmax, int nr, int nt)
{
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(nr) * nt);
    for (int i = 0; i < nr; ++i) {
        const double r = rmax * (i + 1) / nr;
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * std::numbers::pi * j / nt;
            Point p(2);
            p << r * std::cos(t), r * std::sin(t);
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Point> random_ball(int m, double rmax, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    // Explicit conversion keeps the stream identical across standard libraries.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    std::vector<Point> out;
    out.reserve(count);
    while (out.size() < count) {
        Point p(m);
        for (int i = 0; i < m; ++i) p[i] = uniform();
        if (p.squaredNorm() <= 1.0) out.push_back(rmax * p);
    }
    return out;
}

} // namespace slab
