#include "slab/stress.hpp"

namespace slab {

namespace {

struct S2Parts {
    Eigen::MatrixXd s2;
    double tau_sq = 0.0;
    double pairing = 0.0; // <d phi, nabla-bar tau>
};

S2Parts s2_parts(const MapJets& mj)
{
    const auto sff = second_fundamental_form(mj);
    const JetVector tau = tension(mj, sff);
    const Eigen::MatrixXd cov = values(pullback_derivative(mj, tau));
    const Eigen::MatrixXd g = values(mj.source.g);
    const Eigen::MatrixXd ginv = values(mj.source.ginv);
    const Eigen::MatrixXd h = values(mj.h);
    const Eigen::MatrixXd dphi = values(mj.dphi);
    const Eigen::VectorXd t = values(tau);

    // mixed(i, j) = h_ab d_i phi^a (nabla-bar_j tau)^b
    const Eigen::MatrixXd mixed = dphi.transpose() * h * cov;
    S2Parts out;
    out.tau_sq = t.dot(h * t);
    out.pairing = ginv.cwiseProduct(mixed).sum();
    out.s2 = (0.5 * out.tau_sq + out.pairing) * g - mixed - mixed.transpose();
    return out;
}

} // namespace

Eigen::MatrixXd s1_from(const MapJets& mj)
{
    const Eigen::MatrixXd g = values(mj.source.g);
    const Eigen::MatrixXd dphi = values(mj.dphi);
    const Eigen::MatrixXd pull = dphi.transpose() * values(mj.h) * dphi;
    return 0.5 * energy_density(mj) * g - pull;
}

Eigen::MatrixXd s2_from(const MapJets& mj) { return s2_parts(mj).s2; }

StressValue s1_at(const SmoothMap& phi, const Point& p)
{
    return {{s1_from(map_jets(phi, p, 1)), Variance::Covariant}, StressKind::S1};
}

StressValue s2_at(const SmoothMap& phi, const Point& p)
{
    return {{s2_from(map_jets(phi, p, 3)), Variance::Covariant}, StressKind::S2};
}

S2Trace s2_trace(const SmoothMap& phi, const Point& p)
{
    MapJets mj = map_jets(phi, p, 3);
    S2Parts parts = s2_parts(mj);
    S2Trace t;
    t.componentwise = values(mj.source.ginv).cwiseProduct(parts.s2).sum();
    t.formula = mj.m * (0.5 * parts.tau_sq + parts.pairing) - 2.0 * parts.pairing;
    return t;
}

Eigen::VectorXd div_s1_residual(const SmoothMap& phi, const Point& p, double step)
{
    const Eigen::VectorXd div =
        div_sym2([&phi](const Point& x) { return s1_from(map_jets(phi, x, 1)); }, phi.source(), p, step);
    MapJets mj = map_jets(phi, p, 2);
    const Eigen::VectorXd tau = values(tension(mj, second_fundamental_form(mj)));
    return div + values(mj.dphi).transpose() * (values(mj.h) * tau);
}

Eigen::VectorXd div_s2_residual(const SmoothMap& phi, const Point& p, double step)
{
    const Eigen::VectorXd div =
        div_sym2([&phi](const Point& x) { return s2_from(map_jets(phi, x, 3)); }, phi.source(), p, step);
    MapJets mj = map_jets(phi, p, 4);
    const Eigen::VectorXd tau2 = bitension(phi, p).value;
    return div + values(mj.dphi).transpose() * (values(mj.h) * tau2);
}

} // namespace slab
