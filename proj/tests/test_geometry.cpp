#include "slab/fd.hpp"
#include "slab/geometry.hpp"
#include "slab/soliton.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace slab;

namespace {

Point pt(double x, double y)
{
    Point p(2);
    p << x, y;
    return p;
}

// exp(2u) with u a small random polynomial: an analytic perturbation of flat R^2.
Chart random_conformal(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(-0.2, 0.2);
    char buf[256];
    std::snprintf(buf, sizeof buf, "exp(2*(%.6f*x + %.6f*y + %.6f*x*y + %.6f*x^2 + %.6f*y^2 + %.6f*x^3))", U(rng),
                  U(rng), U(rng), U(rng), U(rng), U(rng));
    return Chart::conformal("perturbed", 2, buf);
}

// Independent 2D conformal oracle: g = e^{2u} delta, Scal = -2 e^{-2u} Delta u.
double conformal_scal_oracle(const Expr& factor, const Point& p)
{
    // u = log(factor) / 2, Laplacian by central differences of u
    const double h = 1e-3;
    auto u = [&](double dx, double dy) { return 0.5 * std::log(eval(factor, pt(p[0] + dx, p[1] + dy))); };
    const double lap = (u(h, 0) + u(-h, 0) + u(0, h) + u(0, -h) - 4 * u(0, 0)) / (h * h);
    return -2.0 * std::exp(-2.0 * u(0, 0)) * lap;
}

} // namespace

TEST_CASE("metric values at known points")
{
    CHECK((metric_at(cigar_chart(), pt(0, 0)).value - Eigen::Matrix2d::Identity()).norm() < 1e-15);
    CHECK((metric_at(cigar_chart(), pt(1, 0)).value - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-15);
    Point q(3);
    q << 4, -1, 2;
    CHECK((metric_at(euclidean(3), q).value - Eigen::Matrix3d::Identity()).norm() == 0.0);
    auto g = metric_at(round_sphere_chart(), pt(0.3, 0.4)).value;
    auto gi = inverse_metric_at(round_sphere_chart(), pt(0.3, 0.4)).value;
    CHECK((g * gi - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(inverse_metric_at(cigar_chart(), pt(1, 0)).variance == Variance::Contravariant);
}

TEST_CASE("metric errors")
{
    Chart degenerate = Chart::from_strings("degenerate", 2, {"1", "1", "1"});
    CHECK_THROWS_AS(metric_at(degenerate, pt(0, 0)), NotSPD);
    Chart negative = Chart::conformal("negative", 2, "x");
    CHECK_THROWS_AS(metric_at(negative, pt(-1, 0)), NotSPD);
    Chart disk = Chart::conformal("disk", 2, "1", "1 - abs2");
    CHECK_THROWS_AS(metric_at(disk, pt(2, 0)), OutsideDomain);
    CHECK_NOTHROW(metric_at(disk, pt(0.5, 0)));
}

TEST_CASE("Christoffel symbols")
{
    for (const auto& gk : christoffel(euclidean(3), Point::Zero(3))) CHECK(gk.norm() == 0.0);
    for (const auto& gk : christoffel(cigar_chart(), pt(0, 0))) CHECK(gk.norm() < 1e-15);
    auto gamma = christoffel(cigar_chart(), pt(1, 0));
    CHECK(gamma[0](0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
    // Conformal formula: Gamma^k_ij = delta_ki u_j + delta_kj u_i - delta_ij u_k, u = -log(1+r^2)/2
    // At (1,0): u_x = -1/2, u_y = 0.
    CHECK(gamma[1](0, 1) == doctest::Approx(-0.5));
    CHECK(gamma[1](0, 0) == doctest::Approx(0.0));
    CHECK(gamma[0](1, 1) == doctest::Approx(0.5));
}

TEST_CASE("property: metric compatibility against finite differences")
{
    std::mt19937_64 rng(11);
    std::vector<Chart> charts = {cigar_chart(), round_sphere_chart(), random_conformal(rng),
                                 Chart::from_strings("skew", 2, {"2 + sin(x)", "0.3*cos(y)", "1 + x^2"})};
    for (const Chart& c : charts) {
        for (const Point& p : random_ball(2, 2.0, 100, 5)) {
            auto gamma = christoffel(c, p);
            Eigen::MatrixXd g = metric_at(c, p).value;
            // d_k g_ij = Gamma_ikj + Gamma_jki with Gamma_lij = g_lm Gamma^m_ij
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        const double dg = fd_partials(c.metric(i, j), p, 1).partial({k});
                        double rec = 0.0;
                        for (int l = 0; l < 2; ++l) rec += g(i, l) * gamma[l](k, j) + g(j, l) * gamma[l](k, i);
                        CHECK(std::abs(dg - rec) < 1e-9);
                    }
        }
    }
}

TEST_CASE("curvature of known metrics")
{
    CurvatureBundle flat = curvature(euclidean(3), Point::Zero(3));
    CHECK(flat.scal == 0.0);
    CHECK(flat.ricci.value.norm() == 0.0);
    CurvatureBundle cig = curvature(cigar_chart(), pt(0, 0));
    CHECK(cig.scal == doctest::Approx(4.0).epsilon(1e-13));
    CurvatureBundle sph = curvature(round_sphere_chart(), pt(0, 0));
    CHECK(sph.scal == doctest::Approx(2.0).epsilon(1e-13));
    // Constant curvature 1: R_abcd = g_ac g_bd - g_ad g_bc, i.e. R^a_bcd = delta_ac g_bd - delta_ad g_bc.
    CurvatureBundle s2 = curvature(round_sphere_chart(), pt(0.7, -0.2));
    Eigen::MatrixXd g = metric_at(round_sphere_chart(), pt(0.7, -0.2)).value;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double want = (a == c ? g(b, d) : 0.0) - (a == d ? g(b, c) : 0.0);
                    CHECK(s2.R(a, b, c, d) == doctest::Approx(want).epsilon(1e-12));
                }
    // Cigar: Scal = 4 / (1 + r^2) everywhere.
    for (const Point& p : random_ball(2, 3.0, 20, 3))
        CHECK(curvature(cigar_chart(), p).scal == doctest::Approx(4.0 / (1.0 + p.squaredNorm())).epsilon(1e-12));
}

TEST_CASE("property: curvature invariants and oracle agreement")
{
    std::mt19937_64 rng(21);
    std::vector<Chart> charts = {cigar_chart(), round_sphere_chart()};
    for (int k = 0; k < 5; ++k) charts.push_back(random_conformal(rng));
    charts.push_back(Chart::from_strings("skew3", 3, {"2 + sin(x)", "0.3*cos(y)", "0.1*z", "1 + x^2", "0", "1 + y*z/4"}));
    for (const Chart& c : charts) {
        const int m = c.dim();
        for (const Point& p : random_ball(m, 1.5, 20, 9)) {
            CurvatureBundle cb = curvature(c, p);
            CurvatureBundle fd = curvature(c, p, DerivSource::FiniteDifference);
            Eigen::MatrixXd ginv = inverse_metric_at(c, p).value;
            CHECK(std::abs(cb.scal - ginv.cwiseProduct(cb.ricci.value).sum()) < 1e-12);
            CHECK(std::abs(cb.scal - fd.scal) < 1e-5);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int cc = 0; cc < m; ++cc)
                        for (int d = 0; d < m; ++d) {
                            CHECK(cb.R(a, b, cc, d) == -cb.R(a, b, d, cc));
                            const double bianchi = cb.R(a, b, cc, d) + cb.R(a, cc, d, b) + cb.R(a, d, b, cc);
                            CHECK(std::abs(bianchi) < 1e-10);
                            CHECK(std::abs(cb.R(a, b, cc, d) - fd.R(a, b, cc, d)) < 1e-5);
                        }
            if (m == 2) CHECK(cb.scal == doctest::Approx(conformal_scal_oracle(c.metric(0, 0), p)).epsilon(1e-5));
        }
    }
}

TEST_CASE("Hessian, Laplacian and gradient norm")
{
    Point q(3);
    q << 0.3, -1.2, 2.0;
    CHECK((hessian(Expr::parse("abs2/2", 3), euclidean(3), q).value - Eigen::Matrix3d::Identity()).norm() < 1e-14);
    CHECK(hessian(Expr::parse("x", 3), euclidean(3), q).value.norm() == 0.0);
    const Expr f = Expr::parse("-log(1+x^2+y^2)", 2);
    CHECK((hessian(f, cigar_chart(), pt(0, 0)).value + 2.0 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
    CHECK(laplacian(Expr::parse("abs2/2", 3), euclidean(3), q) == doctest::Approx(3.0));
    CHECK(laplacian(f, cigar_chart(), pt(0, 0)) == doctest::Approx(-4.0));
    CHECK(laplacian(Expr::parse("7", 2), cigar_chart(), pt(1, 2)) == 0.0);
    CHECK(gradient_norm_sq(Expr::parse("abs2/2", 3), euclidean(3), q) == doctest::Approx(q.squaredNorm()));
    CHECK(gradient_norm_sq(f, cigar_chart(), pt(1, 0)) == doctest::Approx(2.0));
    CHECK(gradient_norm_sq(Expr::parse("3", 2), cigar_chart(), pt(1, 0)) == 0.0);
    // Laplacian in a curved chart against the conformal formula Delta = e^{-2u} Delta_flat in 2D.
    const Point p = pt(0.4, 0.9);
    const Expr h = Expr::parse("x^3*y + sin(y)", 2);
    const double flat = 6 * 0.4 * 0.9 - std::sin(0.9);
    CHECK(laplacian(h, cigar_chart(), p) == doctest::Approx((1 + p.squaredNorm()) * flat).epsilon(1e-12));
    CHECK(laplacian(h, cigar_chart(), p, DerivSource::FiniteDifference) ==
          doctest::Approx((1 + p.squaredNorm()) * flat).epsilon(1e-7));
}

TEST_CASE("divergence of symmetric tensors")
{
    // div g = 0
    const Chart c = round_sphere_chart();
    const Point p = pt(0.5, -0.3);
    Eigen::VectorXd dg = div_sym2([&c](const Point& x) { return metric_at(c, x).value; }, c, p);
    CHECK(dg.norm() < 1e-9);
    LocalGeometry geo = local_geometry(c, p, 2);
    CHECK(values(div_sym2(geo.g, geo)).norm() < 1e-13);
}

TEST_CASE("property: contracted Bianchi identity")
{
    std::mt19937_64 rng(99);
    std::vector<Chart> charts = {cigar_chart(), round_sphere_chart()};
    for (int k = 0; k < 10; ++k) charts.push_back(random_conformal(rng));
    for (const Chart& c : charts) {
        for (const Point& p : random_ball(2, 2.0, 50, 17)) {
            LocalGeometry geo = local_geometry(c, p, 3);
            JetMatrix ric = ricci(riemann(geo));
            Jet scal = scalar_curvature(geo.ginv, ric);
            Eigen::VectorXd lhs = values(div_sym2(ric, geo));
            CHECK((lhs - 0.5 * scal.gradient()).norm() < 1e-6);
        }
    }
    // Numeric field path for the cigar Ricci tensor.
    const Chart cig = cigar_chart();
    const Point p = pt(1.0, 0.5);
    Eigen::VectorXd fd = div_sym2([&cig](const Point& x) { return curvature(cig, x).ricci.value; }, cig, p);
    LocalGeometry geo = local_geometry(cig, p, 3);
    Jet scal = scalar_curvature(geo.ginv, ricci(riemann(geo)));
    CHECK((fd - 0.5 * scal.gradient()).norm() < 1e-7);
}
