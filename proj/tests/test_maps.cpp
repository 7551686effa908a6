#include "slab/error.hpp"
#include "slab/maps.hpp"
#include "slab/soliton.hpp"

#include <doctest.h>

#include <cmath>

using namespace slab;

namespace {

Point pt(double x, double y)
{
    Point p(2);
    p << x, y;
    return p;
}

std::vector<SmoothMap> test_maps()
{
    Eigen::MatrixXd A(2, 3);
    A << 1, 2, 0, 0, -1, 3;
    return {
        linear_map(euclidean(3), A),
        quadratic_map(euclidean(3)),
        quadratic_map(cigar_chart()),
        quartic_map(),
        stereographic_identity(euclidean(2)),
        stereographic_identity(cigar_chart()),
        SmoothMap::from_strings("bent", euclidean(2), round_sphere_chart(), {"x^2 - y/3", "sin(y) + x*y/2"}),
        SmoothMap::from_strings("twist", cigar_chart(), round_sphere_chart(), {"x*y + 0.2", "x - y^2"}),
    };
}

std::vector<Point> sample(const SmoothMap& phi, std::size_t count, std::uint64_t seed)
{
    return random_ball(phi.m(), 1.2, count, seed);
}

} // namespace

TEST_CASE("differential and energy density")
{
    CHECK(energy_density(constant_map(euclidean(2), euclidean(3), Point::Zero(3)), pt(1, 2)) == 0.0);
    Point q(3);
    q << 0.1, 0.2, 0.3;
    CHECK(energy_density(linear_map(euclidean(3), Eigen::Matrix3d::Identity()), q) == doctest::Approx(3.0));
    CHECK(energy_density(stereographic_identity(euclidean(2)), pt(0, 0)) == doctest::Approx(8.0));
    for (const Point& p : random_ball(2, 3.0, 10, 2)) {
        const double r2 = p.squaredNorm();
        CHECK(energy_density(stereographic_identity(euclidean(2)), p) ==
              doctest::Approx(8.0 / ((1 + r2) * (1 + r2))).epsilon(1e-13));
        // Cigar source: conformal invariance multiplies the density by 1 + r^2.
        CHECK(energy_density(stereographic_identity(cigar_chart()), p) ==
              doctest::Approx(8.0 * (1 + r2) / ((1 + r2) * (1 + r2))).epsilon(1e-13));
    }
    Eigen::MatrixXd d = differential(quadratic_map(euclidean(2)), pt(1, -2));
    CHECK(d(0, 0) == doctest::Approx(2.0));
    CHECK(d(0, 1) == doctest::Approx(-4.0));
}

TEST_CASE("second fundamental form")
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(2, 3);
    Point q(3);
    q << 0.5, -0.1, 2.0;
    for (const auto& b : second_fund_form(linear_map(euclidean(3), A), q)) CHECK(b.norm() < 1e-14);
    auto b = second_fund_form(quadratic_map(euclidean(3)), q);
    CHECK((b[0] - 2.0 * Eigen::Matrix3d::Identity()).norm() < 1e-14);
    auto s = second_fund_form(stereographic_identity(euclidean(2)), pt(1, 0));
    auto fd = second_fund_form(stereographic_identity(euclidean(2)), pt(1, 0), DerivSource::FiniteDifference);
    double size = 0.0;
    for (int a = 0; a < 2; ++a) {
        size += s[a].norm();
        CHECK((s[a] - fd[a]).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK(size > 0.1);
}

TEST_CASE("second fundamental form transforms as a tensor under linear reparametrization")
{
    // x = P y; in y-coordinates the flat metric becomes P^T P and psi(y) = phi(P y).
    Eigen::Matrix2d P;
    P << 1.2, 0.3, -0.4, 0.9;
    const Eigen::Matrix2d G = P.transpose() * P;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g", G(0, 0));
    std::string g11 = buf;
    std::snprintf(buf, sizeof buf, "%.17g", G(0, 1));
    std::string g12 = buf;
    std::snprintf(buf, sizeof buf, "%.17g", G(1, 1));
    std::string g22 = buf;
    Chart skewed = Chart::from_strings("skewed", 2, {g11, g12, g22});
    auto lin = [&](int row) {
        char b2[128];
        std::snprintf(b2, sizeof b2, "(%.17g*x + %.17g*y)", P(row, 0), P(row, 1));
        return std::string(b2);
    };
    const std::string u = lin(0), v = lin(1);
    SmoothMap phi = SmoothMap::from_strings("bent", euclidean(2), round_sphere_chart(), {"x^2 - y/3", "sin(y) + x*y/2"});
    SmoothMap psi = SmoothMap::from_strings("bent-y", skewed, round_sphere_chart(),
                                            {u + "^2 - " + v + "/3", "sin(" + v + ") + " + u + "*" + v + "/2"});
    const Point y = pt(0.3, -0.5);
    const Point x = P * y;
    auto bx = second_fund_form(phi, x);
    auto by = second_fund_form(psi, y);
    for (int a = 0; a < 2; ++a) CHECK((P.transpose() * bx[a] * P - by[a]).norm() < 1e-12);
    // The tension is a coordinate-free section.
    CHECK((tension(phi, x).value - tension(psi, y).value).norm() < 1e-12);
    CHECK((bitension(phi, x).value - bitension(psi, y).value).norm() < 1e-9);
}

TEST_CASE("tension field")
{
    for (int m = 1; m <= 4; ++m) {
        const Point q = Point::Constant(m, 0.3);
        CHECK(tension(quadratic_map(euclidean(m)), q).value[0] == doctest::Approx(2.0 * m).epsilon(1e-14));
    }
    for (const Point& p : random_ball(2, 3.0, 50, 7)) {
        CHECK(tension(stereographic_identity(euclidean(2)), p).value.norm() <= 1e-9);
        CHECK(tension(stereographic_identity(cigar_chart()), p).value.norm() <= 1e-9);
    }
    CHECK(tension(constant_map(euclidean(2), round_sphere_chart(), pt(0.1, 0.2)), pt(1, 1)).value.norm() == 0.0);
}

TEST_CASE("rough Laplacian and bitension")
{
    Point q(3);
    q << 0.7, -0.2, 1.1;
    CHECK(rough_laplacian_tension(quadratic_map(euclidean(3)), q).value.norm() < 1e-13);
    Point x(1);
    x << 0.8;
    CHECK(rough_laplacian_tension(quartic_map(), x).value[0] == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(bitension(quartic_map(), x).value[0] == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(bitension(quadratic_map(euclidean(3)), q).value.norm() <= 1e-10);
    CHECK(tension(quadratic_map(euclidean(3)), q).value.norm() == doctest::Approx(6.0));
    for (const Point& p : random_ball(2, 2.0, 20, 3)) {
        CHECK(bitension(stereographic_identity(euclidean(2)), p).value.norm() <= 1e-7);
        CHECK(bitension(stereographic_identity(cigar_chart()), p).value.norm() <= 1e-7);
    }
    // Flat target, cigar source: tau2 = L(L(phi)) with L = (1 + r^2) Delta_flat.
    SmoothMap poly = SmoothMap::from_strings("poly", cigar_chart(), euclidean(1), {"x^3*y + y^2"});
    CHECK(tension(poly, pt(0.3, 0.7)).value[0] == doctest::Approx(5.1508).epsilon(1e-13));
    CHECK(bitension(poly, pt(0.3, 0.7)).value[0] == doctest::Approx(36.5296).epsilon(1e-12));
}

TEST_CASE("property: jet and finite-difference paths agree")
{
    for (const SmoothMap& phi : test_maps()) {
        INFO(phi.name());
        for (const Point& p : sample(phi, 10, 5)) {
            const auto t = tension(phi, p).value;
            const auto tf = tension(phi, p, DerivSource::FiniteDifference).value;
            CHECK((t - tf).cwiseAbs().maxCoeff() < 1e-5);
            const auto b = bitension(phi, p).value;
            const auto bf = bitension(phi, p, DerivSource::FiniteDifference).value;
            CHECK((b - bf).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("property: pointwise inequalities")
{
    for (const SmoothMap& phi : test_maps()) {
        INFO(phi.name());
        for (const Point& p : sample(phi, 30, 13)) {
            MapPointReport r = analyze_point(phi, p);
            CHECK(r.tension_norm_sq <= phi.m() * r.hessian_norm_sq * (1 + 1e-12) + 1e-14);
            if (!r.kato.zero_differential) CHECK(r.kato.value >= -1e-10);
            if (r.tension.norm() <= 1e-9) CHECK(r.bitension_norm <= 1e-6);
        }
    }
}

TEST_CASE("Kato gap")
{
    KatoGap id = kato_gap(linear_map(euclidean(2), Eigen::Matrix2d::Identity()), pt(0.3, 0.4));
    CHECK(!id.zero_differential);
    CHECK(std::abs(id.value) < 1e-14);
    CHECK(kato_gap(quadratic_map(euclidean(2)), pt(0.5, 0.1)).value >= 0.0);
    CHECK(kato_gap(stereographic_identity(euclidean(2)), pt(1, 0)).value >= 0.0);
    KatoGap z = kato_gap(quadratic_map(euclidean(2)), pt(0, 0));
    CHECK(z.zero_differential);
}

TEST_CASE("Bochner formula")
{
    Eigen::MatrixXd A(2, 3);
    A << 1, 2, 0, 0, -1, 3;
    Point q(3);
    q << 0.2, 0.4, -0.6;
    CHECK(bochner_residual(linear_map(euclidean(3), A), q) == 0.0);
    for (const Point& p : random_ball(2, 2.0, 20, 19)) {
        CHECK(std::abs(bochner_residual(stereographic_identity(euclidean(2)), p)) <= 1e-5);
        CHECK(std::abs(bochner_residual(stereographic_identity(cigar_chart()), p)) <= 1e-5);
    }
    BochnerTerms t = bochner(stereographic_identity(cigar_chart()), pt(0.5, 0.5));
    CHECK(t.ricci_term > 0.0);
    CHECK(t.target_term > 0.0);
    CHECK_THROWS_AS(bochner(quadratic_map(euclidean(2)), pt(1, 0)), NotHarmonicAtPoint);
}

TEST_CASE("maps out of the cigar have Ric(dphi, dphi) >= 0")
{
    for (const SmoothMap& phi : {stereographic_identity(cigar_chart()), quadratic_map(cigar_chart())})
        for (const Point& p : random_ball(2, 3.0, 20, 23)) {
            MapJets mj = map_jets(phi, p, 3);
            const Eigen::MatrixXd ric = values(ricci(riemann(mj.source)));
            const Eigen::MatrixXd ginv = values(mj.source.ginv);
            const Eigen::MatrixXd d = values(mj.dphi);
            CHECK((ginv * d.transpose() * values(mj.h) * d * ginv).cwiseProduct(ric).sum() >= 0.0);
        }
}

TEST_CASE("images outside the target chart")
{
    SmoothMap far = SmoothMap::from_strings("far", euclidean(2), round_sphere_chart(), {"1e19", "y"});
    CHECK_THROWS_AS(tension(far, pt(0, 0)), ImageOutsideTargetDomain);
}
