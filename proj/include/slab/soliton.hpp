#pragma once

// Gradient Ricci solitons  Ric + nabla^2 f = lambda g  and gradient Yamabe
// solitons  nabla^2 F = (Scal - rho) g, their residuals, the identities they
// imply, and the built-in examples.

#include "slab/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace slab {

enum class SolitonType { Steady, Shrinking, Expanding };

SolitonType classify(double constant);
const char* to_string(SolitonType t);

struct RicciSolitonData {
    std::string name;
    Chart chart;
    Expr f;
    double lambda = 0.0;

    SolitonType type() const { return classify(lambda); }
};

struct YamabeSolitonData {
    std::string name;
    Chart chart;
    Expr F;
    double rho = 0.0;

    SolitonType type() const { return classify(rho); }
};

struct SolitonReport {
    std::string sample_set;
    std::size_t samples = 0;
    double residual_sup = 0.0;      // Frobenius norm of Ric + nabla^2 f - lambda g
    double constant_mean = 0.0;     // Scal + |grad f|^2 - 2 lambda f
    double constant_stddev = 0.0;
    double grad_f_sq_sup = 0.0;
    double scal_inf = 0.0;
    double ricci_eigen_sup = 0.0;
    double trace_identity_sup = 0.0;
    double identity_a_sup = 0.0;
};

SymTensor2Value ricci_residual(const RicciSolitonData& s, const Point& p, DerivSource src = DerivSource::Exact);
/// Delta f - (m lambda - Scal).
double trace_identity_residual(const RicciSolitonData& s, const Point& p);
/// Scal + |grad f|^2 - 2 lambda f.
double soliton_constant(const RicciSolitonData& s, const Point& p);
/// grad Scal - 2 Ric(grad f, .).
Eigen::VectorXd identity_a_residual(const RicciSolitonData& s, const Point& p);

/// Statistics of the soliton quantities over a sample set.
SolitonReport soliton_report(const RicciSolitonData& s, const std::vector<Point>& samples,
                             const std::string& description, DerivSource src = DerivSource::Exact);
/// Same report, restricted to steady solitons (throws NotSteady otherwise).
SolitonReport steady_bounds(const RicciSolitonData& s, const std::vector<Point>& samples,
                            const std::string& description);

/// nabla^2 F - (Scal - rho) g.
SymTensor2Value yamabe_residual(const YamabeSolitonData& y, const Point& p);
/// nabla^2 F - phi g.
SymTensor2Value concircular_residual(const Expr& F, const Expr& phi, const Chart& c, const Point& p);

// Built-in charts and solitons.
Chart euclidean(int m);
Chart cigar_chart();
/// Unit round sphere in the stereographic chart 4 (du^2 + dv^2) / (1 + u^2 + v^2)^2.
Chart round_sphere_chart();
RicciSolitonData cigar();
RicciSolitonData gaussian(int m, double lambda = 1.0);
/// Flat R^m with constant potential (a trivial steady soliton).
RicciSolitonData flat(int m);
/// Euclidean R^m with F = |x|^2 / 2, rho = -1.
YamabeSolitonData euclidean_yamabe(int m);

// Sample sets.
/// Points r_i (cos t_j, sin t_j) with r_i = rmax (i + 1) / nr, t_j = 2 pi j / nt; dimension 2.
std::vector<Point> polar_grid(double rmax, int nr = 32, int nt = 16);
/// Uniform points in the coordinate ball of radius rmax.
std::vector<Point> random_ball(int m, double rmax, std::size_t count, std::uint64_t seed);

} // namespace slab
