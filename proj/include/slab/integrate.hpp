#pragma once

// Quadrature over a chart, cutoff functions on geodesic balls, energies, the
// cutoff integral identities for harmonic and biharmonic maps on gradient
// Ricci solitons, and term-by-term evaluation of the associated inequalities.
//
// All integrals are over coordinate balls centred at the origin, written in
// polar form x = r w: radial Gauss-Legendre panels times a product rule on the
// unit sphere, with the Riemannian volume element sqrt(det g) applied by the
// integrator.

#include "slab/maps.hpp"
#include "slab/soliton.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slab {

/// Geodesic distance from the origin for radially symmetric charts:
/// rho(r) = int_0^r sqrt(g_11(s e_1)) ds, tabulated once and refined by
/// 16-point Gauss-Legendre inside each table interval.
class RadialDistance {
public:
    explicit RadialDistance(const Chart& c, double rlimit = 1e16);

    double rho(double r) const;
    /// Coordinate radius with rho(r) = value (bisection).
    double inverse(double value) const;
    /// Jet of rho(|x|) in the chart variables, for x != 0.
    Jet rho_jet(const Point& x, int order) const;

private:
    double speed(double r) const;
    double integrate(double a, double b) const;

    Chart chart_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
};

double geodesic_radius(const Chart& c, const Point& p);

/// eta = 1 - S((rho - R) / R) with the quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3,
/// so eta = 1 on B_R, 0 outside B_2R and eta is C^2.
class CutoffProfile {
public:
    /// max |S'| = 15/8.
    static constexpr double kC1 = 15.0 / 8.0;
    /// max |S''| = 10/sqrt(3).
    static constexpr double kC2 = 5.773502691896257;

    /// Geodesic balls about the origin when the chart is radial and the centre
    /// is the origin; otherwise coordinate balls about `center` (see geodesic()).
    CutoffProfile(const Chart& c, double R, std::optional<Point> center = std::nullopt);

    double R() const noexcept { return R_; }
    bool geodesic() const noexcept { return geodesic_; }
    const Point& center() const noexcept { return center_; }
    /// Coordinate radii of the spheres rho = R and rho = 2R (for quadrature breakpoints).
    double inner_coordinate_radius() const noexcept { return r_inner_; }
    double outer_coordinate_radius() const noexcept { return r_outer_; }

    static double profile(double t);
    static double profile_derivative(double t);
    static double profile_second_derivative(double t);

    double eta(const Point& p) const;
    /// R < distance < 2R, where grad eta may be nonzero.
    bool transition(const Point& p) const;
    /// Jet of eta (order <= 4) in the chart variables.
    Jet eta_jet(const Point& p, int order) const;
    /// Distance used by the profile.
    double distance(const Point& p) const;

private:
    Chart chart_;
    double R_;
    Point center_;
    bool geodesic_ = false;
    std::optional<RadialDistance> radial_;
    double r_inner_ = 0.0;
    double r_outer_ = 0.0;
};

enum class QuadratureRule { Polar, TensorGauss };

struct QuadratureConfig {
    QuadratureRule rule = QuadratureRule::Polar;
    int order = 8;          // Gauss-Legendre points per radial panel
    int angular = 8;        // base angular resolution
    int subdivision = 0;    // initial refinement level
    double rmin = 0.0;      // inner coordinate radius (annuli)
    double rmax = 10.0;     // outer coordinate radius
    double rel_tol = 1e-8;  // relative tolerance target
    double abs_tol = 1e-13; // absolute floor of the tolerance target
    bool tail = false;      // estimate the contribution beyond rmax
    std::size_t max_cells = 20'000'000;
    int max_levels = 4;     // refinement levels beyond the first comparison
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
    std::size_t cells = 0; // integrand evaluations
    double tail = 0.0;     // estimated contribution beyond rmax (included in value)
    std::string warning;
};

/// Integrand values at a point (before the volume element).
using Integrand = std::function<Eigen::VectorXd(const Point&)>;

/// Componentwise integrals of a vector-valued integrand over rmin <= r <= rmax
/// (TensorGauss: the cube [-rmax, rmax]^m), with extra radial breakpoints where
/// the integrand is not smooth. The reported value is the finer of the last two
/// refinement levels and the error their difference, plus the tail uncertainty.
/// With cfg.tail the three outermost dyadic shells feed a ratio test: a shell
/// ratio >= 0.9 marks the integral divergent, otherwise the geometric tail is added.
std::vector<IntegralResult> integrate_vector(const Integrand& f, const Chart& c, const QuadratureConfig& cfg,
                                             const std::vector<double>& breakpoints = {});
IntegralResult integrate_scalar(const std::function<double(const Point&)>& f, const Chart& c,
                                const QuadratureConfig& cfg, const std::vector<double>& breakpoints = {});

IntegralResult energy(const SmoothMap& phi, const QuadratureConfig& cfg);
IntegralResult bienergy(const SmoothMap& phi, const QuadratureConfig& cfg);
IntegralResult full_hessian_energy(const SmoothMap& phi, const QuadratureConfig& cfg);

struct NamedIntegral {
    std::string name;
    IntegralResult result;
};

struct IdentityReport {
    std::vector<NamedIntegral> lhs;
    std::vector<NamedIntegral> rhs;
    double residual = 0.0;          // sum(lhs) - sum(rhs)
    double scale = 0.0;             // sum of |term|
    double relative = 0.0;          // |residual| / scale, 0 when every term vanishes
    double quadrature_error = 0.0;  // accumulated error estimates
    double precondition_sup = 0.0;  // sampled sup |tau| or |tau2| on the support
    bool geodesic_cutoff = true;
};

/// 0 = 1/2 int eta^2 |dphi|^2 Delta f - int eta^2 nabla^2 f(dphi, dphi) + int S1(grad eta^2, grad f).
/// Throws NotHarmonicOnSupport when sampled |tau| exceeds `precondition_tol`.
IdentityReport harmonic_identity(const SmoothMap& phi, const RicciSolitonData& s, double R,
                                 const QuadratureConfig& cfg, double precondition_tol = 1e-6);
double harmonic_identity_residual(const SmoothMap& phi, const RicciSolitonData& s, double R,
                                  const QuadratureConfig& cfg);

/// int eta^2 (lambda(m-4) - Scal)|tau|^2 + 4 int eta^2 Ric^ij <nabla-bar d phi_ij, tau>
///  = -4 int (grad eta^2)_k Ric^ki <d_i phi, tau> + 4 lambda int <dphi(grad eta^2), tau>
///    - int <grad eta^2, grad f> |tau|^2 + 2 int Delta eta^2 <dphi(grad f), tau>
///    + 4 int <nabla-bar d phi(grad eta^2, grad f), tau>
/// Throws NotBiharmonicOnSupport when sampled |tau2| exceeds `precondition_tol`.
IdentityReport biharmonic_identity(const SmoothMap& phi, const RicciSolitonData& s, double R,
                                   const QuadratureConfig& cfg, double precondition_tol = 1e-6);
double biharmonic_identity_residual(const SmoothMap& phi, const RicciSolitonData& s, double R,
                                    const QuadratureConfig& cfg);

struct Diagnostic {
    std::string name;
    double value = 0.0;
    std::string note;
};

struct InequalityReport {
    std::string kind;
    std::vector<NamedIntegral> terms;
    IntegralResult total;
    std::vector<Diagnostic> diagnostics;
    bool finite_energy = true;
    bool degenerate = false; // the inequality carries no information for this dimension
    std::string verdict;
};

/// A = int (lambda(m-2) - Scal)|dphi|^2, B = 2 int Ric(dphi, dphi).
InequalityReport harmonic_inequality_terms(const SmoothMap& phi, const RicciSolitonData& s,
                                           const QuadratureConfig& cfg);
/// A = int (lambda(m-4) - Scal)|tau|^2, B = 4 int Ric^ij <nabla-bar d phi_ij, tau>.
InequalityReport biharmonic_inequality_terms(const SmoothMap& phi, const RicciSolitonData& s,
                                             const QuadratureConfig& cfg);

enum class YamabeKind { Harmonic, Biharmonic };
/// (m-2) int (Scal - rho)|dphi|^2, resp. (m-4) int (Scal - rho)|tau|^2.
InequalityReport yamabe_inequality_terms(const SmoothMap& phi, const YamabeSolitonData& y, YamabeKind kind,
                                         const QuadratureConfig& cfg);

/// Pointwise densities of the biharmonic inequality and Scal |tau|^2.
struct BiharmonicDensities {
    double a = 0.0;
    double b = 0.0;
    double scal_tau_sq = 0.0;
};
BiharmonicDensities biharmonic_densities(const SmoothMap& phi, const RicciSolitonData& s, const Point& p);

struct DecayRow {
    double R = 0.0;
    IntegralResult boundary;      // int S1(grad eta^2, grad f)
    IntegralResult bound;         // int |grad eta^2| |grad f| |dphi|^2
    IntegralResult annulus_energy; // energy on R <= rho <= 2R
    bool at_floor = false;        // |boundary| below the roundoff floor of the bound
};

struct DecayScan {
    std::vector<DecayRow> rows;
    double slope = 0.0;   // least-squares slope of log|boundary| against log R (NaN if undefined)
    bool slope_defined = false;
    bool finite_energy = true;
    bool hypothesis_violated = false;
    double grad_f_sq_sup = 0.0;
    std::string note;
};

DecayScan boundary_decay_scan(const SmoothMap& phi, const RicciSolitonData& s, const std::vector<double>& radii,
                              const QuadratureConfig& cfg);

struct BochnerRow {
    double R = 0.0;
    IntegralResult scal_term;    // 1/2 int eta^2 |dphi|^2 Scal
    IntegralResult gradient_term; // int eta^2 |grad |dphi||^2
    double lhs = 0.0;
    IntegralResult cutoff_term;  // int |grad eta|^2 |dphi|^2
    double bound = 0.0;          // (C1 / R)^2 * energy on the support of grad eta
};

struct BochnerScan {
    std::vector<BochnerRow> rows;
    std::string note;
};

BochnerScan steady_bochner_scan(const SmoothMap& phi, const RicciSolitonData& s, const std::vector<double>& radii,
                                const QuadratureConfig& cfg);

} // namespace slab
