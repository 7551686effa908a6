#pragma once

// Smooth maps phi: (M, g) -> (N, h) between charts and the quantities of
// harmonic and biharmonic map theory, all evaluated in coordinates:
//
//   (nabla-bar d phi)^a_ij = d_i d_j phi^a - Gamma(M)^k_ij d_k phi^a + Gamma(N)^a_bc(phi) d_i phi^b d_j phi^c
//   tau^a  = g^ij (nabla-bar d phi)^a_ij
//   (nabla-bar_i tau)^a = d_i tau^a + Gamma(N)^a_bc d_i phi^b tau^c
//   tau2   = Delta-bar tau + g^ij R(N)^a_bcd tau^c d_i phi^d d_j phi^b
//
// with the curvature convention of geometry.hpp and the analyst's sign for
// the rough Laplacian.

#include "slab/geometry.hpp"

#include <string>
#include <vector>

namespace slab {

class SmoothMap {
public:
    SmoothMap() = default;
    SmoothMap(std::string name, Chart source, Chart target, std::vector<Expr> components);
    static SmoothMap from_strings(std::string name, Chart source, Chart target,
                                  const std::vector<std::string>& components);

    const std::string& name() const noexcept { return name_; }
    const Chart& source() const noexcept { return source_; }
    const Chart& target() const noexcept { return target_; }
    int m() const noexcept { return source_.dim(); }
    int n() const noexcept { return target_.dim(); }
    const Expr& component(int a) const { return components_[a]; }

    /// phi(p); throws ImageOutsideTargetDomain if the image leaves the target chart.
    Point image(const Point& p) const;
    /// Component jets of phi at p.
    std::vector<Jet> jets(const Point& p, int order, DerivSource src = DerivSource::Exact) const;

private:
    std::string name_;
    Chart source_, target_;
    std::vector<Expr> components_;
};

/// A value of a section of phi*TN over a source point, in target coordinates.
struct PullbackField {
    Point base;
    Eigen::VectorXd value;
};

/// Everything needed at a point to assemble the map quantities, as jets in
/// the source variables. With phi of order K: metric g of order K - 1,
/// h(phi) of order K - 1, Christoffel symbols of both of order K - 2.
struct MapJets {
    int order = 0;
    int m = 0;
    int n = 0;
    Point base;
    Point image;
    LocalGeometry source;
    std::vector<Jet> phi;
    JetMatrix h;                    // h_ab(phi)
    std::vector<JetMatrix> gamma_n; // Gamma(N)^a_bc(phi)
    JetMatrix dphi;                 // dphi(a, i) = d_i phi^a, order K - 1
};

MapJets map_jets(const SmoothMap& phi, const Point& p, int order, DerivSource src = DerivSource::Exact);

/// (nabla-bar d phi)^a_ij as sff[a](i, j), order K - 2.
std::vector<JetMatrix> second_fundamental_form(const MapJets& mj);
/// tau^a from the second fundamental form, order K - 2.
JetVector tension(const MapJets& mj, const std::vector<JetMatrix>& sff);
/// cov(a, i) = (nabla-bar_i V)^a for a section V (jets), order V.order - 1.
JetMatrix pullback_derivative(const MapJets& mj, const JetVector& v);
/// Delta-bar V for a section V with jets of order >= 2.
JetVector rough_laplacian(const MapJets& mj, const JetVector& v);
/// g^ij R(N)^a_bcd V^c d_i phi^d d_j phi^b, with R(N) taken at the image point.
Eigen::VectorXd curvature_term(const MapJets& mj, const CurvatureBundle& target_curvature, const Eigen::VectorXd& v);

/// Source-side contractions.
double energy_density(const MapJets& mj);
double hessian_norm_sq(const MapJets& mj, const std::vector<JetMatrix>& sff);
double pullback_norm_sq(const MapJets& mj, const Eigen::VectorXd& v);

// Point operations.
Eigen::MatrixXd differential(const SmoothMap& phi, const Point& p);
double energy_density(const SmoothMap& phi, const Point& p);
/// sff[a](i, j).
std::vector<Eigen::MatrixXd> second_fund_form(const SmoothMap& phi, const Point& p,
                                              DerivSource src = DerivSource::Exact);
PullbackField tension(const SmoothMap& phi, const Point& p, DerivSource src = DerivSource::Exact);
/// Exact: jets of phi to order 4. FiniteDifference: finite differences of the
/// pointwise tension field.
PullbackField rough_laplacian_tension(const SmoothMap& phi, const Point& p, DerivSource src = DerivSource::Exact);
PullbackField curvature_term(const SmoothMap& phi, const Point& p);
PullbackField bitension(const SmoothMap& phi, const Point& p, DerivSource src = DerivSource::Exact);

struct KatoGap {
    double value = 0.0;             // |nabla-bar d phi|^2 - |grad |d phi||^2
    bool zero_differential = false; // |d phi| = 0 at the point: gradient of the norm undefined
};
KatoGap kato_gap(const SmoothMap& phi, const Point& p);

struct BochnerTerms {
    double laplacian_half_energy = 0.0; // Delta (|d phi|^2 / 2)
    double hessian_norm_sq = 0.0;       // |nabla-bar d phi|^2
    double ricci_term = 0.0;            // <d phi(Ric e_i), d phi(e_i)>
    double target_term = 0.0;           // <R(N)(d phi e_i, d phi e_j) d phi e_j, d phi e_i>
    double residual = 0.0;
};
/// Bochner formula for harmonic maps; throws NotHarmonicAtPoint if |tau| > tol.
BochnerTerms bochner(const SmoothMap& phi, const Point& p, double harmonic_tol = 1e-8);
double bochner_residual(const SmoothMap& phi, const Point& p, double harmonic_tol = 1e-8);

struct MapPointReport {
    Point point;
    double energy_density = 0.0;     // |d phi|^2
    double hessian_norm_sq = 0.0;    // |nabla-bar d phi|^2
    Eigen::VectorXd tension;
    double tension_norm_sq = 0.0;    // |tau|^2, the bienergy density
    Eigen::VectorXd bitension;
    double bitension_norm = 0.0;
    KatoGap kato;
    double full_hessian_density = 0.0; // |nabla-bar d phi|^2 + |d phi|^2
};
MapPointReport analyze_point(const SmoothMap& phi, const Point& p);

// Test maps.
SmoothMap constant_map(const Chart& source, const Chart& target, const Point& value);
/// x -> A x into Euclidean R^n, n = A.rows().
SmoothMap linear_map(const Chart& source, const Eigen::MatrixXd& A);
/// x -> |x|^2 into R.
SmoothMap quadratic_map(const Chart& source);
/// x -> x^4 on R.
SmoothMap quartic_map();
/// x -> x_k into R.
SmoothMap coordinate_map(const Chart& source, int k);
/// Coordinate identity into the stereographic sphere chart (source of dimension 2).
SmoothMap stereographic_identity(const Chart& source);

} // namespace slab
