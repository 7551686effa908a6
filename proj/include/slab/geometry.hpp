#pragma once

// Coordinate-frame Riemannian geometry of a single chart.
//
// Conventions:
//   Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R(d_c, d_d) d_b = R^a_bcd d_a
//   R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
//   Ric_bd = R^c_bcd,  Scal = g^bd Ric_bd
// With these signs the unit round sphere has Scal = 2 and the Laplacian is
// the analyst's one (d^2/dx^2 on the line).

#include "slab/expr.hpp"
#include "slab/jet.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace slab {

enum class Variance { Covariant, Contravariant };

struct SymTensor2Value {
    Eigen::MatrixXd value;
    Variance variance = Variance::Covariant;
};

/// Where derivatives of expressions come from.
enum class DerivSource { Exact, FiniteDifference };

class Chart {
public:
    Chart() = default;
    /// `metric` lists the upper triangle row by row: g11, g12, ..., g1m, g22, ...
    Chart(std::string name, int dim, std::vector<Expr> metric, Expr domain, bool radial = false);

    static Chart from_strings(std::string name, int dim, const std::vector<std::string>& metric,
                              const std::string& domain = "1", bool radial = false);
    /// Metric factor * delta_ij.
    static Chart conformal(std::string name, int dim, const std::string& factor, const std::string& domain = "1",
                           bool radial = false);

    const std::string& name() const noexcept { return name_; }
    int dim() const noexcept { return dim_; }
    bool radial() const noexcept { return radial_; }
    const Expr& domain() const noexcept { return domain_; }
    const Expr& metric(int i, int j) const;

    /// True if the domain predicate is positive at p.
    bool contains(const Point& p) const;
    /// Throws OutsideDomain unless contains(p).
    void require(const Point& p) const;

private:
    std::string name_;
    int dim_ = 0;
    std::vector<Expr> metric_;
    Expr domain_;
    bool radial_ = false;
};

/// Metric, inverse metric and Christoffel symbols as jets around a point.
/// g and ginv carry `order`, gamma carries order - 1.
struct LocalGeometry {
    int dim = 0;
    int order = 0;
    JetMatrix g;
    JetMatrix ginv;
    std::vector<JetMatrix> gamma; // gamma[k](i, j) = Gamma^k_ij

    const Jet& christoffel(int k, int i, int j) const { return gamma[k](i, j); }
};

/// Riemann tensor R^a_bcd stored flat at ((a*m + b)*m + c)*m + d.
class Riemann {
public:
    Riemann() = default;
    explicit Riemann(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim) {}

    int dim() const noexcept { return dim_; }
    Jet& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
    const Jet& operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

private:
    std::size_t index(int a, int b, int c, int d) const
    {
        return ((static_cast<std::size_t>(a) * dim_ + b) * dim_ + c) * dim_ + d;
    }
    int dim_ = 0;
    std::vector<Jet> data_;
};

struct CurvatureBundle {
    int dim = 0;
    std::vector<double> riemann; // same flat layout as Riemann
    SymTensor2Value ricci;
    double scal = 0.0;

    double R(int a, int b, int c, int d) const
    {
        return riemann[((static_cast<std::size_t>(a) * dim + b) * dim + c) * dim + d];
    }
};

/// Jets of the metric components at p (checked: domain, SPD).
JetMatrix metric_jets(const Chart& c, const Point& p, int order, DerivSource src = DerivSource::Exact);

/// Inverse of a matrix of jets by a Neumann series around the value.
JetMatrix inverse(const JetMatrix& g);

LocalGeometry local_geometry(const Chart& c, const Point& p, int order, DerivSource src = DerivSource::Exact);
/// Local geometry from precomputed metric jets (order >= 1).
LocalGeometry local_geometry(JetMatrix g);

/// Riemann jets of order geo.order - 2.
Riemann riemann(const LocalGeometry& geo);
/// Ric_bd = R^c_bcd.
JetMatrix ricci(const Riemann& rm);
Jet scalar_curvature(const JetMatrix& ginv, const JetMatrix& ric);

SymTensor2Value metric_at(const Chart& c, const Point& p);
SymTensor2Value inverse_metric_at(const Chart& c, const Point& p);
/// gamma[k](i, j) = Gamma^k_ij at p.
std::vector<Eigen::MatrixXd> christoffel(const Chart& c, const Point& p, DerivSource src = DerivSource::Exact);
CurvatureBundle curvature(const Chart& c, const Point& p, DerivSource src = DerivSource::Exact);

/// (nabla^2 f)_ij = d_i d_j f - Gamma^k_ij d_k f, as jets of order min(f.order - 2, geo.order - 1).
JetMatrix hessian(const Jet& f, const LocalGeometry& geo);
SymTensor2Value hessian(const Expr& f, const Chart& c, const Point& p, DerivSource src = DerivSource::Exact);
double laplacian(const Expr& f, const Chart& c, const Point& p, DerivSource src = DerivSource::Exact);
double gradient_norm_sq(const Expr& f, const Chart& c, const Point& p, DerivSource src = DerivSource::Exact);

/// (div T)_i = g^jk (d_j T_ki - Gamma^l_jk T_li - Gamma^l_ji T_kl) for a covariant
/// symmetric tensor given as jets (order >= 1). Result has order T.order - 1.
JetVector div_sym2(const JetMatrix& T, const LocalGeometry& geo);

using SymTensor2Field = std::function<Eigen::MatrixXd(const Point&)>;

/// Divergence of a numeric tensor field, differentiated by finite differences.
Eigen::VectorXd div_sym2(const SymTensor2Field& T, const Chart& c, const Point& p, double step = 1e-3);

} // namespace slab
