#pragma once

// Finite-difference oracle. Mixed partials come from tensor products of
// central stencils; one Richardson level combines steps h and 2h, which
// cancels the h^2 error term of the symmetric stencils.

#include "slab/expr.hpp"
#include "slab/jet.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace slab {

inline constexpr double kDefaultFdStep = 1e-3;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::VectorXd(const Point&)>;

/// Jet of a scalar function estimated by finite differences (order 1..4).
Jet fd_jet(const ScalarField& f, const Point& p, int order, double step = kDefaultFdStep);

/// Componentwise finite-difference jets of a vector-valued function.
std::vector<Jet> fd_jets(const VectorField& f, const Point& p, int order, double step = kDefaultFdStep);

/// Finite-difference counterpart of eval_jet.
Jet fd_partials(const Expr& e, const Point& p, int order, double step = kDefaultFdStep);

} // namespace slab
