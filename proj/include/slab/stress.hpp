#pragma once

// Stress-energy tensors of the energy and the bienergy:
//
//   S1_ij = 1/2 |d phi|^2 g_ij - <d_i phi, d_j phi>
//   S2_ij = (1/2 |tau|^2 + <d phi, nabla-bar tau>) g_ij - <d_i phi, nabla-bar_j tau> - <d_j phi, nabla-bar_i tau>
//
// where <d phi, nabla-bar tau> = g^ij h_ab d_i phi^a (nabla-bar_j tau)^b. They satisfy
// div S1 = -<tau, d phi> and div S2 = -<tau2, d phi> for every smooth map.

#include "slab/maps.hpp"

namespace slab {

enum class StressKind { S1, S2 };

struct StressValue {
    SymTensor2Value value;
    StressKind kind = StressKind::S1;
};

StressValue s1_at(const SmoothMap& phi, const Point& p);
StressValue s2_at(const SmoothMap& phi, const Point& p);

/// S1 from precomputed jets (order >= 1).
Eigen::MatrixXd s1_from(const MapJets& mj);
/// S2 from precomputed jets (order >= 3).
Eigen::MatrixXd s2_from(const MapJets& mj);

struct S2Trace {
    double componentwise = 0.0; // g^ij S2_ij
    double formula = 0.0;       // m (1/2 |tau|^2 + <d phi, nabla-bar tau>) - 2 <d phi, nabla-bar tau>
};
S2Trace s2_trace(const SmoothMap& phi, const Point& p);

/// div S1 + <tau, d phi>, with the divergence taken by finite differences of the S1 field.
Eigen::VectorXd div_s1_residual(const SmoothMap& phi, const Point& p, double step = 1e-3);
/// div S2 + <tau2, d phi>, likewise.
Eigen::VectorXd div_s2_residual(const SmoothMap& phi, const Point& p, double step = 1e-3);

} // namespace slab
