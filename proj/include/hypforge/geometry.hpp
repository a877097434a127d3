#pragma once

#include <utility>

#include "hypforge/field.hpp"
#include "hypforge/metric.hpp"

namespace hypforge {

// Radial tensor calculus. All formulas are the radial reductions derived in
// docs/radial_reduction.md; u = 1/a^2 and v = b^2 denote the chart scalars of
// the compactified metric.

// Scalar curvature of the metric in the requested frame.
//   R[gbar] = 2/v - u'v'/v - 2uv''/v + uv'^2/(2v^2)
//   R[g]    = rho^2 R[gbar] + 4 rho Lap_gbar rho - 6u
RadialField scalar_curvature(const RadialMetric& m, Frame frame, FdOrder ord = FdOrder::two);

// Lap_gbar rho = u v'/v + u'/2
RadialField lap_rho_compactified(const RadialMetric& m, FdOrder ord = FdOrder::two);

// Conformal Killing operator on a radial vector: D_m W has TT profile
//   q(W) = (2/3) [ w' + (a'/a - b'/b) w ],
// identical in the compactified and physical frames.
RadialTT conformal_killing(const RadialMetric& m, const RadialVector& W, Frame frame,
                           FdOrder ord = FdOrder::two);

// Divergence of a radial TT tensor: (Div S)_rho = q' + 3 (b'/b)_frame q.
RadialOneForm divergence_tt(const RadialMetric& m, const RadialTT& S, FdOrder ord = FdOrder::two);

// Vector Laplacian L = D*D applied to W: (L W)^rho = -(1/a^2)[q(W)' + 3(b'/b)q(W)]
// in the physical frame of m.
RadialVector vector_laplacian_apply(const RadialMetric& m, const RadialVector& W,
                                    FdOrder ord = FdOrder::two);

// The conformally weighted trace-free Hessian H_gbar(scale*rho) and the scalar
// A_gbar(scale*rho). Both terms of the defining expression are evaluated and
// summed; in the radial reduction they cancel identically, so H vanishes up to
// rounding while A is generically nonzero.
struct ShearTensor {
    RadialTT H;        // compactified frame
    RadialField A;
    RadialField term_scale; // |term1| + |term2| nodewise, for relative comparisons
};
ShearTensor shear_tensor(const RadialMetric& m, double scale = 1.0, FdOrder ord = FdOrder::two);

// Hamiltonian and momentum residuals of physical CMC data (tau = -3):
//   Ham = R[g] - |Sigma|^2_g + 6,   Mom = Div_g Sigma  (rho component).
struct ConstraintResiduals {
    RadialField hamiltonian;
    RadialOneForm momentum;
    // |Mom|_g = (1/a_g)|Mom_rho| nodewise
    RadialField momentum_norm;
};
ConstraintResiduals constraint_residuals(const RadialMetric& g_phys, const RadialTT& Sigma,
                                         FdOrder ord = FdOrder::two);

// Boundary identity residual E = 4 rho Lap_gbar rho + (R[gbar] - |Sbar|^2) rho^2
// + 6 (tau^2/9 - |drho|^2); equals the Hamiltonian residual identically.
RadialField boundary_identity_residual(const RadialMetric& g_phys, const RadialTT& Sigma,
                                       double tau = -3.0, FdOrder ord = FdOrder::two);

// Conformal assembly g = phi^4 lambda, K = phi^-2 sigma - phi^4 lambda.
// Returns the physical metric and the TT part Sigma = K + g = phi^-2 sigma
// (profile in the g frame); tr_g K = -3 holds identically.
struct PhysicalData {
    RadialMetric g;
    RadialTT Sigma; // physical frame of g
};
PhysicalData conformal_assemble(const RadialMetric& lambda, const RadialField& phi,
                                const RadialTT& sigma_lambda_frame);

} // namespace hypforge
