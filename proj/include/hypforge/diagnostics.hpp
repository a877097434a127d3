#pragma once

#include "hypforge/field.hpp"
#include "hypforge/fitting.hpp"
#include "hypforge/geometry.hpp"
#include "hypforge/metric.hpp"

namespace hypforge {

struct diagnostics_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weighted sup-norm spec: max over nodes of rho^-delta times the pointwise
// norm of the field and its first k covariant derivatives, measured with the
// metric of the requested frame. Tensor weights follow |u|_g = rho^r |u|_gbar
// with r = covariant minus contravariant rank.
struct WeightedNormSpec {
    int k = 0;          // 0, 1 or 2
    double delta = 0;
    Frame frame = Frame::physical;
};

double weighted_norm(const RadialMetric& m, const RadialField& f, const WeightedNormSpec& spec);
double weighted_norm(const RadialMetric& m, const RadialVector& W, const WeightedNormSpec& spec);
double weighted_norm(const RadialMetric& m, const RadialTT& S, const WeightedNormSpec& spec);

// Rotationally symmetric symmetric 2-tensor T = f1 drho x drho + f2 ghat,
// the general (non-TT) shape needed for metric and extrinsic-curvature
// differences.
struct RadialSym2 {
    RadialField f1, f2;
};

// |T|_g and the C^1 seminorm profile |nabla T|_g with respect to m (physical
// frame profiles are used; the center zone is extrapolated for closing
// metrics).
std::vector<double> sym2_norm_profile(const RadialMetric& m, const RadialSym2& T);
std::vector<double> sym2_grad_norm_profile(const RadialMetric& m, const RadialSym2& T);

// g1 - g2 as a RadialSym2 in the physical frame (compactified profiles in).
RadialSym2 metric_difference(const RadialMetric& g1, const RadialMetric& g2);

// K = Sigma - g for physical data (profiles of the tensor K as RadialSym2).
RadialSym2 extrinsic_curvature(const RadialMetric& g_phys, const RadialTT& Sigma);

// C^0 / discrete-C^1 norms of differences used by the convergence studies.
double diff_norm_c0(const RadialMetric& ref, const RadialSym2& T);
double diff_norm_c1(const RadialMetric& ref, const RadialSym2& T);

// Boundary shear residual: the profile |Sbar - H_gbar(rho)|_gbar, its
// extrapolated value at rho = 0, and the trace-free-Hessian form
// [Hess rho - (1/3)(Lap rho) gbar - Sbar] residual extrapolated to rho = 0.
struct ShearResidual {
    std::vector<double> profile;
    double boundary_value = 0;
    double hessian_form_boundary_value = 0;
};
ShearResidual shear_residual(const RadialMetric& gbar, const RadialTT& Sigma_bar);

} // namespace hypforge
