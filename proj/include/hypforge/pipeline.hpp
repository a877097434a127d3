#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypforge/diagnostics.hpp"
#include "hypforge/elliptic.hpp"
#include "hypforge/freedata.hpp"
#include "hypforge/geometry.hpp"

namespace hypforge {

struct pipeline_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Seed free data on the grid. Two built-in families:
//  - "hyperbolic": the Euclidean compactification of hyperbolic space with
//    mu = 0; the family uses the metric itself as background.
//  - "generic": a smoothly closing AH metric with tuned boundary jets
//    (alpha controls the linear jet of the compactification; the second
//    radial jet is matched so the product background reproduces the
//    boundary curvature coefficient) together with a trace-free source
//    concentrated at scale spike_width near the boundary, whose boundary
//    amplitude spike_s0 makes the assembled data violate the shear-free
//    condition by a prescribed amount.
struct InputDataSpec {
    std::string name = "generic";
    std::size_t n = 2048;
    double alpha = 0.3;        // boundary jet of the generic seed
    double spike_s0 = 0.012;   // boundary amplitude of Sigma-bar
    double spike_width = 0.024;
    bool project_momentum = false; // momentum-project the seed source
};

struct InputData {
    RadialMetric gbar;       // compactified physical metric (with jets)
    RadialTT Sigma;          // physical frame
    RadialField phi_seed;    // conformal factor used by the generator
    RadialMetric lambda_seed;
    SolveReport lich_report;
    double hamiltonian_residual = 0;
    double momentum_residual = 0;  // sup of |Div Sigma|_g
    double boundary_shear = 0;     // extrapolated |Sbar - H|(0)
    bool exact_background = false; // family should reuse gbar as background
};

// Seed metric of the generic family (rho_c = 2): a = 1 + (alpha/4) rho (4-rho),
// b = (1+alpha) s p(s^2), s = 2 - rho, with p cubic in s^2 fixed by
//   p(0) ... normalization, b(0) = 1, b'(0) = -alpha b(0),
//   b''(0) = alpha (1+4 alpha)/4 * b(0)
// (the last condition matches the rho^2 coefficient of R[g]+6 to the product
// background's, which keeps ||phi_eps - 1|| ~ eps across the family).
RadialMetric generic_seed_metric(const RadialGrid& g, double alpha);

// Solve the conformal method on the seed and assemble (g, K).
InputData generate_input(const InputDataSpec& spec, const EllipticConfig& cfg = {});

struct EpsOutput {
    double eps = 0;
    bool ok = false;
    std::string error;
    RadialMetric lambda;
    RadialTT mu;              // physical lambda frame
    RadialVector W;
    RadialTT sigma;           // physical lambda frame
    RadialField phi;
    RadialMetric gbar_out;    // compactified output metric
    RadialTT Sigma_out;       // physical frame
    SolveReport momentum_report, lich_report;
    // diagnostics
    double norm_g_diff = 0, norm_K_diff = 0;
    double norm_g_diff_c1 = 0, norm_K_diff_c1 = 0;
    double shear_boundary = 0;
    double ham_residual = 0, mom_residual = 0;
    double log_coeff_W = 0, log_coeff_phi = 0;
    int picard_iters = 0;
};

struct ApproximationRun {
    InputData input;
    RadialMetric background;
    std::vector<EpsOutput> outputs;   // one per eps, order of eps_list
};

// Full per-eps pipeline: build_family -> solve_momentum -> sigma ->
// solve_lichnerowicz -> conformal_assemble, with per-eps failures recorded
// rather than aborting the run. Parallel over eps (HYPFORGE_THREADS caps).
ApproximationRun approximate(const InputData& input, const std::vector<double>& eps_list,
                             const EllipticConfig& cfg = {});

struct AuditEntry {
    std::string label;
    std::vector<FitExponent> exponents;
    std::vector<double> coefficients;
    double leading = 0, log_rel = 0, fit_residual = 0, condition = 0;
    bool flagged = false;   // log content above threshold
    std::string error;
};

// Expansion audit of W_eps and phi_eps - 1 for each output, plus the input's
// conformal factor; fits run over [rho_1, min(0.8 eps, 0.02 rho_c/2)].
std::vector<AuditEntry> smoothness_audit(const ApproximationRun& run,
                                         double log_flag_threshold = 1e-3);

} // namespace hypforge
