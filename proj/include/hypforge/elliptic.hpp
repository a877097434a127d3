#pragma once

#include <functional>
#include <string>

#include "hypforge/field.hpp"
#include "hypforge/geometry.hpp"
#include "hypforge/metric.hpp"
#include "hypforge/tridiag.hpp"

namespace hypforge {

// Solve bookkeeping shared by the two boundary value problems.
struct SolveReport {
    double residual_sup = 0;          // algebraic residual of the discrete system
    double audit_residual_sup = 0;    // residual of the recomputable audit functional
    int iterations = 0;               // Picard corrections above tolerance
    int newton_iterations = 0;
    double contraction_factor = 0;    // max measured update ratio
    double fitted_decay_exponent = 0;
    double fitted_log_coefficient = 0; // relative to the leading coefficient
    double wall_time_s = 0;
    std::string method = "direct";
};

struct EllipticConfig {
    double picard_tol = 1e-12;
    int max_iter = 200;
    double divergence_guard = 0.5;    // ||u||_inf beyond this aborts Picard
    int newton_max = 25;
    double newton_tol = 1e-12;
    double momentum_decay_exponent = 2.0; // delta target, must lie in (-1, 3)
};

// Flux-form discretization of the physical scalar Laplacian
//   Lap_g f = (rho^3/(a b^2)) d/drho [ b^2/(rho a) f' ]
// on the nodes, with a Dirichlet ghost f(0) = 0 at the boundary end (decay
// imposition; callers solve for u = phi - 1 or supply inhomogeneous data
// through the right side) and an even reflection fold at the center.
// Returns the matrix of w_j * Lap (row weights w = a b^2 / rho^3) and the
// weight vector; w vanishes at a closing center node, where the row reduces
// to the reflected flux balance.
struct FluxLaplacian {
    Tridiag A;                 // rows: w * Lap
    std::vector<double> w;     // row weights
};
FluxLaplacian flux_laplacian(const RadialMetric& m);

// ------------------------------------------------------------------ momentum

// Staggered conservative discretization of the conformal momentum constraint
// Div_lambda(mu + D_lambda W) = 0 for the radial component of W, with the
// decay class imposed by a Dirichlet ghost w(0) = 0 and w(rho_c) = 0 at the
// inner end. TT profiles q are formed at half nodes from (w_j, w_{j+1}); the
// divergence row at node j differences them and the same staggering is
// applied to mu. Equivalent to L_lambda W = (Div_lambda mu)^sharp with the
// sign that annihilates Div sigma.
struct MomentumSystem {
    Tridiag A;
    std::vector<double> rhs;
};
MomentumSystem momentum_system(const RadialMetric& lambda, const RadialField& q_mu_bar);

struct MomentumSolution {
    RadialVector W;
    RadialTT sigma;            // mu + D W, physical lambda frame
    SolveReport report;
};
// q_mu_bar: profile of rho*mu in the compactified lambda frame.
MomentumSolution solve_momentum(const RadialMetric& lambda, const RadialField& q_mu_bar,
                                const EllipticConfig& cfg = {});

// ------------------------------------------------------------- Lichnerowicz

// N(phi) = Lap_lambda phi - (1/8) R[lambda] phi + (1/8)|sigma|^2 phi^-7 - (3/4) phi^5
RadialField lichnerowicz_residual(const RadialMetric& lambda, const RadialTT& sigma,
                                  const RadialField& phi, FdOrder ord = FdOrder::two);

// One application of the contraction map G: u -> -L^-1(N(1) + Q(u)) with
// L = Lap - (3 + kappa), kappa = (R+6)/8 + (7/8)|sigma|^2,
// Q(u) = (1/8)|sigma|^2((1+u)^-7 - 1 + 7u) - (3/4)((1+u)^5 - 1 - 5u).
RadialField picard_step(const RadialField& u, const RadialMetric& lambda, const RadialTT& sigma);

struct LichnerowiczSolution {
    RadialField phi;
    SolveReport report;
};
// Picard iteration on the fixed point of G, followed by a banded Newton
// polish that drives the audit Hamiltonian functional of the assembled data
// to the solver tolerance (zone rows keep the flux-form equations).
LichnerowiczSolution solve_lichnerowicz(const RadialMetric& lambda, const RadialTT& sigma,
                                        const EllipticConfig& cfg = {});

// Hamiltonian functional used by the Newton polish and by verification:
// Ham(phi) = R[phi^4 lambda] - |phi^-2 sigma|^2 + 6 evaluated through the
// assembled profiles (exact metric jets propagated, FD jets for phi).
std::vector<double> hamiltonian_of_phi(const RadialMetric& lambda, const RadialTT& sigma,
                                       const std::vector<double>& phi);

} // namespace hypforge
