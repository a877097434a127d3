#include "hypforge/elliptic.hpp"

#include <chrono>
#include <cmath>

#include "hypforge/fd.hpp"
#include "hypforge/fitting.hpp"

namespace hypforge {

namespace {
double wall_seconds() {
    using clk = std::chrono::steady_clock;
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}
} // namespace

FluxLaplacian flux_laplacian(const RadialMetric& m) {
    const RadialGrid& g = m.grid();
    const std::size_t n = g.n();
    const double h = g.h();
    // flux coefficient c = b^2/(rho a): average the smooth factor b^2/a between
    // nodes, keep the 1/rho weight exact at the half node.
    std::vector<double> smooth(n);
    for (std::size_t j = 0; j < n; ++j) smooth[j] = m.b()[j] * m.b()[j] / m.a()[j];
    std::vector<double> c_half(n + 1);
    for (std::size_t j = 1; j < n; ++j)
        c_half[j] = 0.5 * (smooth[j - 1] + smooth[j]) / (g.rho(j - 1) + 0.5 * h);
    c_half[0] = (1.5 * smooth[0] - 0.5 * smooth[1]) / (0.5 * h);
    c_half[n] = (1.5 * smooth[n - 1] - 0.5 * smooth[n - 2]) / (g.rho(n - 1) + 0.5 * h);

    FluxLaplacian out;
    out.w.resize(n);
    out.A.lo.assign(n, 0.0);
    out.A.di.assign(n, 0.0);
    out.A.up.assign(n, 0.0);
    const double h2 = h * h;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g.rho(j);
        out.w[j] = m.a()[j] * m.b()[j] * m.b()[j] / (rho * rho * rho);
        const double cm = c_half[j], cp = c_half[j + 1];
        if (j + 1 == n) {
            // even reflection at the center: flux through the outer face mirrors
            out.A.di[j] = -2.0 * cm / h2;
            out.A.lo[j] = 2.0 * cm / h2;
        } else {
            out.A.di[j] = -(cm + cp) / h2;
            out.A.up[j] = cp / h2;
            if (j > 0) out.A.lo[j] = cm / h2; // j == 0: ghost f(0) = 0 drops out
        }
    }
    return out;
}

// ------------------------------------------------------------------ momentum

MomentumSystem momentum_system(const RadialMetric& lambda, const RadialField& q_mu_bar) {
    const RadialGrid& g = lambda.grid();
    const std::size_t n = g.n();
    const double h = g.h();
    const auto da = lambda.da();
    const auto db = lambda.db();
    // c = abar'/abar - bbar'/bbar at nodes, averaged to half nodes
    std::vector<double> c_node(n), gam(n), q_mu(n);
    for (std::size_t j = 0; j < n; ++j) {
        c_node[j] = da[j] / lambda.a()[j] - db[j] / lambda.b()[j];
        gam[j] = db[j] / lambda.b()[j] - 1.0 / g.rho(j);
        q_mu[j] = g.rho(j) * q_mu_bar[j]; // physical lambda-frame profile of mu
    }
    if (lambda.closes_at_center()) {
        // a vanishing b makes the last log-derivative unusable; the Dirichlet
        // row at the center shadows it
        c_node[n - 1] = c_node[n - 2];
        gam[n - 1] = gam[n - 2];
    }
    std::vector<double> c_half(n), qmu_half(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        c_half[j] = 0.5 * (c_node[j] + c_node[j + 1]);
        qmu_half[j] = 0.5 * (q_mu[j] + q_mu[j + 1]);
    }
    const double c_half0 = 1.5 * c_node[0] - 0.5 * c_node[1];
    // mu at rho = h/2 by quadratic extrapolation of the first three nodes
    std::vector<double> rr(g.nodes().begin(), g.nodes().begin() + 6);
    std::vector<double> qq(q_mu.begin(), q_mu.begin() + 6);
    double qmu_half0 = 0.0;
    {
        // evaluate the quadratic fit at h/2
        const double x = 0.5 * h;
        // simple Lagrange through the first three nodes
        const double x0 = rr[0], x1 = rr[1], x2 = rr[2];
        qmu_half0 = qq[0] * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
                  + qq[1] * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
                  + qq[2] * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    }

    MomentumSystem sys;
    sys.A.lo.assign(n, 0.0);
    sys.A.di.assign(n, 0.0);
    sys.A.up.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    const double two3 = 2.0 / 3.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double cp = c_half[j];
        const double ap_lo = two3 * (-1.0 / h + 0.5 * cp);
        const double ap_up = two3 * (1.0 / h + 0.5 * cp);
        double am_lo = 0.0, am_up = 0.0, qm_rhs;
        if (j == 0) {
            am_up = two3 * (1.0 / h + 0.5 * c_half0); // ghost w(0) = 0
            qm_rhs = qmu_half0;
        } else {
            const double cm = c_half[j - 1];
            am_lo = two3 * (-1.0 / h + 0.5 * cm);
            am_up = two3 * (1.0 / h + 0.5 * cm);
            qm_rhs = qmu_half[j - 1];
        }
        const double A = 1.0 / h, B = 1.5 * gam[j];
        if (j > 0) sys.A.lo[j] = (-A + B) * am_lo;
        sys.A.di[j] = (A + B) * ap_lo + (-A + B) * am_up;
        sys.A.up[j] = (A + B) * ap_up;
        sys.rhs[j] = -((A + B) * qmu_half[j] + (-A + B) * qm_rhs);
    }
    sys.A.di[n - 1] = 1.0; // w(rho_c) = 0
    sys.rhs[n - 1] = 0.0;
    return sys;
}

MomentumSolution solve_momentum(const RadialMetric& lambda, const RadialField& q_mu_bar,
                                const EllipticConfig& cfg) {
    const double t0 = wall_seconds();
    const RadialGrid& g = lambda.grid();
    if (!(cfg.momentum_decay_exponent > -1.0) || !(cfg.momentum_decay_exponent < 3.0))
        throw solver_error("solve_momentum: decay exponent outside the isomorphism window (-1,3)");
    MomentumSystem sys = momentum_system(lambda, q_mu_bar);
    if (sys.A.min_pivot() < 1e-300)
        throw solver_error("solve_momentum: singular discrete system (min pivot " +
                           std::to_string(sys.A.min_pivot()) + ")");
    std::vector<double> w = sys.A.solve(sys.rhs);

    SolveReport rep;
    rep.method = "direct-banded";
    rep.residual_sup = sys.A.relative_residual(w, sys.rhs);

    RadialVector W(g, std::move(w), false);
    RadialTT DW = conformal_killing(lambda, W, Frame::physical);
    std::vector<double> qs(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) qs[j] = g.rho(j) * q_mu_bar[j] + DW[j];
    RadialTT sigma(g, std::move(qs), Frame::physical);

    // decay diagnostics on the physical norm profile |W|_g = (a/rho)|w|
    std::vector<double> prof(g.n());
    for (std::size_t j = 0; j < g.n(); ++j)
        prof[j] = lambda.a()[j] / g.rho(j) * std::fabs(W[j]);
    const double hi = std::min(0.1 * g.rho_c() / 2.0, 0.1);
    try {
        rep.fitted_decay_exponent = fit_decay_exponent(g.nodes(), prof, g.h(), std::max(hi, 30 * g.h()));
    } catch (const fit_error&) {
        rep.fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        std::vector<double> sprof(g.n());
        for (std::size_t j = 0; j < g.n(); ++j)
            sprof[j] = lambda.a()[j] / g.rho(j) * W[j];
        const auto fit = fit_expansion(g.nodes(), sprof,
                                       {{3, 0}, {3, 1}, {4, 0}, {4, 1}}, g.h(),
                                       std::max(hi, 30 * g.h()));
        const double lead = std::fabs(fit.coefficients[0]);
        rep.fitted_log_coefficient = std::fabs(fit.coefficients[1]) / std::max(lead, 1e-300);
        if (lead < 1e-14) rep.fitted_log_coefficient = 0.0;
    } catch (const fit_error&) {
        rep.fitted_log_coefficient = std::numeric_limits<double>::quiet_NaN();
    }
    rep.wall_time_s = wall_seconds() - t0;
    return MomentumSolution{std::move(W), std::move(sigma), rep};
}

// ------------------------------------------------------------- Lichnerowicz

RadialField lichnerowicz_residual(const RadialMetric& lambda, const RadialTT& sigma,
                                  const RadialField& phi, FdOrder ord) {
    const std::size_t n = lambda.grid().n();
    for (std::size_t j = 0; j < n; ++j)
        if (!(phi[j] > 0)) throw solver_error("lichnerowicz_residual: phi must be positive");
    const RadialTT s = sigma.frame() == Frame::physical ? sigma : sigma.to_frame(Frame::physical);
    const RadialField R = scalar_curvature(lambda, Frame::physical, ord);
    const FluxLaplacian L = flux_laplacian(lambda);
    // the flux matrix carries the Dirichlet ghost at rho = 0; apply it to the
    // boundary-vanishing part of phi (Lap of the constant offset is zero)
    const double b0 = extrapolate_to_boundary(lambda.grid().nodes(), phi.values(), 6);
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = phi[j] - b0;
    const auto Aphi = L.A.apply(u);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double sig2 = 1.5 * s[j] * s[j];
        const double lap = (L.w[j] != 0.0) ? Aphi[j] / L.w[j] : 0.0;
        out[j] = lap - R[j] * phi[j] / 8.0 + sig2 * std::pow(phi[j], -7.0) / 8.0
               - 0.75 * std::pow(phi[j], 5.0);
    }
    if (lambda.closes_at_center())
        extrapolate_center_zone(lambda.grid().nodes(), out);
    return RadialField(lambda.grid(), std::move(out));
}

namespace {

struct LichWork {
    FluxLaplacian L;
    std::vector<double> R, sig2, kappa, N1;
    Tridiag M; // rows of w * (Lap - (3+kappa))
};

LichWork lich_work(const RadialMetric& lambda, const RadialTT& sigma) {
    const std::size_t n = lambda.grid().n();
    LichWork wk;
    wk.L = flux_laplacian(lambda);
    const RadialTT s = sigma.frame() == Frame::physical ? sigma : sigma.to_frame(Frame::physical);
    const RadialField Rf = scalar_curvature(lambda, Frame::physical);
    wk.R = Rf.values();
    wk.sig2.resize(n);
    wk.kappa.resize(n);
    wk.N1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        wk.sig2[j] = 1.5 * s[j] * s[j];
        wk.kappa[j] = (wk.R[j] + 6.0) / 8.0 + 7.0 * wk.sig2[j] / 8.0;
        wk.N1[j] = -(wk.R[j] + 6.0) / 8.0 + wk.sig2[j] / 8.0;
    }
    wk.M = wk.L.A;
    for (std::size_t j = 0; j < n; ++j)
        wk.M.di[j] -= wk.L.w[j] * (3.0 + wk.kappa[j]);
    return wk;
}

std::vector<double> q_nonlinear(const std::vector<double>& u, const std::vector<double>& sig2) {
    std::vector<double> Q(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double up1 = 1.0 + u[j];
        Q[j] = sig2[j] / 8.0 * (std::pow(up1, -7.0) - 1.0 + 7.0 * u[j])
             - 0.75 * (std::pow(up1, 5.0) - 1.0 - 5.0 * u[j]);
    }
    return Q;
}

} // namespace

RadialField picard_step(const RadialField& u, const RadialMetric& lambda, const RadialTT& sigma) {
    double umax = 0;
    for (double x : u.values()) umax = std::max(umax, std::fabs(x));
    if (!(umax < 1.0))
        throw solver_error("picard_step: ||u|| >= 1 is outside the power-series domain");
    LichWork wk = lich_work(lambda, sigma);
    const std::size_t n = u.grid().n();
    const auto Q = q_nonlinear(u.values(), wk.sig2);
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = -wk.L.w[j] * (wk.N1[j] + Q[j]);
    return RadialField(u.grid(), wk.M.solve(rhs));
}

std::vector<double> hamiltonian_of_phi(const RadialMetric& lambda, const RadialTT& sigma,
                                       const std::vector<double>& phi) {
    const std::size_t n = lambda.grid().n();
    const RadialTT s = sigma.frame() == Frame::physical ? sigma : sigma.to_frame(Frame::physical);
    std::vector<double> qs(n);
    for (std::size_t j = 0; j < n; ++j) qs[j] = s[j];
    PhysicalData pd = conformal_assemble(lambda, RadialField(lambda.grid(), phi),
                                         RadialTT(lambda.grid(), std::move(qs), Frame::physical));
    const RadialField R = scalar_curvature(pd.g, Frame::physical);
    std::vector<double> F(n);
    for (std::size_t j = 0; j < n; ++j)
        F[j] = R[j] - 1.5 * pd.Sigma[j] * pd.Sigma[j] + 6.0;
    return F;
}

LichnerowiczSolution solve_lichnerowicz(const RadialMetric& lambda, const RadialTT& sigma,
                                        const EllipticConfig& cfg) {
    const double t0 = wall_seconds();
    const RadialGrid& g = lambda.grid();
    const std::size_t n = g.n();
    LichWork wk = lich_work(lambda, sigma);

    SolveReport rep;
    rep.method = "picard";
    std::vector<double> u(n, 0.0);
    double last_update = -1.0;
    double contraction = 0.0;
    int iters = 0;
    bool picard_ok = true;
    for (int k = 0; k < cfg.max_iter; ++k) {
        const auto Q = q_nonlinear(u, wk.sig2);
        std::vector<double> rhs(n);
        for (std::size_t j = 0; j < n; ++j) rhs[j] = -wk.L.w[j] * (wk.N1[j] + Q[j]);
        const auto u_new = wk.M.solve(rhs);
        double upd = 0, umax = 0;
        for (std::size_t j = 0; j < n; ++j) {
            upd = std::max(upd, std::fabs(u_new[j] - u[j]));
            umax = std::max(umax, std::fabs(u_new[j]));
        }
        if (last_update > 0 && k > 1) contraction = std::max(contraction, upd / last_update);
        last_update = upd;
        u = u_new;
        if (umax > cfg.divergence_guard) { picard_ok = false; break; }
        if (upd <= cfg.picard_tol) break;
        ++iters;
    }
    if (!picard_ok) {
        // Newton fallback on the flux-form functional from phi = 1
        rep.method = "newton";
        std::fill(u.begin(), u.end(), 0.0);
        for (int k = 0; k < cfg.max_iter; ++k) {
            // residual of w*N(1+u) and its tridiagonal Jacobian
            std::vector<double> res(n);
            Tridiag J = wk.L.A;
            for (std::size_t j = 0; j < n; ++j) {
                const double phi = 1.0 + u[j];
                if (!(phi > 0)) throw solver_error("newton fallback: phi left positivity");
                res[j] = -(wk.L.w[j]
                           * (-wk.R[j] * phi / 8.0 + wk.sig2[j] * std::pow(phi, -7.0) / 8.0
                              - 0.75 * std::pow(phi, 5.0)));
                J.di[j] += wk.L.w[j]
                         * (-wk.R[j] / 8.0 - 7.0 * wk.sig2[j] * std::pow(phi, -8.0) / 8.0
                            - 3.75 * std::pow(phi, 4.0));
            }
            const auto Au = wk.L.A.apply(u);
            for (std::size_t j = 0; j < n; ++j) res[j] -= Au[j];
            const auto du = J.solve(res);
            double upd = 0;
            for (std::size_t j = 0; j < n; ++j) { u[j] += du[j]; upd = std::max(upd, std::fabs(du[j])); }
            ++iters;
            if (upd <= cfg.picard_tol) break;
        }
    }
    rep.iterations = iters;
    rep.contraction_factor = contraction;

    std::vector<double> phi(n);
    for (std::size_t j = 0; j < n; ++j) phi[j] = 1.0 + u[j];

    // Newton polish on the audit functional: rows are the recomputable
    // Hamiltonian of the assembled data away from the center zone, flux-form
    // N rows (w-weighted) inside it. The Jacobian is assembled numerically
    // column-block-wise; the functional couples at most 4 nodes (one-sided
    // boundary stencils).
    const std::size_t kl = 5, ku = 5, stride = kl + ku + 1;
    auto Ffun = [&](const std::vector<double>& p) {
        std::vector<double> F = hamiltonian_of_phi(lambda, sigma, p);
        const std::size_t zone = std::min(kCenterZone, n / 4);
        const auto Ap = wk.L.A.apply(p);
        for (std::size_t j = n - zone; j < n; ++j) {
            F[j] = Ap[j]
                 - wk.L.w[j] * (wk.R[j] * p[j] / 8.0 - wk.sig2[j] * std::pow(p[j], -7.0) / 8.0
                                + 0.75 * std::pow(p[j], 5.0));
        }
        return F;
    };
    int newt = 0;
    std::vector<double> F0 = Ffun(phi);
    auto sup_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s = std::max(s, std::fabs(x));
        return s;
    };
    std::vector<double> best_phi = phi;
    double best_res = sup_of(F0);
    int since_best = 0;
    for (int it = 0; it < cfg.newton_max; ++it) {
        const double res = sup_of(F0);
        if (res < cfg.newton_tol || since_best >= 3) break;
        BandedMatrix J(n, kl, ku);
        const double efd = 1e-7;
        for (std::size_t c = 0; c < stride; ++c) {
            std::vector<double> p2 = phi;
            for (std::size_t j = c; j < n; j += stride) p2[j] += efd;
            const auto Fp = Ffun(p2);
            for (std::size_t j = c; j < n; j += stride) {
                const std::size_t r0 = (j >= ku) ? j - ku : 0;
                const std::size_t r1 = std::min(n, j + kl + 1);
                for (std::size_t r = r0; r < r1; ++r) J.at(r, j) = (Fp[r] - F0[r]) / efd;
            }
        }
        std::vector<double> mF(n);
        for (std::size_t j = 0; j < n; ++j) mF[j] = -F0[j];
        const auto dphi = J.solve(std::move(mF));
        for (std::size_t j = 0; j < n; ++j) phi[j] += dphi[j];
        ++newt;
        F0 = Ffun(phi);
        const double rnew = sup_of(F0);
        if (rnew < 0.7 * best_res) {
            best_res = rnew;
            best_phi = phi;
            since_best = 0;
        } else {
            ++since_best;
        }
    }
    if (sup_of(F0) > best_res) {
        phi = best_phi;
        F0 = Ffun(phi);
    }
    rep.newton_iterations = newt;
    rep.audit_residual_sup = sup_of(F0);

    for (std::size_t j = 0; j < n; ++j)
        if (!(phi[j] > 0)) throw solver_error("solve_lichnerowicz: phi is not positive");

    // discrete residual of the final phi under the flux-form N
    {
        const auto Aphi = wk.L.A.apply(phi);
        double r = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double val = Aphi[j]
                             - wk.L.w[j] * (wk.R[j] * phi[j] / 8.0
                                            - wk.sig2[j] * std::pow(phi[j], -7.0) / 8.0
                                            + 0.75 * std::pow(phi[j], 5.0));
            r = std::max(r, std::fabs(val) / std::max(1.0, std::fabs(wk.L.w[j])));
        }
        rep.residual_sup = r;
    }

    // decay diagnostics of u = phi - 1 near the boundary
    std::vector<double> uv(n);
    for (std::size_t j = 0; j < n; ++j) uv[j] = phi[j] - 1.0;
    const double hi = std::max(30 * g.h(), std::min(0.02, 0.1 * g.rho_c()));
    try {
        rep.fitted_decay_exponent = fit_decay_exponent(g.nodes(), uv, g.h(), hi, 1e-16);
    } catch (const fit_error&) {
        rep.fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        const auto fit = fit_expansion(g.nodes(), uv, {{2, 0}, {3, 0}, {3, 1}, {4, 0}}, g.h(), hi);
        const double lead = std::fabs(fit.coefficients[0]);
        rep.fitted_log_coefficient = std::fabs(fit.coefficients[2]) / std::max(lead, 1e-300);
        if (lead < 1e-14) rep.fitted_log_coefficient = 0.0;
    } catch (const fit_error&) {
        rep.fitted_log_coefficient = std::numeric_limits<double>::quiet_NaN();
    }
    rep.wall_time_s = wall_seconds() - t0;
    return LichnerowiczSolution{RadialField(g, std::move(phi)), rep};
}

} // namespace hypforge
