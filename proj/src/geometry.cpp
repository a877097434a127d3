#include "hypforge/geometry.hpp"

#include <cmath>

namespace hypforge {

namespace {

struct ChartScalars {
    std::vector<double> u, up, vp, vpp; // u = 1/a^2; v = b^2 handled through b
};

ChartScalars chart_scalars(const RadialMetric& m, FdOrder ord) {
    const std::size_t n = m.grid().n();
    ChartScalars c;
    c.u.resize(n); c.vp.resize(n); c.vpp.resize(n);
    const auto& a = m.a();
    const auto& b = m.b();
    for (std::size_t j = 0; j < n; ++j) c.u[j] = 1.0 / (a[j] * a[j]);
    if (m.has_jets()) {
        const auto da = m.da(ord);
        const auto db = m.db(ord);
        const auto d2b = m.d2b(ord);
        c.up.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            c.up[j] = -2.0 * da[j] / (a[j] * a[j] * a[j]);
            c.vp[j] = 2.0 * b[j] * db[j];
            c.vpp[j] = 2.0 * (db[j] * db[j] + b[j] * d2b[j]);
        }
    } else {
        // differentiate the chart scalars themselves: smaller truncation
        // constants than composing b-derivatives
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = b[j] * b[j];
        c.up = fd_d1(c.u, m.grid().h(), ord);
        c.vp = fd_d1(v, m.grid().h(), ord);
        c.vpp = fd_d2(v, m.grid().h(), ord);
    }
    return c;
}

void center_fix(const RadialMetric& m, std::vector<double>& y) {
    if (m.closes_at_center()) extrapolate_center_zone(m.grid().nodes(), y);
}

std::vector<double> scalar_curvature_bar_raw(const RadialMetric& m, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const auto c = chart_scalars(m, ord);
    const auto& b = m.b();
    std::vector<double> R(n);
    const std::size_t stop = m.closes_at_center() ? n - 1 : n;
    for (std::size_t j = 0; j < stop; ++j) {
        const double v = b[j] * b[j];
        R[j] = 2.0 / v - c.up[j] * c.vp[j] / v - 2.0 * c.u[j] * c.vpp[j] / v
             + c.u[j] * c.vp[j] * c.vp[j] / (2.0 * v * v);
    }
    if (stop < n) R[n - 1] = R[n - 2];
    center_fix(m, R);
    return R;
}

std::vector<double> lap_rho_raw(const RadialMetric& m, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const auto c = chart_scalars(m, ord);
    const auto& b = m.b();
    std::vector<double> L(n);
    const std::size_t stop = m.closes_at_center() ? n - 1 : n;
    for (std::size_t j = 0; j < stop; ++j)
        L[j] = c.u[j] * c.vp[j] / (b[j] * b[j]) + c.up[j] / 2.0;
    if (stop < n) L[n - 1] = L[n - 2];
    center_fix(m, L);
    return L;
}

// log-derivative profiles a'/a and b'/b, safe at a closing center
std::vector<double> log_da(const RadialMetric& m, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const auto da = m.da(ord);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = da[j] / m.a()[j];
    return out;
}

std::vector<double> log_db(const RadialMetric& m, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const auto db = m.db(ord);
    std::vector<double> out(n);
    const std::size_t stop = m.closes_at_center() ? n - 1 : n;
    for (std::size_t j = 0; j < stop; ++j) out[j] = db[j] / m.b()[j];
    if (stop < n) out[n - 1] = out[n - 2]; // placeholder; zone handling downstream
    return out;
}

} // namespace

RadialField lap_rho_compactified(const RadialMetric& m, FdOrder ord) {
    return RadialField(m.grid(), lap_rho_raw(m, ord));
}

RadialField scalar_curvature(const RadialMetric& m, Frame frame, FdOrder ord) {
    const std::size_t n = m.grid().n();
    auto Rbar = scalar_curvature_bar_raw(m, ord);
    if (frame == Frame::compactified) return RadialField(m.grid(), std::move(Rbar));
    const auto L = lap_rho_raw(m, ord);
    std::vector<double> R(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = m.grid().rho(j);
        const double u = 1.0 / (m.a()[j] * m.a()[j]);
        R[j] = rho * rho * Rbar[j] + 4.0 * rho * L[j] - 6.0 * u;
    }
    center_fix(m, R);
    return RadialField(m.grid(), std::move(R));
}

RadialTT conformal_killing(const RadialMetric& m, const RadialVector& W, Frame frame, FdOrder ord) {
    const std::size_t n = m.grid().n();
    if (!(W.grid() == m.grid())) throw field_error("conformal_killing: grid mismatch");
    const auto la = log_da(m, ord);
    const auto lb = log_db(m, ord);
    const auto dw = fd_d1(W.component(), m.grid().h(), ord);
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j)
        q[j] = (2.0 / 3.0) * (dw[j] + (la[j] - lb[j]) * W[j]);
    if (m.closes_at_center()) extrapolate_center_zone(m.grid().nodes(), q);
    return RadialTT(m.grid(), std::move(q), frame);
}

RadialOneForm divergence_tt(const RadialMetric& m, const RadialTT& S, FdOrder ord) {
    if (!(S.grid() == m.grid())) throw field_error("divergence_tt: grid mismatch");
    const std::size_t n = m.grid().n();
    const auto lb = log_db(m, ord);
    const auto dq = fd_d1(S.profile(), m.grid().h(), ord);
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) {
        double g = lb[j];
        if (S.frame() == Frame::physical) g -= 1.0 / m.grid().rho(j);
        p[j] = dq[j] + 3.0 * g * S[j];
    }
    if (m.closes_at_center()) extrapolate_center_zone(m.grid().nodes(), p);
    return RadialOneForm(m.grid(), std::move(p));
}

RadialVector vector_laplacian_apply(const RadialMetric& m, const RadialVector& W, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const RadialTT DW = conformal_killing(m, W, Frame::physical, ord);
    const auto lb = log_db(m, ord);
    const auto dq = fd_d1(DW.profile(), m.grid().h(), ord);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = m.grid().rho(j);
        const double a_phys = m.a()[j] / rho;
        const double gamma = lb[j] - 1.0 / rho; // physical b'/b
        out[j] = -(dq[j] + 3.0 * gamma * DW[j]) / (a_phys * a_phys);
    }
    if (m.closes_at_center()) {
        extrapolate_center_zone(m.grid().nodes(), out);
        out[n - 1] = 0.0; // vectors vanish at a geometric center
    }
    return RadialVector(m.grid(), std::move(out), false);
}

ShearTensor shear_tensor(const RadialMetric& m, double scale, FdOrder ord) {
    const std::size_t n = m.grid().n();
    const auto la = log_da(m, ord);
    const auto lb = log_db(m, ord);
    std::vector<double> up(n);
    if (m.has_jets()) {
        const auto daU = m.da(ord);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = m.a()[j];
            up[j] = -2.0 * daU[j] / (a * a * a);
        }
    } else {
        std::vector<double> u0(n);
        for (std::size_t j = 0; j < n; ++j) u0[j] = 1.0 / (m.a()[j] * m.a()[j]);
        up = fd_d1(u0, m.grid().h(), ord);
    }
    std::vector<double> q(n), A(n), sc(n);
    const double s3 = scale * scale * scale, s5 = s3 * scale * scale;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = m.a()[j];
        const double u = 1.0 / (a * a);
        // X = |d(scale rho)|^-2 grad(scale rho) = (1/scale) d/drho, and both
        // defining pieces carry exact scale powers: term1 ~ u^3 qX ~ scale^5,
        // A(scale rho) = scale^3 A(rho).
        const double qX = (2.0 / 3.0) * (la[j] - lb[j]);
        const double term1 = s5 * u * u * u * qX;
        const double Aj = s3 * (0.5 * u * up[j] + u * u * lb[j]);
        const double term2 = (2.0 / 3.0) * (scale * scale * u) * Aj;
        q[j] = term1 + term2;
        A[j] = Aj;
        sc[j] = std::fabs(term1) + std::fabs(term2);
    }
    if (m.closes_at_center()) {
        extrapolate_center_zone(m.grid().nodes(), q);
        extrapolate_center_zone(m.grid().nodes(), A);
        extrapolate_center_zone(m.grid().nodes(), sc);
    }
    return ShearTensor{RadialTT(m.grid(), std::move(q), Frame::compactified),
                       RadialField(m.grid(), std::move(A)),
                       RadialField(m.grid(), std::move(sc))};
}

ConstraintResiduals constraint_residuals(const RadialMetric& g_phys, const RadialTT& Sigma,
                                         FdOrder ord) {
    const std::size_t n = g_phys.grid().n();
    const RadialTT Sg = Sigma.to_frame(Frame::physical);
    RadialField R = scalar_curvature(g_phys, Frame::physical, ord);
    std::vector<double> ham(n);
    for (std::size_t j = 0; j < n; ++j)
        ham[j] = R[j] - 1.5 * Sg[j] * Sg[j] + 6.0;
    RadialOneForm mom = divergence_tt(g_phys, Sg, ord);
    std::vector<double> mom_norm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a_phys = g_phys.a()[j] / g_phys.grid().rho(j);
        mom_norm[j] = std::fabs(mom[j]) / a_phys;
    }
    if (g_phys.closes_at_center())
        extrapolate_center_zone(g_phys.grid().nodes(), mom_norm);
    return ConstraintResiduals{RadialField(g_phys.grid(), std::move(ham)), std::move(mom),
                               RadialField(g_phys.grid(), std::move(mom_norm))};
}

RadialField boundary_identity_residual(const RadialMetric& g_phys, const RadialTT& Sigma,
                                       double tau, FdOrder ord) {
    const std::size_t n = g_phys.grid().n();
    const auto Rbar = scalar_curvature(g_phys, Frame::compactified, ord);
    const auto L = lap_rho_raw(g_phys, ord);
    const RadialTT Sg = Sigma.to_frame(Frame::physical);
    std::vector<double> E(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g_phys.grid().rho(j);
        const double u = 1.0 / (g_phys.a()[j] * g_phys.a()[j]);
        // |Sbar|^2_gbar = (3/2) q_phys^2 / rho^2
        const double sbar2 = 1.5 * Sg[j] * Sg[j] / (rho * rho);
        E[j] = 4.0 * rho * L[j] + (Rbar[j] - sbar2) * rho * rho
             + 6.0 * (tau * tau / 9.0 - u);
    }
    if (g_phys.closes_at_center())
        extrapolate_center_zone(g_phys.grid().nodes(), E);
    return RadialField(g_phys.grid(), std::move(E));
}

PhysicalData conformal_assemble(const RadialMetric& lambda, const RadialField& phi,
                                const RadialTT& sigma_lambda_frame) {
    const std::size_t n = lambda.grid().n();
    if (!(phi.grid() == lambda.grid())) throw field_error("conformal_assemble: grid mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (!(phi[j] > 0)) throw metric_error("conformal_assemble: phi must be positive");
    std::vector<double> a(n), b(n), q(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p2 = phi[j] * phi[j];
        a[j] = p2 * lambda.a()[j];
        b[j] = p2 * lambda.b()[j];
        // Sigma = phi^-2 sigma as a tensor; the g-frame shape factor absorbs
        // another phi^4, so the stored profile scales by phi^-6. This is what
        // makes Div_g Sigma = phi^-6 Div_lambda sigma hold exactly.
        q[j] = sigma_lambda_frame[j] / (p2 * p2 * p2);
    }
    RadialMetric g(lambda.grid(), std::move(a), std::move(b), lambda.closes_at_center(),
                   lambda.center_chart_singular());
    if (lambda.has_jets()) {
        const auto dphi = fd_d1(phi.values(), lambda.grid().h());
        const auto d2phi = fd_d2(phi.values(), lambda.grid().h());
        const auto &la = lambda.a(), &lb = lambda.b();
        const auto da = lambda.da(), d2a = lambda.d2a(), db = lambda.db(), d2b = lambda.d2b();
        std::vector<double> dA(n), d2A(n), dB(n), d2B(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double p = phi[j], dp = dphi[j], ddp = d2phi[j];
            dA[j] = 2 * p * dp * la[j] + p * p * da[j];
            d2A[j] = 2 * (dp * dp + p * ddp) * la[j] + 4 * p * dp * da[j] + p * p * d2a[j];
            dB[j] = 2 * p * dp * lb[j] + p * p * db[j];
            d2B[j] = 2 * (dp * dp + p * ddp) * lb[j] + 4 * p * dp * db[j] + p * p * d2b[j];
        }
        g.set_jets(std::move(dA), std::move(d2A), std::move(dB), std::move(d2B));
    }
    return PhysicalData{std::move(g), RadialTT(lambda.grid(), std::move(q), Frame::physical)};
}

} // namespace hypforge
