#include "hypforge/diagnostics.hpp"

#include <cmath>

#include "hypforge/fd.hpp"

namespace hypforge {

namespace {

// physical-frame chart profiles a_g = a/rho, b_g = b/rho
struct PhysChart {
    std::vector<double> a, b, la, lb; // profiles and log-derivatives
};

PhysChart phys_chart(const RadialMetric& m, Frame frame) {
    const std::size_t n = m.grid().n();
    PhysChart c;
    c.a.resize(n); c.b.resize(n); c.la.resize(n); c.lb.resize(n);
    const auto da = m.da(), db = m.db();
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = m.grid().rho(j);
        if (frame == Frame::physical) {
            c.a[j] = m.a()[j] / rho;
            c.b[j] = m.b()[j] / rho;
            c.la[j] = da[j] / m.a()[j] - 1.0 / rho;
            c.lb[j] = db[j] / m.b()[j] - 1.0 / rho;
        } else {
            c.a[j] = m.a()[j];
            c.b[j] = m.b()[j];
            c.la[j] = da[j] / m.a()[j];
            c.lb[j] = db[j] / m.b()[j];
        }
    }
    if (m.closes_at_center()) {
        c.lb[n - 1] = c.lb[n - 2];
        c.b[n - 1] = c.b[n - 2]; // placeholder, zone-extrapolated downstream
    }
    return c;
}

void maybe_fix_center(const RadialMetric& m, std::vector<double>& y) {
    if (m.closes_at_center()) extrapolate_center_zone(m.grid().nodes(), y);
}

} // namespace

double weighted_norm(const RadialMetric& m, const RadialField& f, const WeightedNormSpec& spec) {
    if (spec.k > 2) throw diagnostics_error("weighted_norm: k > 2 unsupported");
    const std::size_t n = m.grid().n();
    const PhysChart c = phys_chart(m, spec.frame);
    const auto df = fd_d1(f.values(), m.grid().h());
    const auto d2f = fd_d2(f.values(), m.grid().h());
    std::vector<double> point(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = std::fabs(f[j]);
        if (spec.k >= 1) v = std::max(v, std::fabs(df[j]) / c.a[j]); // |df|_g
        if (spec.k >= 2) {
            // |Hess f|^2 = ((f'' - (a'/a) f')/a^2)^2 + 2 ((b'/b) f'/a^2)^2
            const double t1 = (d2f[j] - c.la[j] * df[j]) / (c.a[j] * c.a[j]);
            const double t2 = c.lb[j] * df[j] / (c.a[j] * c.a[j]);
            v = std::max(v, std::sqrt(t1 * t1 + 2.0 * t2 * t2));
        }
        point[j] = v;
    }
    maybe_fix_center(m, point);
    double out = 0;
    for (std::size_t j = 0; j < n; ++j)
        out = std::max(out, std::pow(m.grid().rho(j), -spec.delta) * point[j]);
    return out;
}

double weighted_norm(const RadialMetric& m, const RadialVector& W, const WeightedNormSpec& spec) {
    if (spec.k > 1) throw diagnostics_error("weighted_norm(vector): k > 1 unsupported");
    const std::size_t n = m.grid().n();
    const PhysChart c = phys_chart(m, spec.frame);
    const auto dw = fd_d1(W.component(), m.grid().h());
    std::vector<double> point(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = c.a[j] * std::fabs(W[j]); // |W|_g = a|w|
        if (spec.k >= 1) {
            // |nabla W|^2 = (w' + (a'/a) w)^2 + 2 ((b'/b) w)^2
            const double t1 = dw[j] + c.la[j] * W[j];
            const double t2 = c.lb[j] * W[j];
            v = std::max(v, std::sqrt(t1 * t1 + 2.0 * t2 * t2));
        }
        point[j] = v;
    }
    maybe_fix_center(m, point);
    double out = 0;
    for (std::size_t j = 0; j < n; ++j)
        out = std::max(out, std::pow(m.grid().rho(j), -spec.delta) * point[j]);
    return out;
}

double weighted_norm(const RadialMetric& m, const RadialTT& S, const WeightedNormSpec& spec) {
    if (spec.k > 1) throw diagnostics_error("weighted_norm(TT): k > 1 unsupported");
    const std::size_t n = m.grid().n();
    // convert the profile to the requested frame: |S| = sqrt(3/2)|q_frame|
    const RadialTT Sf = S.to_frame(spec.frame == Frame::physical ? Frame::physical
                                                                 : Frame::compactified);
    const PhysChart c = phys_chart(m, spec.frame);
    const auto dq = fd_d1(Sf.profile(), m.grid().h());
    std::vector<double> point(n, 0.0);
    const double s32 = std::sqrt(1.5);
    for (std::size_t j = 0; j < n; ++j) {
        double v = s32 * std::fabs(Sf[j]);
        if (spec.k >= 1) {
            // |nabla S| for the TT shape: from the sym2 gradient formula with
            // f1 = q a^2, f2 = -q b^2/2:
            //   d1 = q' a^2, d2 = -q' b^2/2, d3 = (b'/b)(b^2 f1/a^2 - f2) = (3/2) q b b'
            const double d1 = dq[j];                       // /a^2 weights cancel
            const double d3 = 1.5 * Sf[j] * c.lb[j];
            const double t = std::sqrt(d1 * d1 * 1.0 + 2.0 * (0.5 * dq[j]) * (0.5 * dq[j])
                                       + 4.0 * d3 * d3) / c.a[j];
            v = std::max(v, t);
        }
        point[j] = v;
    }
    maybe_fix_center(m, point);
    double out = 0;
    for (std::size_t j = 0; j < n; ++j)
        out = std::max(out, std::pow(m.grid().rho(j), -spec.delta) * point[j]);
    return out;
}

std::vector<double> sym2_norm_profile(const RadialMetric& m, const RadialSym2& T) {
    const std::size_t n = m.grid().n();
    const PhysChart c = phys_chart(m, Frame::physical);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r1 = T.f1[j] / (c.a[j] * c.a[j]);
        const double r2 = T.f2[j] / (c.b[j] * c.b[j]);
        out[j] = std::sqrt(r1 * r1 + 2.0 * r2 * r2);
    }
    maybe_fix_center(m, out);
    return out;
}

std::vector<double> sym2_grad_norm_profile(const RadialMetric& m, const RadialSym2& T) {
    const std::size_t n = m.grid().n();
    const PhysChart c = phys_chart(m, Frame::physical);
    const auto df1 = fd_d1(T.f1.values(), m.grid().h());
    const auto df2 = fd_d1(T.f2.values(), m.grid().h());
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a2 = c.a[j] * c.a[j], b2 = c.b[j] * c.b[j];
        const double d1 = df1[j] - 2.0 * c.la[j] * T.f1[j];
        const double d2 = df2[j] - 2.0 * c.lb[j] * T.f2[j];
        const double d3 = c.lb[j] * (b2 * T.f1[j] / a2 - T.f2[j]);
        out[j] = std::sqrt(d1 * d1 / (a2 * a2 * a2)
                           + (2.0 * d2 * d2 + 4.0 * d3 * d3) / (a2 * b2 * b2)) ;
    }
    maybe_fix_center(m, out);
    return out;
}

RadialSym2 metric_difference(const RadialMetric& g1, const RadialMetric& g2) {
    const std::size_t n = g1.grid().n();
    std::vector<double> f1(n), f2(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g1.grid().rho(j), r2 = rho * rho;
        f1[j] = (g1.a()[j] * g1.a()[j] - g2.a()[j] * g2.a()[j]) / r2;
        f2[j] = (g1.b()[j] * g1.b()[j] - g2.b()[j] * g2.b()[j]) / r2;
    }
    return RadialSym2{RadialField(g1.grid(), std::move(f1)), RadialField(g1.grid(), std::move(f2))};
}

RadialSym2 extrinsic_curvature(const RadialMetric& g_phys, const RadialTT& Sigma) {
    const std::size_t n = g_phys.grid().n();
    const RadialTT S = Sigma.to_frame(Frame::physical);
    std::vector<double> f1(n), f2(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g_phys.grid().rho(j), r2 = rho * rho;
        const double a2 = g_phys.a()[j] * g_phys.a()[j] / r2;
        const double b2 = g_phys.b()[j] * g_phys.b()[j] / r2;
        // K = Sigma - g: Sigma = q (a^2 drho^2 - (b^2/2) ghat)
        f1[j] = S[j] * a2 - a2;
        f2[j] = -S[j] * b2 / 2.0 - b2;
    }
    return RadialSym2{RadialField(g_phys.grid(), std::move(f1)),
                      RadialField(g_phys.grid(), std::move(f2))};
}

double diff_norm_c0(const RadialMetric& ref, const RadialSym2& T) {
    const auto p = sym2_norm_profile(ref, T);
    double out = 0;
    for (double x : p) out = std::max(out, x);
    return out;
}

double diff_norm_c1(const RadialMetric& ref, const RadialSym2& T) {
    const auto p0 = sym2_norm_profile(ref, T);
    const auto p1 = sym2_grad_norm_profile(ref, T);
    double out = 0;
    for (std::size_t j = 0; j < p0.size(); ++j) out = std::max(out, std::max(p0[j], p1[j]));
    return out;
}

ShearResidual shear_residual(const RadialMetric& gbar, const RadialTT& Sigma_bar) {
    if (Sigma_bar.frame() != Frame::compactified)
        throw diagnostics_error("shear_residual: Sigma_bar must be in the compactified frame");
    const std::size_t n = gbar.grid().n();
    const ShearTensor st = shear_tensor(gbar);
    ShearResidual out;
    out.profile.resize(n);
    const double s32 = std::sqrt(1.5);
    for (std::size_t j = 0; j < n; ++j)
        out.profile[j] = s32 * std::fabs(Sigma_bar[j] - st.H[j]);
    out.boundary_value = extrapolate_to_boundary(gbar.grid().nodes(), out.profile, 6);

    // Hessian form: trace-free Hessian profile q_TF = u'/3 - (2/3) u b'/b
    const auto da = gbar.da(), db = gbar.db();
    std::vector<double> hf(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = gbar.a()[j];
        const double u = 1.0 / (a * a);
        const double up = -2.0 * da[j] / (a * a * a);
        const double lb = (gbar.closes_at_center() && j + 1 == n)
                              ? db[n - 2] / gbar.b()[n - 2]
                              : db[j] / gbar.b()[j];
        const double qtf = up / 3.0 - (2.0 / 3.0) * u * lb;
        hf[j] = s32 * std::fabs(qtf - Sigma_bar[j]);
    }
    out.hessian_form_boundary_value = extrapolate_to_boundary(gbar.grid().nodes(), hf, 6);
    return out;
}

} // namespace hypforge
