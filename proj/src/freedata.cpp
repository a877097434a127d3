#include "hypforge/freedata.hpp"

#include <cmath>

namespace hypforge {

StepJet smooth_step(double x) {
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0, 0.0};
    const double fa = std::exp(-1.0 / x);
    const double fb = std::exp(-1.0 / (1.0 - x));
    const double fap = fa / (x * x);
    const double fbp = -fb / ((1 - x) * (1 - x));
    const double fapp = fa * (1.0 / std::pow(x, 4) - 2.0 / std::pow(x, 3));
    const double fbpp = fb * (1.0 / std::pow(1 - x, 4) - 2.0 / std::pow(1 - x, 3));
    const double den = fa + fb;
    const double v = fa / den;
    const double d1 = (fap * den - fa * (fap + fbp)) / (den * den);
    const double d2 = ((fapp * den - fa * (fapp + fbpp)) * den
                       - 2.0 * (fap * den - fa * (fap + fbp)) * (fap + fbp))
                      / (den * den * den);
    return {v, d1, d2};
}

CutoffProfile::CutoffProfile(double eps, double rho_c) : eps_(eps) {
    if (!(eps > 0) || !(eps < rho_c / 4.0))
        throw freedata_error("make_cutoff: need 0 < eps < rho_c/4");
}

StepJet CutoffProfile::at(double rho) const {
    const StepJet s = smooth_step(rho / eps_ - 1.0);
    return {s.value, s.d1 / eps_, s.d2 / (eps_ * eps_)};
}

RadialMetric make_background(const RadialMetric& gbar, double rho_glue) {
    if (!gbar.asymptotically_hyperbolic())
        throw freedata_error("make_background: input is not asymptotically hyperbolic");
    const RadialGrid& g = gbar.grid();
    const std::size_t n = g.n();
    const double b0 = gbar.boundary_b();
    const double rc = g.rho_c();
    std::vector<double> a(n, 1.0), da(n, 0.0), d2a(n, 0.0), b(n), db(n), d2b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g.rho(j);
        // zeta: 1 on [0, rho_glue], 0 on [2 rho_glue, rho_c]
        const StepJet s = smooth_step((rho - rho_glue) / rho_glue);
        const double zeta = 1.0 - s.value;
        const double z1 = -s.d1 / rho_glue;
        const double z2 = -s.d2 / (rho_glue * rho_glue);
        const double r2 = (rc - rho) * (rc - rho);
        const double dr2 = -2.0 * (rc - rho);
        const double v = zeta * b0 * b0 + (1.0 - zeta) * r2;
        const double dv = z1 * b0 * b0 - z1 * r2 + (1.0 - zeta) * dr2;
        const double d2v = z2 * b0 * b0 - z2 * r2 - 2.0 * z1 * dr2 + (1.0 - zeta) * 2.0;
        b[j] = std::sqrt(v);
        if (v > 0) {
            db[j] = dv / (2.0 * b[j]);
            d2b[j] = d2v / (2.0 * b[j]) - dv * dv / (4.0 * v * b[j]);
        } else {
            db[j] = -1.0; // the reference chart closes with b' = -a
            d2b[j] = 0.0;
        }
    }
    RadialMetric h(g, std::move(a), std::move(b), true);
    h.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return h;
}

FreeDataFamily build_family(const RadialMetric& gbar, const RadialTT& Sigma_physical,
                            const std::vector<double>& eps_list,
                            std::optional<RadialMetric> background_override,
                            double glue_fraction) {
    const RadialGrid& g = gbar.grid();
    const std::size_t n = g.n();
    if (Sigma_physical.frame() != Frame::physical)
        throw freedata_error("build_family: Sigma must be given in the physical frame");
    const double rho_glue = glue_fraction * g.rho_c();
    RadialMetric h = background_override ? *background_override : make_background(gbar, rho_glue);

    FreeDataFamily fam{h, rho_glue, {}};
    const auto dga = gbar.da(), d2ga = gbar.d2a(), dgb = gbar.db(), d2gb = gbar.d2b();
    const auto dha = h.da(), d2ha = h.d2a(), dhb = h.db(), d2hb = h.d2b();

    for (double eps : eps_list) {
        if (!(eps > 0) || !(eps < rho_glue / 2.0))
            throw freedata_error("build_family: need eps < rho_glue/2");
        CutoffProfile chi(eps, g.rho_c());
        std::vector<double> a(n), b(n), da(n), d2a(n), db(n), d2b(n), qmu(n), qmubar(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double rho = g.rho(j);
            const StepJet c = chi.at(rho);
            const double qS = Sigma_physical[j];
            qmu[j] = c.value * qS;
            qmubar[j] = c.value * qS / rho; // profile of rho*mu in the bar frame
            if (c.value >= 1.0) {
                a[j] = gbar.a()[j]; b[j] = gbar.b()[j];
                da[j] = dga[j]; d2a[j] = d2ga[j]; db[j] = dgb[j]; d2b[j] = d2gb[j];
                continue;
            }
            // combine on squared profiles: F = chi f^2 + (1-chi) h^2
            auto comb = [&](double f, double dfj, double d2fj, double hh, double dhj,
                            double d2hj, double& out, double& dout, double& d2out) {
                const double F = c.value * f * f + (1 - c.value) * hh * hh;
                const double dF = c.d1 * (f * f - hh * hh) + c.value * 2 * f * dfj
                                + (1 - c.value) * 2 * hh * dhj;
                const double d2F = c.d2 * (f * f - hh * hh)
                                 + 2 * c.d1 * (2 * f * dfj - 2 * hh * dhj)
                                 + c.value * 2 * (dfj * dfj + f * d2fj)
                                 + (1 - c.value) * 2 * (dhj * dhj + hh * d2hj);
                out = std::sqrt(F);
                dout = dF / (2 * out);
                d2out = d2F / (2 * out) - dF * dF / (4 * F * out);
            };
            comb(gbar.a()[j], dga[j], d2ga[j], h.a()[j], dha[j], d2ha[j], a[j], da[j], d2a[j]);
            comb(gbar.b()[j], dgb[j], d2gb[j], h.b()[j], dhb[j], d2hb[j], b[j], db[j], d2b[j]);
        }
        RadialMetric lam(g, std::move(a), std::move(b), gbar.closes_at_center(),
                         gbar.center_chart_singular());
        lam.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
        fam.entries.push_back(FamilyEntry{eps, std::move(lam),
                                          RadialTT(g, std::move(qmu), Frame::physical),
                                          RadialField(g, std::move(qmubar))});
    }
    return fam;
}

} // namespace hypforge
