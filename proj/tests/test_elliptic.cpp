#include <doctest.h>

#include <cmath>
#include <random>

#include "hypforge/elliptic.hpp"
#include "hypforge/fitting.hpp"
#include "hypforge/freedata.hpp"
#include "hypforge/metric.hpp"
#include "hypforge/pipeline.hpp"
#include "oracles.hpp"

using namespace hypforge;

namespace {

// band-supported trace-free source on the slab: qbar profile of rho*mu
RadialField band_mu_bar(const RadialGrid& g, double center = 0.7, double width = 0.25,
                        double amp = 0.05) {
    std::vector<double> q(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double x = (g.rho(j) - center) / width;
        q[j] = std::fabs(x) < 1.0 ? amp * std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    }
    return RadialField(g, std::move(q));
}

oracles::MomentumOde slab_ode(double center = 0.7, double width = 0.25, double amp = 0.05) {
    oracles::MomentumOde ode;
    ode.c = [](double r) { return -0.3 / (0.8 + 0.3 * r); };
    ode.cp = [](double r) { const double b = 0.8 + 0.3 * r; return 0.09 / (b * b); };
    ode.gam = [](double r) { return 0.3 / (0.8 + 0.3 * r) - 1.0 / r; };
    ode.q_mu = [=](double r) {
        const double x = (r - center) / width;
        return std::fabs(x) < 1.0 ? r * amp * std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    };
    ode.q_mu_p = [=](double r) {
        const double x = (r - center) / width;
        if (std::fabs(x) >= 1.0) return 0.0;
        const double e = std::exp(-1.0 / (1.0 - x * x));
        return amp * e + r * amp * e * (-2.0 * x / (width * (1 - x * x) * (1 - x * x)));
    };
    return ode;
}

} // namespace

TEST_CASE("momentum: zero source gives zero solution") {
    RadialGrid g(512, 2.0);
    const RadialMetric m = slab_metric(g);
    const MomentumSolution ms = solve_momentum(m, RadialField::zero(g));
    CHECK(ms.W.sup() == 0.0);
    for (std::size_t j = 0; j < g.n(); ++j) CHECK(ms.sigma[j] == 0.0);
}

TEST_CASE("momentum: manufactured solution at second order") {
    // w = rho^4 (2 - rho)^2 with q_mu := -q(W) makes sigma vanish identically
    std::vector<double> errs;
    for (std::size_t n : {512u, 1024u, 2048u}) {
        RadialGrid g(n, 2.0);
        const RadialMetric m = slab_metric(g);
        std::vector<double> qb(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double rho = g.rho(j);
            const double w = std::pow(rho, 4) * std::pow(2 - rho, 2);
            const double dw = 4 * std::pow(rho, 3) * std::pow(2 - rho, 2)
                            - 2 * std::pow(rho, 4) * (2 - rho);
            const double c = -0.3 / (0.8 + 0.3 * rho);
            qb[j] = -(2.0 / 3.0) * (dw + c * w) / rho;
        }
        const MomentumSolution ms = solve_momentum(m, RadialField(g, qb));
        double sup = 0;
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double rho = g.rho(j);
            const double w = std::pow(rho, 4) * std::pow(2 - rho, 2);
            sup = std::max(sup, std::fabs(ms.W[j] - w));
        }
        errs.push_back(sup);
        CHECK(ms.report.residual_sup < 1e-10);
    }
    CHECK(std::log2(errs[0] / errs[1]) > 1.7);
    CHECK(std::log2(errs[1] / errs[2]) > 1.7);
}

TEST_CASE("momentum: decay exponent, divergence-free output, shooting oracle order") {
    std::vector<double> diffs;
    for (std::size_t n : {512u, 1024u, 2048u}) {
        RadialGrid g(n, 2.0);
        const RadialMetric m = slab_metric(g);
        const MomentumSolution ms = solve_momentum(m, band_mu_bar(g));
        CHECK(ms.report.residual_sup < 1e-10);
        if (n == 2048) {
            CHECK(ms.report.fitted_decay_exponent > 2.9);
            CHECK(ms.report.fitted_decay_exponent < 3.1);
            // beta_lambda^3 * q_sigma is constant away from the band
            std::vector<double> C;
            for (std::size_t j = 0; j < g.n(); ++j) {
                const double bl = m.b()[j] / g.rho(j);
                C.push_back(ms.sigma[j] * bl * bl * bl);
            }
            const double c_lo = C[g.index_of(0.1)], c_mid = C[g.index_of(0.3)];
            CHECK(std::fabs(c_lo - c_mid) < 3e-5 * std::fabs(c_mid));
            CHECK(std::fabs(c_mid) > 1e-5); // nontrivial divergence-free sector
        }
        const auto shoot = oracles::shoot_momentum(g, slab_ode(), 0.3);
        double sup = 0;
        for (std::size_t j = 0; j < g.n(); ++j)
            sup = std::max(sup, std::fabs(ms.W[j] - shoot.w[j]));
        diffs.push_back(sup);
    }
    const double o1 = std::log2(diffs[0] / diffs[1]);
    const double o2 = std::log2(diffs[1] / diffs[2]);
    CHECK(o1 > 1.7); CHECK(o1 < 2.3);
    CHECK(o2 > 1.7); CHECK(o2 < 2.3);
}

TEST_CASE("momentum: leading coefficient stable under window shrink") {
    RadialGrid g(2048, 2.0);
    const RadialMetric m = slab_metric(g);
    const MomentumSolution ms = solve_momentum(m, band_mu_bar(g));
    std::vector<double> prof(g.n());
    for (std::size_t j = 0; j < g.n(); ++j)
        prof[j] = m.a()[j] / g.rho(j) * ms.W[j];
    const auto full = fit_expansion(g.nodes(), prof, {{3, 0}}, g.h(), 0.2);
    const auto shrunk = fit_expansion(g.nodes(), prof, {{3, 0}}, g.h(), 0.02);
    CHECK(std::fabs(full.coefficients[0] - shrunk.coefficients[0])
          <= 0.15 * std::fabs(shrunk.coefficients[0]));
}

TEST_CASE("momentum: self-convergence order two") {
    std::vector<std::vector<double>> ws;
    for (std::size_t n : {512u, 1024u, 2048u}) {
        RadialGrid g(n, 2.0);
        const MomentumSolution ms = solve_momentum(slab_metric(g), band_mu_bar(g));
        ws.push_back(ms.W.component());
    }
    double e1 = 0, e2 = 0;
    for (std::size_t j = 0; j < ws[0].size(); ++j)
        e1 = std::max(e1, std::fabs(ws[0][j] - ws[1][2 * j + 1]));
    for (std::size_t j = 0; j < ws[1].size(); ++j)
        e2 = std::max(e2, std::fabs(ws[1][j] - ws[2][2 * j + 1]));
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("momentum: decay target outside the window is rejected") {
    RadialGrid g(512, 2.0);
    EllipticConfig cfg;
    cfg.momentum_decay_exponent = 3.5;
    CHECK_THROWS_AS(solve_momentum(slab_metric(g), RadialField::zero(g), cfg), solver_error);
}

TEST_CASE("lichnerowicz residual: hyperbolic identity and u0 exponent") {
    RadialGrid g(2048, 0.5);
    const RadialMetric m = hyperbolic_delta_chart(g);
    const RadialField r = lichnerowicz_residual(m, RadialTT::zero(g, Frame::physical),
                                                RadialField(g, std::vector<double>(g.n(), 1.0)));
    CHECK(r.sup() < 1e-6);
    CHECK_THROWS_AS(lichnerowicz_residual(m, RadialTT::zero(g, Frame::physical),
                                          RadialField(g, std::vector<double>(g.n(), -1.0))),
                    solver_error);
}

TEST_CASE("picard step: fixed point, contraction, and the power-difference factorization") {
    RadialGrid g(1024, 2.0);
    const RadialMetric m = generic_seed_metric(g, 0.3);
    const RadialTT sig = RadialTT::zero(g, Frame::physical);

    // domain guard
    CHECK_THROWS_AS(picard_step(RadialField(g, std::vector<double>(g.n(), 1.5)), m, sig),
                    solver_error);

    // u at the fixed point maps to itself (solve first)
    const LichnerowiczSolution ls = solve_lichnerowicz(m, sig);
    std::vector<double> u(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) u[j] = ls.phi[j] - 1.0;
    const RadialField u2 = picard_step(RadialField(g, u), m, sig);
    double change = 0;
    for (std::size_t j = 0; j < g.n(); ++j) change = std::max(change, std::fabs(u2[j] - u[j]));
    // phi comes back audit-polished, which sits an O(h^2) operator-mismatch
    // away from the pure Picard fixed point
    CHECK(change < 1e-5);

    // contraction factor < 1 for random small u, v
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> U(-0.05, 0.05);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> ua(g.n()), va(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double bump = std::exp(-g.rho(j));
            ua[j] = U(rng) * bump;
            va[j] = U(rng) * bump;
        }
        const RadialField Gu = picard_step(RadialField(g, ua), m, sig);
        const RadialField Gv = picard_step(RadialField(g, va), m, sig);
        double num = 0, den = 0;
        for (std::size_t j = 0; j < g.n(); ++j) {
            num = std::max(num, std::fabs(Gu[j] - Gv[j]));
            den = std::max(den, std::fabs(ua[j] - va[j]));
        }
        CHECK(num / den < 1.0);
    }

    // Q(u) - Q(v) matches the truncated power-difference expansion:
    // (1+u)^5 - (1+v)^5 - 5(u-v) = (u-v) sum_{l=2..5} C(5,l) G_l,
    // (1+u)^-7 - (1+v)^-7 + 7(u-v) = (u-v) sum_{l=2..12} (-1)^l C(l+6,6) G_l,
    // G_l(u,v) = u^{l-1} + u^{l-2} v + ... + v^{l-1}.
    std::uniform_real_distribution<double> U2(-0.1, 0.1);
    auto G = [](int l, double uu, double vv) {
        double s = 0;
        for (int i = 0; i < l; ++i) s += std::pow(uu, l - 1 - i) * std::pow(vv, i);
        return s;
    };
    auto binom = [](int a, int b) {
        double r = 1;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const double uu = U2(rng), vv = U2(rng), s2 = 0.1;
        const double q1u = std::pow(1 + uu, 5) - 1 - 5 * uu;
        const double q1v = std::pow(1 + vv, 5) - 1 - 5 * vv;
        const double q2u = std::pow(1 + uu, -7) - 1 + 7 * uu;
        const double q2v = std::pow(1 + vv, -7) - 1 + 7 * vv;
        const double Qu = s2 / 8 * q2u - 0.75 * q1u;
        const double Qv = s2 / 8 * q2v - 0.75 * q1v;
        double sum1 = 0;
        for (int l = 2; l <= 5; ++l) sum1 += binom(5, l) * G(l, uu, vv);
        double sum2 = 0;
        for (int l = 2; l <= 12; ++l)
            sum2 += ((l % 2 == 0) ? 1.0 : -1.0) * binom(l + 6, 6) * G(l, uu, vv);
        const double series = (uu - vv) * (s2 / 8 * sum2 - 0.75 * sum1);
        CHECK(std::fabs((Qu - Qv) - series) < 1e-10);
    }
}

TEST_CASE("lichnerowicz solve: trivial hyperbolic case") {
    RadialGrid g(2048, 0.5);
    const RadialMetric m = hyperbolic_delta_chart(g);
    const LichnerowiczSolution ls = solve_lichnerowicz(m, RadialTT::zero(g, Frame::physical));
    CHECK(ls.report.iterations == 0); // no corrections above tolerance
    double sup = 0;
    for (std::size_t j = 0; j < g.n(); ++j) sup = std::max(sup, std::fabs(ls.phi[j] - 1.0));
    CHECK(sup < 1e-8);
    CHECK(ls.report.audit_residual_sup < 1e-7);
}

TEST_CASE("discrete linearized operator is negative definite (Cholesky pivots)") {
    RadialGrid g(1024, 2.0);
    const RadialMetric m = generic_seed_metric(g, 0.3);
    const FluxLaplacian L = flux_laplacian(m);
    const RadialField R = scalar_curvature(m, Frame::physical);
    // -(w L - w(3+kappa)) should be positive definite in the weighted product;
    // LDL^T pivots of the symmetrized tridiagonal must all be positive.
    const std::size_t n = g.n();
    std::vector<double> di(n), off(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double kap = (R[j] + 6.0) / 8.0;
        di[j] = -(L.A.di[j] - L.w[j] * (3.0 + kap));
    }
    for (std::size_t j = 0; j + 1 < n; ++j) off[j] = -0.5 * (L.A.up[j] + L.A.lo[j + 1]);
    double piv = di[0];
    bool all_pos = piv > 0;
    for (std::size_t j = 1; j < n; ++j) {
        piv = di[j] - off[j - 1] * off[j - 1] / piv;
        if (!(piv > 0)) { all_pos = false; break; }
    }
    CHECK(all_pos);
}

TEST_CASE("deterministic solves: bitwise identical outputs") {
    RadialGrid g(512, 2.0);
    const RadialMetric m = slab_metric(g);
    const MomentumSolution a = solve_momentum(m, band_mu_bar(g));
    const MomentumSolution b = solve_momentum(m, band_mu_bar(g));
    for (std::size_t j = 0; j < g.n(); ++j) CHECK(a.W[j] == b.W[j]);
    const RadialMetric ms = generic_seed_metric(RadialGrid(512, 2.0), 0.3);
    const LichnerowiczSolution l1 = solve_lichnerowicz(ms, RadialTT::zero(ms.grid(), Frame::physical));
    const LichnerowiczSolution l2 = solve_lichnerowicz(ms, RadialTT::zero(ms.grid(), Frame::physical));
    for (std::size_t j = 0; j < ms.grid().n(); ++j) CHECK(l1.phi[j] == l2.phi[j]);
}
