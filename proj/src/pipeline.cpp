#include "hypforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace hypforge {

RadialMetric generic_seed_metric(const RadialGrid& g, double alpha) {
    if (std::fabs(g.rho_c() - 2.0) > 1e-14)
        throw pipeline_error("generic_seed_metric: rho_c must be 2");
    const std::size_t n = g.n();
    const double rc = 2.0;
    const double Ac = 1.0 + alpha;
    // p(y) = 1 + p1 y + p2 y^2 + p3 y^3 in y = s^2 with
    //   p(4) = P0, p'(4) = P0 (2 alpha - 1)/8, p''(4) = P0 (4a^2 - 5a + 3)/32...
    const double P0 = 1.0 / (2.0 * Ac); // => b(0) = 1
    const double P1 = P0 * (2.0 * alpha - 1.0) / 8.0;
    const double P2 = P0 * (4.0 * alpha * alpha - 5.0 * alpha + 3.0) / 64.0;
    // solve [4 16 64; 1 8 48; 0 2 24] (p1,p2,p3) = (P0-1, P1, P2)
    const double M[3][3] = {{4, 16, 64}, {1, 8, 48}, {0, 2, 24}};
    const double rhs[3] = {P0 - 1.0, P1, P2};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
             - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
             + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double D = det3(M);
    double p[3];
    for (int i = 0; i < 3; ++i) {
        double Mi[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) Mi[r][c] = (c == i) ? rhs[r] : M[r][c];
        p[i] = det3(Mi) / D;
    }
    std::vector<double> a(n), b(n), da(n), d2a(n), db(n), d2b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = g.rho(j), s = rc - rho, y = s * s;
        a[j] = 1.0 + (alpha / 4.0) * rho * (2.0 * rc - rho);
        da[j] = (alpha / 4.0) * (2.0 * rc - 2.0 * rho);
        d2a[j] = -alpha / 2.0;
        const double pv = 1.0 + p[0] * y + p[1] * y * y + p[2] * y * y * y;
        const double dp = 2.0 * p[0] * s + 4.0 * p[1] * s * y + 6.0 * p[2] * s * y * y; // d/ds
        const double d2p = 2.0 * p[0] + 12.0 * p[1] * y + 30.0 * p[2] * y * y;
        b[j] = Ac * s * pv;
        db[j] = -Ac * (pv + s * dp);
        d2b[j] = Ac * (2.0 * dp + s * d2p);
    }
    RadialMetric m(g, std::move(a), std::move(b), true);
    m.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return m;
}


namespace {

// expansion-audit window: inside [0, eps] (where lambda_eps is exactly the
// background product metric) and capped near the boundary; at least 3x as
// many nodes as the 4-term fit basis
double audit_window_hi(const RadialGrid& g, double eps) {
    return std::max(12.0 * g.h(), std::min(0.95 * eps, 0.01 * g.rho_c()));
}

double log_rel_of(const RadialGrid& g, const std::vector<double>& y,
                  const std::vector<FitExponent>& exps, std::size_t lead_idx,
                  std::size_t log_idx, double hi) {
    double prof_sup = 0;
    for (double v : y) prof_sup = std::max(prof_sup, std::fabs(v));
    if (prof_sup < 1e-14) return 0.0;
    const FitResult fr = fit_expansion(g.nodes(), y, exps, g.h(), hi);
    return std::fabs(fr.coefficients[log_idx])
         / std::max(std::fabs(fr.coefficients[lead_idx]), 1e-300);
}

} // namespace

namespace {

// trace-free source concentrated at the boundary: profile of Sigma-bar in the
// bar frame is s0 * psi(rho/width) with psi = 1 on [0, 1/2], 0 beyond 1.
std::vector<double> spike_sbar(const RadialGrid& g, double s0, double width) {
    std::vector<double> out(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) {
        const StepJet st = smooth_step(2.0 * g.rho(j) / width - 1.0);
        out[j] = s0 * (1.0 - st.value);
    }
    return out;
}

} // namespace

InputData generate_input(const InputDataSpec& spec, const EllipticConfig& cfg) {
    RadialGrid g(spec.n, spec.name == "hyperbolic" ? 0.5 : 2.0);
    RadialMetric lambda = spec.name == "hyperbolic" ? hyperbolic_delta_chart(g)
                        : spec.name == "generic"    ? generic_seed_metric(g, spec.alpha)
                        : throw pipeline_error("generate_input: unknown seed '" + spec.name + "'");

    // seed source: mu with q_mu(physical lambda frame) = rho * sbar
    std::vector<double> sbar = spec.name == "hyperbolic"
                                   ? std::vector<double>(g.n(), 0.0)
                                   : spike_sbar(g, spec.spike_s0, spec.spike_width);
    std::vector<double> q_mu(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) q_mu[j] = g.rho(j) * sbar[j];
    RadialTT mu(g, std::move(q_mu), Frame::physical);
    RadialTT sigma = mu;
    if (spec.project_momentum) {
        // In the radial reduction every center-regular divergence-free TT field
        // vanishes at the boundary, so projecting removes exactly the boundary
        // shear the generic seed is designed to carry. Reject rather than
        // silently produce shear-free data.
        if (spec.name == "generic")
            throw pipeline_error("generate_input: momentum projection of a boundary-supported "
                                 "source annihilates its boundary shear; use a band source");
        MomentumSolution ms = solve_momentum(lambda, RadialField(g, sbar), cfg);
        sigma = ms.sigma;
    }

    LichnerowiczSolution ls = solve_lichnerowicz(lambda, sigma, cfg);
    PhysicalData pd = conformal_assemble(lambda, ls.phi, sigma);

    InputData in{pd.g, pd.Sigma, ls.phi, lambda, ls.report, 0, 0, 0,
                 spec.name == "hyperbolic"};
    const ConstraintResiduals cr = constraint_residuals(pd.g, pd.Sigma);
    in.hamiltonian_residual = cr.hamiltonian.sup();
    in.momentum_residual = cr.momentum_norm.sup();
    // boundary shear of the input: Sbar profile = q_Sigma(phys)/rho
    std::vector<double> qbar(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) qbar[j] = pd.Sigma[j] / g.rho(j);
    const ShearResidual sr = shear_residual(pd.g, RadialTT(g, std::move(qbar), Frame::compactified));
    in.boundary_shear = sr.boundary_value;
    return in;
}

namespace {

std::size_t thread_budget(std::size_t jobs) {
    std::size_t cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("HYPFORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = std::size_t(v);
    }
    return std::max<std::size_t>(1, std::min(cap, jobs));
}

void run_one_eps(const InputData& input, const FamilyEntry& fe, const EllipticConfig& cfg,
                 EpsOutput& out) {
    const RadialGrid& g = fe.lambda.grid();
    out.eps = fe.eps;
    out.lambda = fe.lambda;
    out.mu = fe.mu;
    MomentumSolution ms = solve_momentum(fe.lambda, fe.mu_bar, cfg);
    out.W = ms.W;
    out.sigma = ms.sigma;
    out.momentum_report = ms.report;

    LichnerowiczSolution ls = solve_lichnerowicz(fe.lambda, ms.sigma, cfg);
    out.phi = ls.phi;
    out.lich_report = ls.report;
    out.picard_iters = ls.report.iterations;

    PhysicalData pd = conformal_assemble(fe.lambda, ls.phi, ms.sigma);
    out.gbar_out = pd.g;
    out.Sigma_out = pd.Sigma;

    // residuals of the assembled output
    const ConstraintResiduals cr = constraint_residuals(pd.g, pd.Sigma);
    out.ham_residual = cr.hamiltonian.sup();
    out.mom_residual = cr.momentum_norm.sup();

    // convergence norms against the input
    const RadialSym2 dg = metric_difference(pd.g, input.gbar);
    out.norm_g_diff = diff_norm_c0(input.gbar, dg);
    out.norm_g_diff_c1 = diff_norm_c1(input.gbar, dg);
    const RadialSym2 K_out = extrinsic_curvature(pd.g, pd.Sigma);
    const RadialSym2 K_in = extrinsic_curvature(input.gbar, input.Sigma);
    RadialSym2 dK{RadialField(g, std::vector<double>(g.n())),
                  RadialField(g, std::vector<double>(g.n()))};
    {
        std::vector<double> f1(g.n()), f2(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            f1[j] = K_out.f1[j] - K_in.f1[j];
            f2[j] = K_out.f2[j] - K_in.f2[j];
        }
        dK = RadialSym2{RadialField(g, std::move(f1)), RadialField(g, std::move(f2))};
    }
    out.norm_K_diff = diff_norm_c0(input.gbar, dK);
    out.norm_K_diff_c1 = diff_norm_c1(input.gbar, dK);

    // output boundary shear
    std::vector<double> qbar(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) qbar[j] = pd.Sigma[j] / g.rho(j);
    const ShearResidual sr = shear_residual(pd.g, RadialTT(g, std::move(qbar), Frame::compactified));
    out.shear_boundary = sr.boundary_value;

    // per-eps audit-quality log coefficients (the solver's own report fit
    // uses a fixed window that cannot know eps)
    try {
        const double hi = audit_window_hi(g, fe.eps);
        std::vector<double> uv(g.n()), wprof(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            uv[j] = ls.phi[j] - 1.0;
            wprof[j] = fe.lambda.a()[j] / g.rho(j) * ms.W[j];
        }
        out.log_coeff_phi = log_rel_of(g, uv, {{2, 0}, {3, 0}, {3, 1}, {4, 0}}, 0, 2, hi);
        out.log_coeff_W = log_rel_of(g, wprof, {{3, 0}, {3, 1}, {4, 0}, {4, 1}}, 0, 1, hi);
    } catch (const fit_error&) {
        out.log_coeff_W = ms.report.fitted_log_coefficient;
        out.log_coeff_phi = ls.report.fitted_log_coefficient;
    }
    out.ok = true;
}

} // namespace

ApproximationRun approximate(const InputData& input, const std::vector<double>& eps_list,
                             const EllipticConfig& cfg) {
    const RadialGrid& g = input.gbar.grid();
    RadialMetric background = input.exact_background
                                  ? input.gbar
                                  : make_background(input.gbar, 0.25 * g.rho_c());

    ApproximationRun run{input, background, {}};
    run.outputs.resize(eps_list.size(),
                       EpsOutput{0, false, "", input.gbar, RadialTT::zero(g, Frame::physical),
                                 RadialVector::zero(g), RadialTT::zero(g, Frame::physical),
                                 RadialField::zero(g), input.gbar,
                                 RadialTT::zero(g, Frame::physical), {}, {}});

    // each eps branch is independent; a failure is recorded and the run continues
    auto work = [&](std::size_t i) {
        run.outputs[i].eps = eps_list[i];
        try {
            FreeDataFamily fam = build_family(input.gbar, input.Sigma, {eps_list[i]}, background);
            run_one_eps(input, fam.entries[0], cfg, run.outputs[i]);
        } catch (const std::exception& e) {
            run.outputs[i].ok = false;
            run.outputs[i].error = e.what();
        }
    };
    const std::size_t nthreads = thread_budget(eps_list.size());
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < eps_list.size(); ++i) work(i);
    } else {
        std::mutex mtx;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        auto runner = [&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lk(mtx);
                    if (next >= eps_list.size()) return;
                    i = next++;
                }
                work(i);
            }
        };
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(runner);
        for (auto& th : pool) th.join();
    }
    return run;
}

std::vector<AuditEntry> smoothness_audit(const ApproximationRun& run, double log_flag_threshold) {
    std::vector<AuditEntry> out;
    const RadialGrid& g = run.input.gbar.grid();
    const double cap = 0.01 * g.rho_c();

    auto audit_field = [&](const std::string& label, const std::vector<double>& y,
                           const std::vector<FitExponent>& exps, std::size_t lead_idx,
                           std::size_t log_idx, double hi) {
        AuditEntry e;
        e.label = label;
        e.exponents = exps;
        try {
            const FitResult fr = fit_expansion(g.nodes(), y, exps, g.h(), hi);
            e.coefficients = fr.coefficients;
            e.fit_residual = fr.residual_rms;
            e.condition = fr.condition;
            e.leading = fr.coefficients[lead_idx];
            const double lead = std::fabs(e.leading);
            double prof_sup = 0;
            for (const double v : y) prof_sup = std::max(prof_sup, std::fabs(v));
            e.log_rel = (prof_sup < 1e-14)
                            ? 0.0
                            : std::fabs(fr.coefficients[log_idx]) / std::max(lead, 1e-300);
            e.flagged = e.log_rel > log_flag_threshold;
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        out.push_back(std::move(e));
    };

    // input conformal factor
    {
        std::vector<double> u(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) u[j] = run.input.phi_seed[j] - 1.0;
        audit_field("input:phi-1", u, {{2, 0}, {3, 0}, {3, 1}, {4, 0}}, 0, 2,
                    std::min(2 * cap, 0.1 * g.rho_c()));
    }
    for (const auto& o : run.outputs) {
        if (!o.ok) {
            AuditEntry e;
            e.label = "eps=" + std::to_string(o.eps);
            e.error = o.error;
            out.push_back(std::move(e));
            continue;
        }
        const double hi = audit_window_hi(g, o.eps);
        std::vector<double> u(g.n()), wprof(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) {
            u[j] = o.phi[j] - 1.0;
            wprof[j] = o.lambda.a()[j] / g.rho(j) * o.W[j];
        }
        audit_field("eps=" + std::to_string(o.eps) + ":phi-1", u,
                    {{2, 0}, {3, 0}, {3, 1}, {4, 0}}, 0, 2, hi);
        audit_field("eps=" + std::to_string(o.eps) + ":W", wprof,
                    {{3, 0}, {3, 1}, {4, 0}, {4, 1}}, 0, 1, hi);
    }
    return out;
}

} // namespace hypforge
