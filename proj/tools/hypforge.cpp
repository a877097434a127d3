// hypforge: construct and audit shear-free smoothly compactifiable CMC vacuum
// data approximating a given asymptotically hyperbolic radial data set.
//
// Subcommands: indicial | generate | approximate | verify | study

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "hypforge/config.hpp"
#include "hypforge/diagnostics.hpp"
#include "hypforge/elliptic.hpp"
#include "hypforge/fitting.hpp"
#include "hypforge/geometry.hpp"
#include "hypforge/indicial.hpp"
#include "hypforge/io.hpp"
#include "hypforge/pipeline.hpp"
#include "hypforge/svg.hpp"
#include "hypforge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hypforge;

namespace {

constexpr int kExitOk = 0, kExitInternal = 1, kExitThreshold = 2;

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& command,
                    const json& extra = json::object()) {
    json m;
    m["schema"] = "v1";
    m["tool"] = "hypforge";
    m["version"] = kVersion;
    m["command"] = command;
    m["config_hash"] = fnv1a(cfg.canonical_toml());
    m["grid_n"] = cfg.grid_n;
    m["timestamp"] = now_iso8601(); // timestamps live only here
    for (auto& [k, v] : extra.items()) m[k] = v;
    atomic_write(dir / "manifest.json", m.dump(2) + "\n");
}

InputDataSpec spec_from_config(const RunConfig& cfg) {
    InputDataSpec spec;
    spec.name = cfg.seed_name;
    spec.n = cfg.grid_n;
    spec.alpha = cfg.seed_alpha;
    spec.spike_s0 = cfg.spike_s0;
    spec.spike_width = cfg.spike_width;
    return spec;
}

// wall times are timestamp-like and live only in the manifest, keeping the
// rest of the run directory bitwise deterministic
json report_json(const SolveReport& r) {
    json j = {{"residual_sup", r.residual_sup},
              {"audit_residual_sup", r.audit_residual_sup},
              {"iterations", r.iterations},
              {"newton_iterations", r.newton_iterations},
              {"contraction_factor", r.contraction_factor},
              {"method", r.method}};
    if (std::isfinite(r.fitted_decay_exponent)) j["fitted_decay_exponent"] = r.fitted_decay_exponent;
    if (std::isfinite(r.fitted_log_coefficient)) j["fitted_log_coefficient"] = r.fitted_log_coefficient;
    return j;
}

void save_input(const fs::path& dir, const InputData& in) {
    atomic_write(dir / "g_metric.json", metric_to_json(in.gbar).dump(2) + "\n");
    write_profile_csv(dir / "a.csv", in.gbar.grid(), in.gbar.a());
    write_profile_csv(dir / "beta.csv", in.gbar.grid(), in.gbar.b());
    write_profile_csv(dir / "sigma_q.csv", in.gbar.grid(), in.Sigma.profile());
    write_profile_csv(dir / "phi_seed.csv", in.gbar.grid(), in.phi_seed.values());
    atomic_write(dir / "lambda_seed.json", metric_to_json(in.lambda_seed).dump(2) + "\n");
    json audit;
    audit["schema"] = "v1";
    audit["hamiltonian_residual"] = in.hamiltonian_residual;
    audit["momentum_residual"] = in.momentum_residual;
    audit["boundary_shear"] = in.boundary_shear;
    audit["exact_background"] = in.exact_background;
    audit["lichnerowicz_report"] = report_json(in.lich_report);
    atomic_write(dir / "input_audit.json", audit.dump(2) + "\n");
}

InputData load_input(const fs::path& dir) {
    std::ifstream gm(dir / "g_metric.json");
    if (!gm) throw io_error("cannot open " + (dir / "g_metric.json").string());
    json j = json::parse(gm);
    RadialMetric gbar = metric_from_json(j);
    auto [gq, qs] = read_profile_csv(dir / "sigma_q.csv");
    if (!(gq == gbar.grid())) throw io_error("sigma_q.csv grid mismatch");
    auto [gp, phis] = read_profile_csv(dir / "phi_seed.csv");
    std::ifstream lm(dir / "lambda_seed.json");
    RadialMetric lambda = metric_from_json(json::parse(lm));
    std::ifstream am(dir / "input_audit.json");
    json audit = json::parse(am);
    InputData in{std::move(gbar), RadialTT(gq, std::move(qs), Frame::physical),
                 RadialField(gp, std::move(phis)), std::move(lambda), SolveReport{},
                 audit.value("hamiltonian_residual", 0.0), audit.value("momentum_residual", 0.0),
                 audit.value("boundary_shear", 0.0), audit.value("exact_background", false)};
    return in;
}

int cmd_indicial() {
    std::cout << "operator            polynomial      roots    indicial radius  window\n";
    for (auto kind : {OperatorKind::VectorLaplacian, OperatorKind::LichnerowiczLinear}) {
        const IndicialPolynomial p = indicial_polynomial(kind);
        const CharacteristicData cd = characteristic_data(p);
        const char* name = kind == OperatorKind::VectorLaplacian ? "vector Laplacian  "
                                                                 : "Lichnerowicz shift";
        std::cout << name << "  s^2";
        if (!p.c1().is_zero()) std::cout << (p.c1() < Rational(0) ? " - " : " + ")
                                         << (p.c1() < Rational(0) ? (-p.c1()).str() : p.c1().str())
                                         << " s";
        if (!p.c0().is_zero()) std::cout << (p.c0() < Rational(0) ? " - " : " + ")
                                         << (p.c0() < Rational(0) ? (-p.c0()).str() : p.c0().str());
        std::cout << "   {" << cd.exponents[0].str() << ", " << cd.exponents[1].str() << "}"
                  << "    R = " << cd.indicial_radius.str() << "        delta in ("
                  << cd.window_lo.str() << ", " << cd.window_hi.str() << ")\n";
    }
    return kExitOk;
}

int cmd_generate(const RunConfig& cfg) {
    const fs::path dir = fs::path(cfg.out_dir) / "input";
    InputData in = generate_input(spec_from_config(cfg), cfg.solver);
    save_input(dir, in);
    write_manifest(dir, cfg, "generate",
                   {{"hamiltonian_residual", in.hamiltonian_residual},
                    {"momentum_residual", in.momentum_residual},
                    {"boundary_shear", in.boundary_shear}});
    std::cout << "input written to " << dir << "\n"
              << "  hamiltonian residual  " << in.hamiltonian_residual << "\n"
              << "  momentum residual     " << in.momentum_residual << "\n"
              << "  boundary shear        " << in.boundary_shear << "\n";
    return kExitOk;
}

int cmd_approximate(const RunConfig& cfg, const fs::path& input_dir) {
    InputData in = load_input(input_dir);
    ApproximationRun run = approximate(in, cfg.epsilons, cfg.solver);
    const fs::path dir = fs::path(cfg.out_dir) / "run";

    // study table
    std::vector<std::vector<double>> rows;
    std::vector<double> eps_ok, gdiff, Kdiff;
    bool all_ok = true;
    json per_eps = json::array();
    for (const auto& o : run.outputs) {
        if (!o.ok) {
            all_ok = false;
            per_eps.push_back({{"eps", o.eps}, {"error", o.error}});
            continue;
        }
        rows.push_back({o.eps, o.norm_g_diff, o.norm_K_diff, o.shear_boundary, o.log_coeff_W,
                        o.log_coeff_phi, double(o.picard_iters)});
        eps_ok.push_back(o.eps);
        gdiff.push_back(o.norm_g_diff);
        Kdiff.push_back(o.norm_K_diff);
        const std::string tag = "eps_" + format_double(o.eps);
        write_profile_csv(dir / (tag + "_a.csv"), o.gbar_out.grid(), o.gbar_out.a());
        write_profile_csv(dir / (tag + "_beta.csv"), o.gbar_out.grid(), o.gbar_out.b());
        write_profile_csv(dir / (tag + "_q.csv"), o.gbar_out.grid(), o.Sigma_out.profile());
        write_profile_csv(dir / (tag + "_phi.csv"), o.phi.grid(), o.phi.values());
        write_profile_csv(dir / (tag + "_W.csv"), o.W.grid(), o.W.component());
        per_eps.push_back({{"eps", o.eps},
                           {"ham_residual", o.ham_residual},
                           {"mom_residual", o.mom_residual},
                           {"shear_boundary", o.shear_boundary},
                           {"momentum_report", report_json(o.momentum_report)},
                           {"lichnerowicz_report", report_json(o.lich_report)}});
    }
    {
        json fam;
        fam["schema"] = "v1";
        fam["epsilons"] = cfg.epsilons;
        fam["glue"] = cfg.glue_fraction * run.input.gbar.grid().rho_c();
        json files = json::object();
        for (const auto& o : run.outputs) {
            if (!o.ok) continue;
            const std::string tag = "eps_" + format_double(o.eps);
            files[tag] = {tag + "_a.csv", tag + "_beta.csv", tag + "_q.csv",
                          tag + "_phi.csv", tag + "_W.csv"};
        }
        fam["files"] = files;
        atomic_write(dir / "family.json", fam.dump(2) + "\n");
    }
    {
        std::ostringstream os;
        os << "epsilon,norm_g_diff,norm_K_diff,shear_residual,log_coeff_W,log_coeff_phi,picard_iters\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
            os << '\n';
        }
        atomic_write(dir / "study.csv", os.str());
    }
    write_table(dir / "study.dat",
                {"epsilon", "norm_g_diff", "norm_K_diff", "shear_residual", "log_coeff_W",
                 "log_coeff_phi", "picard_iters"}, rows);

    int exit_code = kExitOk;
    json summary;
    if (eps_ok.size() >= 3) {
        const RateFit sg = rate_fit(eps_ok, gdiff);
        const RateFit sK = rate_fit(eps_ok, Kdiff);
        summary["slope_g"] = sg.slope;
        summary["slope_K"] = sK.slope;
        write_svg_plot(dir / "study.svg", "approximation error vs eps",
                       {{"|g_eps - g|", eps_ok, gdiff}, {"|K_eps - K|", eps_ok, Kdiff}}, true);
        const bool slopes_ok = sg.slope >= cfg.slope_lo && sg.slope <= cfg.slope_hi
                            && sK.slope >= cfg.slope_lo && sK.slope <= cfg.slope_hi;
        bool shear_ok = true, resid_ok = true;
        for (const auto& o : run.outputs) {
            if (!o.ok) continue;
            if (in.boundary_shear > 0 && o.shear_boundary > cfg.shear_ratio_max * in.boundary_shear)
                shear_ok = false;
            if (o.ham_residual > cfg.residual_max || o.mom_residual > cfg.residual_max)
                resid_ok = false;
        }
        summary["slopes_in_window"] = slopes_ok;
        summary["shear_ok"] = shear_ok;
        summary["residuals_ok"] = resid_ok;
        if (!(slopes_ok && shear_ok && resid_ok && all_ok)) exit_code = kExitThreshold;
        std::cout << "slopes: g " << sg.slope << ", K " << sK.slope << "; shear "
                  << (shear_ok ? "ok" : "FAIL") << "; residuals " << (resid_ok ? "ok" : "FAIL")
                  << "\n";
    } else {
        exit_code = kExitThreshold;
    }
    summary["outputs"] = per_eps;
    atomic_write(dir / "summary.json", summary.dump(2) + "\n");
    json timings = json::array();
    for (const auto& o : run.outputs)
        if (o.ok) timings.push_back({{"eps", o.eps},
                                     {"momentum_s", o.momentum_report.wall_time_s},
                                     {"lichnerowicz_s", o.lich_report.wall_time_s}});
    write_manifest(dir, cfg, "approximate",
                   {{"input_dir", input_dir.string()}, {"timings", timings}});
    std::cout << "run written to " << dir << "\n";
    return exit_code;
}

int cmd_verify(const fs::path& dir) {
    // recompute residuals from the stored files alone (metric JSON carries the
    // derivative profiles; the CSVs must agree with it bitwise)
    auto [ga, av] = read_profile_csv(dir / "a.csv");
    auto [gb, bv] = read_profile_csv(dir / "beta.csv");
    auto [gq, qv] = read_profile_csv(dir / "sigma_q.csv");
    if (!(ga == gb) || !(ga == gq)) throw io_error("verify: grids disagree across profiles");
    std::ifstream gm(dir / "g_metric.json");
    if (!gm) throw io_error("verify: missing g_metric.json");
    RadialMetric g = metric_from_json(json::parse(gm));
    if (!(g.grid() == ga)) throw io_error("verify: metric JSON grid disagrees with CSVs");
    for (std::size_t j = 0; j < ga.n(); ++j)
        if (g.a()[j] != av[j] || g.b()[j] != bv[j])
            throw io_error("verify: CSV profiles disagree with g_metric.json at row "
                           + std::to_string(j + 2));
    RadialTT Sigma(ga, qv, Frame::physical);
    const ConstraintResiduals cr = constraint_residuals(g, Sigma);
    std::vector<double> qbar(ga.n());
    for (std::size_t j = 0; j < ga.n(); ++j) qbar[j] = Sigma[j] / ga.rho(j);
    const ShearResidual sr = shear_residual(g, RadialTT(ga, std::move(qbar), Frame::compactified));

    json rep;
    rep["schema"] = "v1";
    rep["hamiltonian_residual"] = cr.hamiltonian.sup();
    rep["momentum_residual"] = cr.momentum_norm.sup();
    rep["boundary_shear"] = sr.boundary_value;
    rep["boundary_shear_hessian_form"] = sr.hessian_form_boundary_value;

    double stored_ham = -1, stored_mom = -1;
    std::ifstream am(dir / "input_audit.json");
    if (am) {
        json audit = json::parse(am);
        stored_ham = audit.value("hamiltonian_residual", -1.0);
        stored_mom = audit.value("momentum_residual", -1.0);
        rep["stored_hamiltonian_residual"] = stored_ham;
        rep["stored_momentum_residual"] = stored_mom;
        rep["reproduces_stored"] =
            std::fabs(stored_ham - cr.hamiltonian.sup()) <= 1e-12 * (1 + std::fabs(stored_ham))
            && std::fabs(stored_mom - cr.momentum_norm.sup()) <= 1e-12 * (1 + std::fabs(stored_mom));
    }
    atomic_write(dir / "verify.json", rep.dump(2) + "\n");
    std::cout << rep.dump(2) << "\n";
    return kExitOk;
}

int cmd_study(const RunConfig& cfg) {
    // end-to-end: generate the input, run the family, emit tables and plots
    InputData in = generate_input(spec_from_config(cfg), cfg.solver);
    const fs::path dir = fs::path(cfg.out_dir) / "input";
    save_input(dir, in);
    write_manifest(dir, cfg, "study:generate");
    return cmd_approximate(cfg, dir);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypforge: shear-free conformally compact CMC data factory"};
    app.set_version_flag("--version", kVersion);

    std::string config_path, out_override, eps_override;
    std::size_t grid_override = 0;
    app.add_option("--config", config_path, "run configuration (TOML)");
    app.add_option("--out", out_override, "output directory override");
    app.add_option("--epsilons", eps_override, "comma-separated eps list override");
    app.add_option("--grid", grid_override, "grid size override");

    auto* sub_ind = app.add_subcommand("indicial", "print indicial data of the model operators");
    auto* sub_gen = app.add_subcommand("generate", "generate input data from the seed");
    auto* sub_app = app.add_subcommand("approximate", "run the approximation family on an input");
    std::string input_dir;
    sub_app->add_option("input", input_dir, "input directory (from generate)")->required();
    auto* sub_ver = app.add_subcommand("verify", "recompute residuals from files alone");
    std::string verify_dir;
    sub_ver->add_option("path", verify_dir, "directory with profile files")->required();
    auto* sub_stu = app.add_subcommand("study", "generate + approximate + study tables");
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (grid_override) cfg.grid_n = grid_override;
        if (!eps_override.empty()) {
            cfg.epsilons.clear();
            std::stringstream ss(eps_override);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.epsilons.push_back(std::stod(item));
        }
        if (sub_ind->parsed()) return cmd_indicial();
        if (sub_gen->parsed()) return cmd_generate(cfg);
        if (sub_app->parsed()) return cmd_approximate(cfg, input_dir);
        if (sub_ver->parsed()) return cmd_verify(verify_dir);
        if (sub_stu->parsed()) return cmd_study(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
