#include "cwkb/action.hpp"
#include "cwkb/config.hpp"
#include "cwkb/errors.hpp"
#include "cwkb/export.hpp"
#include "cwkb/limits.hpp"
#include "cwkb/spectrum.hpp"
#include "cwkb/stokes.hpp"
#include "cwkb/zeros.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace cwkb;

namespace {

ExportMeta meta_of(const RunConfig& cfg)
{
    return {cfg.command, digest_hex(cfg.digest), cfg.potential ? cfg.potential->text : ""};
}

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

SpectrumConfig spectrum_config(const RunConfig& cfg)
{
    SpectrumConfig sc;
    sc.tol_eig = cfg.tol_eig;
    sc.shoot.series_tol = cfg.series_tol;
    sc.shoot.cutoff = cfg.cutoff;
    sc.use_parity = cfg.use_parity;
    return sc;
}

int cmd_graph(const RunConfig& cfg)
{
    TraceConfig tc;
    tc.tol_line = cfg.tol_line;
    tc.bound_radius = cfg.bound_radius;
    auto g = build_graph(cfg.potential->poly, tc);
    write_file(out_path(cfg, "graph.json"), graph_json(g, meta_of(cfg)));
    int anti = 0;
    for (const auto& s : g.real_axis_segments)
        anti += s.kind == LineKind::anti_stokes;
    std::cout << "graph: " << g.finite_count() << " finite, " << g.unbounded_count() << " unbounded, "
              << g.real_axis_segments.size() << " real segments (" << anti << " anti-stokes)\n";
    return 0;
}

int cmd_spectrum(const RunConfig& cfg)
{
    const Poly& p = cfg.potential->poly;
    auto lay = real_layout(p);
    auto recs = eigenvalues(p, cfg.lambda_max, spectrum_config(cfg));
    write_file(out_path(cfg, "eigenvalues.csv"), eigen_csv(recs, lay, meta_of(cfg)));
    std::cout << "spectrum: " << recs.size() << " eigenvalues up to " << cfg.lambda_max << "\n";
    return 0;
}

std::vector<std::pair<std::string, LineFit>> fit_lines(const ZeroSet& zs, const Poly& p, Family fam,
                                                       const std::vector<double>& params, const RunConfig& cfg)
{
    std::vector<std::pair<std::string, LineFit>> fits;
    const Box& r = zs.region;
    const double w = cfg.kappa / zs.lambda;
    try {
        if (fam == Family::symmetric_double_well) {
            Box strip{std::max(r.x0, -w), std::min(r.x1, w), r.y0, r.y1};
            if (strip.x1 > strip.x0)
                fits.emplace_back("i(-inf,inf)", fit_zero_line(zs, p, params[0], strip, {0.0}, 1.0));
        } else if (fam == Family::one_well_quartic) {
            const double b = params[1];
            const double lo = b + exclusion_radius(p, cplx(0, b), zs.lambda);
            Box strip{std::max(r.x0, -w), std::min(r.x1, w), std::max(r.y0, lo), r.y1};
            if (strip.x1 > strip.x0 && strip.y1 > strip.y0)
                fits.emplace_back("i(b,inf)", fit_zero_line(zs, p, cplx(0, b), strip));
        }
    } catch (const Failure& f) {
        if (f.code() != Errc::TooFewZeros)
            throw;
        std::cout << "fit: skipped (" << f.what() << ")\n";
    }
    return fits;
}

int cmd_zeros(const RunConfig& cfg)
{
    const Poly& p = cfg.potential->poly;
    auto recs = eigenvalues(p, cfg.lambda_max, spectrum_config(cfg));
    if (recs.empty())
        throw ConfigError("spectrum.lambda_max", "no eigenvalue below lambda_max");
    std::size_t idx = recs.size() - 1;
    if (cfg.index) {
        if (*cfg.index >= static_cast<int>(recs.size()))
            throw ConfigError("zeros.index", "only " + std::to_string(recs.size()) + " eigenvalues below lambda_max");
        idx = static_cast<std::size_t>(*cfg.index);
    }
    const Box region = *cfg.region;
    const double extent = std::max(std::abs(region.x0), std::abs(region.x1)) * 1.05;
    auto f = Eigenfunction::build(p, recs[idx], extent, spectrum_config(cfg).shoot);
    LocateConfig lc;
    lc.residual_tol = cfg.residual_tol;
    auto zs = locate_zeros(f, region, lc);
    const auto meta = meta_of(cfg);
    std::cout << "zeros: " << zs.zeros.size() << " zeros at lambda_" << recs[idx].n << " = " << zs.lambda << "\n";

    const auto& spec = *cfg.potential;
    if (!spec.family || spec.family_params.empty()) {
        std::cout << "comparison: skipped (no recognized family)\n";
        write_file(out_path(cfg, "zeros.json"), zeroset_json(zs, meta, "skipped"));
        return 0;
    }
    MeasureConfig mc;
    mc.kappa = cfg.kappa;
    mc.arc_mass = cfg.arc_mass;
    auto lines = predicted_zero_lines(*spec.family, spec.family_params);
    if (*spec.family == Family::nonsymmetric_double_well) {
        for (int set = 1; set <= 2; ++set) {
            auto chosen = select_set(lines, set);
            auto rep = compare_measure(zs, p, chosen, mc);
            std::string stem = "measure_gamma" + std::to_string(set);
            write_file(out_path(cfg, stem + ".csv"), measure_csv(rep, meta));
            write_file(out_path(cfg, stem + ".json"), measure_json(rep, chosen, {}, meta));
            std::cout << "gamma" << set << ": matched " << rep.matched << ", unmatched " << rep.unmatched.size()
                      << ", max distance*lambda " << rep.max_distance * rep.lambda << "\n";
        }
        write_file(out_path(cfg, "zeros.json"), zeroset_json(zs, meta, "measure_gamma1.json,measure_gamma2.json"));
        return 0;
    }
    auto rep = compare_measure(zs, p, lines, mc);
    auto fits = fit_lines(zs, p, *spec.family, spec.family_params, cfg);
    write_file(out_path(cfg, "measure.csv"), measure_csv(rep, meta));
    write_file(out_path(cfg, "measure.json"), measure_json(rep, lines, fits, meta));
    write_file(out_path(cfg, "zeros.json"), zeroset_json(zs, meta, "measure.json"));
    std::cout << "comparison: matched " << rep.matched << ", unmatched " << rep.unmatched.size()
              << ", max distance*lambda " << rep.max_distance * rep.lambda << ", max arc error "
              << rep.max_relative_error << "\n";
    for (const auto& [label, fit] : fits)
        std::cout << "fit " << label << ": c_fit " << fit.c_fit << ", rms " << fit.residual_rms << ", median gap "
                  << fit.median_gap << "\n";
    return 0;
}

std::array<double, 4> roots_of(const RunConfig& cfg)
{
    const auto& r = cfg.potential->roots;
    return {r[0], r[1], r[2], r[3]};
}

int cmd_density(const RunConfig& cfg)
{
    auto roots = roots_of(cfg);
    if (cfg.ratio) {
        CalibrateConfig cc;
        cc.tol = cfg.calibrate_tol;
        roots = calibrate_ratio({roots, cfg.free_index, 1.0}, *cfg.ratio, cc);
    }
    Poly p = Poly::from_roots(std::vector<cplx>(roots.begin(), roots.end()), 1.0);
    DoubleWellData d{well_action(p, roots[0], roots[1]), well_action(p, roots[2], roots[3]),
                     barrier_action(p, roots[1], roots[2])};
    auto seq = leading_sequence(d, cfg.count);
    auto rep = subsequence_density(d, cfg.delta, seq);
    const auto meta = meta_of(cfg);
    write_file(out_path(cfg, "density.csv"), density_csv(rep, meta));
    write_file(out_path(cfg, "density.json"), density_json(rep, d, meta));
    std::cout << "density: rho " << rep.rho << " (" << to_string(rep.form.cls) << ")\n";
    for (const auto& s : rep.sequences)
        std::cout << "sequence " << s.sequence << ": " << s.flagged << "/" << s.size << " = " << s.empirical
                  << ", predicted " << s.predicted << "\n";
    return 0;
}

int cmd_calibrate(const RunConfig& cfg)
{
    auto before = roots_of(cfg);
    CalibrateConfig cc;
    cc.tol = cfg.calibrate_tol;
    auto after = calibrate_ratio({before, cfg.free_index, 1.0}, cfg.target, cc);
    double achieved = action_ratio(after);
    write_file(out_path(cfg, "calibration.json"), calibration_json(before, after, cfg.target, achieved, meta_of(cfg)));
    std::cout.precision(17);
    std::cout << "calibrate: roots " << after[0] << "," << after[1] << "," << after[2] << "," << after[3]
              << " ratio " << achieved << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Complex WKB laboratory: Stokes graphs, spectra, complex zeros"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    app.add_option("--config", config_path, "INI-style configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", sets, "override section.key=value (repeatable)");
    const std::pair<const char*, const char*> mapped[] = {
        {"--lambda-max", "spectrum.lambda_max"}, {"--region", "zeros.region"},
        {"--family", "potential.family"},        {"--params", "potential.params"},
        {"--coefficients", "potential.coefficients"}, {"--roots", "potential.roots"},
        {"--delta", "density.delta"},            {"--count", "density.count"},
        {"--ratio", "density.ratio"},            {"--target", "calibrate.target"},
        {"--index", "zeros.index"},              {"--tol-eig", "spectrum.tol_eig"},
        {"--series-tol", "spectrum.series_tol"}, {"--cutoff", "spectrum.cutoff"},
        {"--tol-line", "graph.tol_line"},        {"--residual-tol", "zeros.residual_tol"},
        {"--kappa", "zeros.kappa"},              {"--arc-mass", "zeros.arc_mass"},
    };
    for (const auto& [flag, key] : mapped)
        app.add_option(flag, flags[key], std::string("sets ") + key);

    const char* commands[][2] = {{"graph", "trace the Stokes graph"},
                                 {"spectrum", "compute eigenvalues up to lambda_max"},
                                 {"zeros", "locate complex zeros and compare with predicted lines"},
                                 {"density", "subsequence densities for a non-symmetric double well"},
                                 {"calibrate", "move one root so that the well-action ratio hits a target"}};
    for (const auto& c : commands)
        app.add_subcommand(c[0], c[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        Settings s;
        if (!config_path.empty())
            s = read_settings(config_path);
        for (const auto& [key, value] : flags)
            if (!value.empty())
                s[key] = value;
        if (!out_dir.empty())
            s["output.dir"] = out_dir;
        for (const auto& a : sets)
            apply_override(s, a);
        cfg = resolve(command, s);
        std::filesystem::create_directories(cfg.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (command == "graph")
            return cmd_graph(cfg);
        if (command == "spectrum")
            return cmd_spectrum(cfg);
        if (command == "zeros")
            return cmd_zeros(cfg);
        if (command == "density")
            return cmd_density(cfg);
        return cmd_calibrate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Failure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
