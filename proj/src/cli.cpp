#include "mirrorsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/catalog_io.hpp"
#include "mirrorsim/config.hpp"
#include "mirrorsim/cylinder_solver.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/gaussian_solver.hpp"
#include "mirrorsim/noise_synth.hpp"
#include "mirrorsim/plot_io.hpp"
#include "mirrorsim/scan_sim.hpp"
#include "mirrorsim/table_io.hpp"

namespace mirrorsim {

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    std::string plot;
    std::vector<std::string> catalogs;
    std::string spectrum;
    std::string map;
    std::string mode;
    bool add_noise = false;
    std::uint64_t seed = 1;
    std::optional<double> delta_nu_hz;
    std::optional<double> length_mm;
    std::optional<double> wavelength_nm;
};

RunConfig build_config(const Options& opt) {
    RunConfig cfg = opt.config_path.empty() ? RunConfig::parse("") : RunConfig::load(opt.config_path);
    for (const auto& s : opt.overrides) cfg.set(s);
    return cfg;
}

Material material_from(const RunConfig& cfg) {
    if (cfg.has("material.file")) {
        if (cfg.has("material.name")) throw UsageError("set either material.name or material.file, not both");
        return load_material_file(cfg.text("material.file", ""));
    }
    return load_material(cfg.text("material.name", "fused_silica"));
}

Environment environment_from(const RunConfig& cfg) { return Environment(cfg.number("environment.temperature_k", 300.0)); }

OpticalBeam beam_from(const RunConfig& cfg) {
    const double wavelength = cfg.number("beam.wavelength_nm", 810.0) * 1e-9;
    double waist = cfg.number("beam.waist_um", 62.5) * 1e-6;
    if (cfg.has("beam.cavity_length_mm") || cfg.has("beam.coupler_radius_mm")) {
        if (cfg.has("beam.waist_um")) throw UsageError("set beam.waist_um or the cavity parameters, not both");
        const auto length = cfg.number("beam.cavity_length_mm");
        const auto radius = cfg.number("beam.coupler_radius_mm");
        if (!length || !radius) throw UsageError("cavity waist needs both beam.cavity_length_mm and beam.coupler_radius_mm");
        waist = cavity_waist(*length * 1e-3, *radius * 1e-3, wavelength);
    }
    return OpticalBeam(waist, wavelength, {cfg.number("beam.x_mm", 0.0) * 1e-3, cfg.number("beam.y_mm", 0.0) * 1e-3});
}

PlanoConvexGeometry mirror_from(const RunConfig& cfg) {
    return PlanoConvexGeometry(cfg.number("mirror.diameter_mm", 25.4) * 1e-3,
                               cfg.number("mirror.curvature_mm", 150.0) * 1e-3,
                               cfg.number("mirror.thickness_mm", 2.65) * 1e-3);
}

std::string output_or(const Options& opt, const std::string& fallback) { return opt.output.empty() ? fallback : opt.output; }

std::vector<MirrorCatalog> load_catalogs(const Options& opt) {
    if (opt.catalogs.empty()) throw UsageError("--catalog is required");
    std::vector<MirrorCatalog> out;
    for (const auto& path : opt.catalogs) {
        MirrorCatalog c;
        try {
            c = read_catalog(path);
        } catch (const ParseError& e) {
            throw ParseError(path + ": " + e.what());
        }
        for (const auto& other : out)
            if (other.label == c.label) c.label += "#" + std::to_string(out.size() + 1);
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------

int run_predict_cyl(const Options& opt, std::ostream& out) {
    const RunConfig cfg = build_config(opt);
    const Material mat = material_from(cfg);
    const CylinderGeometry geom(0.5 * cfg.number("cylinder.diameter_mm", 25.4) * 1e-3,
                                cfg.number("cylinder.thickness_mm", 6.35) * 1e-3);
    RitzConfig ritz;
    ritz.basis_order = cfg.integer("cylinder.basis_order", ritz.basis_order);
    ritz.max_circumferential_order = cfg.integer("cylinder.max_order", ritz.max_circumferential_order);
    ritz.f_min = cfg.number("window.f_min_khz", 1.0) * 1e3;
    ritz.f_max = cfg.number("window.f_max_khz", 500.0) * 1e3;
    ritz.loss_angle = 1.0 / cfg.number("cylinder.q", 1e4);
    const MirrorCatalog catalog{"cylinder", solve_modes(geom, mat, ritz)};
    write_catalog(output_or(opt, "catalog.json"), catalog);
    out << format_catalog_table(catalog);
    return kExitOk;
}

int run_predict_gauss(const Options& opt, std::ostream& out) {
    const RunConfig cfg = build_config(opt);
    const Material mat = material_from(cfg);
    const PlanoConvexGeometry geom = mirror_from(cfg);
    GaussianWindow window;
    const double f100 = resonance_frequency(geom, mat, {1, 0, 0}) / (2.0 * kPi);
    window.f_min = cfg.number("window.f_min_khz", 1.0) * 1e3;
    window.f_max = cfg.has("window.f_max_khz") ? cfg.number("window.f_max_khz", 0.0) * 1e3 : 1.2 * f100;
    window.max_transverse_order = cfg.integer("mirror.max_transverse_order", window.max_transverse_order);
    LossAngleFn loss;
    if (cfg.has("mirror.q_odd") || cfg.has("mirror.q_even")) {
        const double q_odd = cfg.number("mirror.q_odd", 350000.0), q_even = cfg.number("mirror.q_even", 650000.0);
        loss = [=](GaussIndex idx) { return 1.0 / (idx.n % 2 ? q_odd : q_even); };
    }
    const MirrorCatalog catalog{"plano-convex", enumerate_modes(geom, mat, window, loss)};
    write_catalog(output_or(opt, "catalog.json"), catalog);
    out << format_catalog_table(catalog);
    return kExitOk;
}

int run_synth(const Options& opt, std::ostream& out) {
    const RunConfig cfg = build_config(opt);
    const auto catalogs = load_catalogs(opt);
    const auto grid = FrequencyGrid::from_range(cfg.number("grid.f_min_khz", 10.0) * 1e3,
                                                cfg.number("grid.f_max_khz", 500.0) * 1e3,
                                                cfg.number("grid.step_hz", 5.0));
    const OpticalBeam beam = beam_from(cfg);
    const Environment env = environment_from(cfg);
    Spectrum spectrum = displacement_psd(catalogs, beam, env, grid);
    if (const auto rbw = cfg.number("grid.rbw_hz")) spectrum = apply_rbw(spectrum, *rbw);
    if (opt.add_noise)
        spectrum = add_measurement_noise(spectrum, cfg.number("grid.noise_floor_m2_per_hz", 1e-36),
                                         cfg.integer("grid.averages", 100), opt.seed);
    write_text_file(output_or(opt, "spectrum.csv"), spectrum_to_csv(spectrum));
    if (!opt.plot.empty()) emit_plot(spectrum, opt.plot);
    out << "spectrum: " << spectrum.size() << " bins, " << spectrum.frequency(0) << " to "
        << spectrum.grid().f_end() << " Hz, total power " << spectrum.total_power() << " m^2\n";
    for (const auto& c : catalogs)
        for (const Mode& m : c.modes) {
            const EffectiveMass me = effective_mass(m, beam);
            if (me.decoupled) out << "note: " << c.label << ": " << me.diagnostic << "\n";
        }
    return kExitOk;
}

int run_scan(const Options& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = build_config(opt);
    const auto catalogs = load_catalogs(opt);
    const std::string mode_text = opt.mode.empty() ? cfg.text("scan.mode", "") : opt.mode;
    if (mode_text.empty()) throw UsageError("scan needs --mode or scan.mode");
    const ModeIndex wanted = parse_mode_index(mode_text);
    const Mode* target = nullptr;
    for (const Mode& m : catalogs.front().modes)
        if (m.index() == wanted) target = &m;
    if (!target) throw DomainError("mode " + to_string(wanted) + " is not in catalog '" + catalogs.front().label + "'");

    ScanConfig sc;
    sc.lines = cfg.integer("scan.lines", sc.lines);
    sc.speed = cfg.number("scan.speed_mm_s", sc.speed * 1e3) * 1e-3;
    sc.power = cfg.number("scan.power_w", sc.power);
    sc.spot_waist = cfg.number("scan.spot_waist_um", sc.spot_waist * 1e6) * 1e-6;
    sc.sample_spacing = cfg.number("scan.spacing_mm", sc.sample_spacing * 1e3) * 1e-3;
    if (const auto f = cfg.number("scan.drive_khz")) sc.drive_omega = 2.0 * kPi * *f * 1e3;
    sc.low_pass = cfg.flag("scan.low_pass", sc.low_pass);
    sc.finite_spot = cfg.flag("scan.finite_spot", sc.finite_spot);
    sc.serpentine = cfg.flag("scan.serpentine", sc.serpentine);

    ScanMap map = raster_scan(*target, beam_from(cfg), sc, environment_from(cfg));
    for (auto& w : contamination_warnings(*target, catalogs.front().modes, sc.drive_omega)) map.warnings.push_back(w);
    for (const auto& w : map.warnings) err << "warning: " << w << "\n";
    write_text_file(output_or(opt, "map.csv"), scanmap_to_csv(map));
    if (!opt.plot.empty()) emit_plot(map, opt.plot);
    out << "scan of " << to_string(map.mode) << ": " << map.points.size() << " points on " << map.lines
        << " lines, blur " << map.blur_length << " m\n";
    return kExitOk;
}

int run_analyze(const Options& opt, std::ostream& out) {
    const RunConfig cfg = build_config(opt);
    if (opt.spectrum.empty()) throw UsageError("--spectrum is required");
    Spectrum spectrum = [&] {
        try {
            return spectrum_from_csv(read_text_file(opt.spectrum));
        } catch (const ParseError& e) {
            throw ParseError(opt.spectrum + ": " + e.what());
        }
    }();
    const Environment env = environment_from(cfg);
    std::vector<PeakFit> fits;
    std::vector<std::string> failures;
    for (const PeakWindow& w : detect_peaks(spectrum, cfg.number("analysis.prominence", 10.0))) {
        try {
            fits.push_back(fit_lorentzian(spectrum, w, env));
        } catch (const FitError& e) {
            std::ostringstream os;
            os << "peak near " << spectrum.frequency(w.peak) << " Hz: " << e.what();
            failures.push_back(os.str());
        }
    }
    std::string report = format_fit_report(fits, failures);
    if (!opt.catalogs.empty()) {
        std::vector<Mode> predicted;
        for (const auto& c : load_catalogs(opt))
            predicted.insert(predicted.end(), c.modes.begin(), c.modes.end());
        report += format_assignment(label_modes(fits, predicted, cfg.number("analysis.tolerance", 0.03)), predicted);
    }
    if (opt.output.empty()) out << report;
    else {
        write_text_file(opt.output, report);
        out << fits.size() << " peaks fitted, " << failures.size() << " failures\n";
    }
    return kExitOk;
}

int run_profile(const Options& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = build_config(opt);
    if (opt.map.empty()) throw UsageError("--map is required");
    ScanMap map = [&] {
        try {
            return scanmap_from_csv(read_text_file(opt.map));
        } catch (const ParseError& e) {
            throw ParseError(opt.map + ": " + e.what());
        }
    }();
    int l = 0, p = 0;
    if (const auto* g = std::get_if<GaussIndex>(&map.mode)) l = g->l, p = g->p;
    l = cfg.integer("profile.l", l);
    p = cfg.integer("profile.p", p);
    const RadialProfile profile = radial_profile(map, l, cfg.number("profile.node_guard", 0.2), cfg.integer("profile.bins", 0));
    for (const auto& w : profile.warnings) err << "warning: " << w << "\n";
    const WaistFit fit = cfg.has("profile.waist_mm")
                             ? profile_residual(profile, l, p, cfg.number("profile.waist_mm", 0.0) * 1e-3)
                             : fit_waist(profile, l, p);
    const std::string report = format_profile(profile, fit, l, p);
    if (opt.output.empty()) out << report;
    else {
        write_text_file(opt.output, report);
        out << "waist " << fit.waist << " m, rms residual " << fit.rms_residual << "\n";
    }
    return kExitOk;
}

int run_calibrate(const Options& opt, std::ostream& out) {
    if (!opt.delta_nu_hz || !opt.length_mm) throw UsageError("calibrate needs --delta-nu-hz and --length-mm");
    const double wavelength = opt.wavelength_nm.value_or(810.0) * 1e-9;
    const double nu = kSpeedOfLight / wavelength;
    const double du = calibrate_displacement(*opt.delta_nu_hz, nu, *opt.length_mm * 1e-3);
    char buf[160];
    std::snprintf(buf, sizeof buf, "optical_frequency_hz = %.10g\ndelta_u_m = %.10g\nphase_rad = %.10g\n", nu, du,
                  phase_shift(du, wavelength));
    out << buf;
    return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Acoustic modes and thermal noise of optical mirrors", "mirrorsim"};
    app.require_subcommand(1);
    Options opt;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "INI run configuration")->check(CLI::ExistingFile);
        sub->add_option("--set", opt.overrides, "override section.key=value (repeatable)");
    };
    auto* cyl = app.add_subcommand("predict-cyl", "cylinder mode catalog (Rayleigh-Ritz)");
    common(cyl);
    cyl->add_option("-o,--output", opt.output, "catalog path (default catalog.json)");
    auto* gauss = app.add_subcommand("predict-gauss", "plano-convex gaussian mode catalog");
    common(gauss);
    gauss->add_option("-o,--output", opt.output, "catalog path (default catalog.json)");
    auto* synth = app.add_subcommand("synth", "thermal displacement spectrum from one or two catalogs");
    common(synth);
    synth->add_option("--catalog", opt.catalogs, "mode catalog, once per mirror")->check(CLI::ExistingFile);
    synth->add_option("-o,--output", opt.output, "spectrum CSV (default spectrum.csv)");
    synth->add_option("--plot", opt.plot, "SVG plot path");
    synth->add_flag("--add-noise", opt.add_noise, "add a measurement-noise floor");
    synth->add_option("--seed", opt.seed, "seed for --add-noise");
    auto* scan = app.add_subcommand("scan", "radiation-pressure raster map of one mode");
    common(scan);
    scan->add_option("--catalog", opt.catalogs, "mode catalog")->check(CLI::ExistingFile);
    scan->add_option("--mode", opt.mode, "mode index, e.g. \"gauss 4 1 3\"");
    scan->add_option("-o,--output", opt.output, "map CSV (default map.csv)");
    scan->add_option("--plot", opt.plot, "SVG plot path");
    auto* analyze = app.add_subcommand("analyze", "peaks, lorentzian fits and labels of a spectrum");
    common(analyze);
    analyze->add_option("--spectrum", opt.spectrum, "spectrum CSV")->check(CLI::ExistingFile);
    analyze->add_option("--catalog", opt.catalogs, "predicted catalog for labeling")->check(CLI::ExistingFile);
    analyze->add_option("-o,--output", opt.output, "report path (default stdout)");
    auto* profile = app.add_subcommand("profile", "radial profile and waist from a scan map");
    common(profile);
    profile->add_option("--map", opt.map, "map CSV")->check(CLI::ExistingFile);
    profile->add_option("-o,--output", opt.output, "report path (default stdout)");
    auto* calibrate = app.add_subcommand("calibrate", "displacement equivalent of a laser frequency modulation");
    calibrate->add_option("--delta-nu-hz", opt.delta_nu_hz, "frequency modulation depth");
    calibrate->add_option("--length-mm", opt.length_mm, "cavity length");
    calibrate->add_option("--wavelength-nm", opt.wavelength_nm, "optical wavelength (default 810)");

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*cyl) return run_predict_cyl(opt, out);
        if (*gauss) return run_predict_gauss(opt, out);
        if (*synth) return run_synth(opt, out);
        if (*scan) return run_scan(opt, out, err);
        if (*analyze) return run_analyze(opt, out);
        if (*profile) return run_profile(opt, out, err);
        if (*calibrate) return run_calibrate(opt, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return cli_dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace mirrorsim
