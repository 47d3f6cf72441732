#include "mirrorsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "mirrorsim/catalog_io.hpp"
#include "mirrorsim/errors.hpp"

#ifndef MIRRORSIM_DEFAULT_MATERIAL_DIR
#define MIRRORSIM_DEFAULT_MATERIAL_DIR "data/materials"
#endif

namespace mirrorsim {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::optional<double> to_double(const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

pt::ptree parse_ini(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw UsageError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys = {
        "material.name", "material.file",
        "cylinder.diameter_mm", "cylinder.thickness_mm", "cylinder.basis_order", "cylinder.max_order",
        "cylinder.q",
        "mirror.diameter_mm", "mirror.curvature_mm", "mirror.thickness_mm", "mirror.max_transverse_order",
        "mirror.q_odd", "mirror.q_even",
        "window.f_min_khz", "window.f_max_khz",
        "beam.waist_um", "beam.wavelength_nm", "beam.x_mm", "beam.y_mm", "beam.cavity_length_mm",
        "beam.coupler_radius_mm",
        "environment.temperature_k",
        "grid.f_min_khz", "grid.f_max_khz", "grid.step_hz", "grid.rbw_hz", "grid.noise_floor_m2_per_hz",
        "grid.averages",
        "scan.mode", "scan.lines", "scan.speed_mm_s", "scan.power_w", "scan.spot_waist_um", "scan.spacing_mm",
        "scan.drive_khz", "scan.low_pass", "scan.finite_spot", "scan.serpentine",
        "analysis.prominence", "analysis.tolerance",
        "profile.l", "profile.p", "profile.node_guard", "profile.bins", "profile.waist_mm",
    };
    return keys;
}

void RunConfig::check_known() const {
    const auto& known = known_keys();
    for (const auto& [section, body] : tree_) {
        if (body.empty()) throw UsageError("config key '" + section + "' must sit inside a [section]");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (std::find(known.begin(), known.end(), full) == known.end())
                throw UsageError("unknown config key '" + full + "'");
        }
    }
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    cfg.tree_ = parse_ini(text);
    cfg.check_known();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    try {
        return parse(read_text_file(path));
    } catch (const UsageError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const std::string key = trim(assignment.substr(0, eq));
    if (eq == std::string::npos || key.find('.') == std::string::npos)
        throw UsageError("override '" + assignment + "' must read section.key=value");
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
        throw UsageError("unknown config key '" + key + "'");
    tree_.put(key, trim(assignment.substr(eq + 1)));
}

bool RunConfig::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

std::optional<double> RunConfig::number(const std::string& key) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return std::nullopt;
    const auto v = to_double(*raw);
    if (!v) throw UsageError("config key '" + key + "' expects a number, got '" + *raw + "'");
    return v;
}

double RunConfig::number(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

int RunConfig::integer(const std::string& key, int fallback) const {
    const auto v = number(key);
    if (!v) return fallback;
    if (*v != std::floor(*v) || std::abs(*v) > 1e9)
        throw UsageError("config key '" + key + "' expects an integer");
    return static_cast<int>(*v);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return fallback;
    const std::string v = trim(*raw);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw UsageError("config key '" + key + "' expects true or false, got '" + v + "'");
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    const auto raw = tree_.get_optional<std::string>(key);
    return raw ? trim(*raw) : fallback;
}

// ---------------------------------------------------------------------------

Material parse_material(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("material file: " + e.message(), static_cast<int>(e.line()));
    }
    std::optional<std::string> name;
    std::optional<double> rho, young, nu, lambda, mu;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ParseError("material file takes no sections ('" + key + "')");
        const std::string value = trim(node.data());
        if (key == "name") {
            name = value;
            continue;
        }
        const auto v = to_double(value);
        if (!v) throw ParseError("material key '" + key + "' expects a number, got '" + value + "'");
        if (key == "rho") rho = v;
        else if (key == "E") young = v;
        else if (key == "nu") nu = v;
        else if (key == "lambda") lambda = v;
        else if (key == "mu") mu = v;
        else throw ParseError("unknown material key '" + key + "'");
    }
    if (!name || !rho) throw ParseError("material file needs 'name' and 'rho'");
    if (young && nu && !lambda && !mu) return Material::from_young(*name, *rho, *young, *nu);
    if (lambda && mu && !young && !nu) return Material::from_lame(*name, *rho, *lambda, *mu);
    throw ParseError("material file needs exactly one of the pairs (E, nu) or (lambda, mu)");
}

Material load_material_file(const std::filesystem::path& path) {
    try {
        return parse_material(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::filesystem::path material_directory() {
    if (const char* dir = std::getenv("MIRRORSIM_MATERIAL_DIR"); dir && *dir) return dir;
    return MIRRORSIM_DEFAULT_MATERIAL_DIR;
}

Material load_material(const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos)
        throw UsageError("material name '" + name + "' must be a bare name; use material.file for paths");
    return load_material_file(material_directory() / (name + ".mat"));
}

}  // namespace mirrorsim
