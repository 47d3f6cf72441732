#include "mirrorsim/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double parse_double(std::string_view field, int line) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("expected a number, got '" + std::string(field) + "'", line);
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Header metadata as "# key = value" lines; data rows after the column line.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;

    std::string get(const std::string& key) const {
        for (const auto& [k, v] : meta)
            if (k == key) return v;
        throw ParseError("missing header field '" + key + "'");
    }
};

Table parse_table(const std::string& text, const std::string& magic, const std::string& columns) {
    Table table;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool seen_magic = false, seen_columns = false;
    const std::size_t width = split(columns, ',').size();
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view l = trim(raw);
        if (l.empty()) continue;
        if (l.front() == '#') {
            const std::string_view body = trim(l.substr(1));
            if (!seen_magic) {
                if (body != magic) throw ParseError("expected header '# " + magic + "'", line);
                seen_magic = true;
                continue;
            }
            const auto eq = body.find('=');
            if (eq != std::string_view::npos)
                table.meta.emplace_back(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
            continue;
        }
        if (!seen_magic) throw ParseError("expected header '# " + magic + "'", line);
        if (!seen_columns) {
            if (l != columns) throw ParseError("expected column line '" + columns + "'", line);
            seen_columns = true;
            continue;
        }
        const auto fields = split(l, ',');
        if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()), line);
        std::vector<double> row;
        for (auto f : fields) row.push_back(parse_double(f, line));
        table.rows.push_back(std::move(row));
        table.row_lines.push_back(line);
    }
    if (!seen_magic) throw ParseError("empty file: expected header '# " + magic + "'", line);
    if (!seen_columns) throw ParseError("truncated file: column line missing", line);
    return table;
}

constexpr const char* kSpectrumMagic = "mirrorsim spectrum v1";
constexpr const char* kSpectrumColumns = "f_Hz,S_m2_per_Hz,asd_m_per_rtHz";
constexpr const char* kMapMagic = "mirrorsim scan map v1";
constexpr const char* kMapColumns = "x_m,y_m,amp_m,phase_rad";

}  // namespace

ModeIndex parse_mode_index(const std::string& text) {
    std::istringstream in(text);
    std::string family;
    int a = 0, b = 0, c = 0;
    std::string rest;
    if (!(in >> family >> a >> b >> c) || (in >> rest))
        throw ParseError("mode index '" + text + "' must read like 'cyl 0 1 3' or 'gauss 4 1 3'");
    if (family == "cyl") return CylIndex{a, b, c};
    if (family == "gauss") return GaussIndex{a, b, c};
    throw ParseError("unknown mode family '" + family + "' (expected cyl or gauss)");
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
    std::ostringstream os;
    os << "# " << kSpectrumMagic << "\n";
    os << "# rbw_hz = " << (spectrum.meta().rbw ? num(*spectrum.meta().rbw) : "none") << "\n";
    os << "# mirrors = ";
    for (std::size_t i = 0; i < spectrum.meta().mirrors.size(); ++i)
        os << (i ? ";" : "") << spectrum.meta().mirrors[i];
    os << "\n# one-sided displacement PSD\n" << kSpectrumColumns << "\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        os << num(spectrum.frequency(i)) << ',' << num(spectrum.psd()[i]) << ',' << num(spectrum.asd(i)) << '\n';
    return os.str();
}

Spectrum spectrum_from_csv(const std::string& text) {
    const Table t = parse_table(text, kSpectrumMagic, kSpectrumColumns);
    if (t.rows.size() < 2) throw ParseError("spectrum needs at least two rows");
    const double f0 = t.rows.front()[0];
    const double step = (t.rows.back()[0] - f0) / static_cast<double>(t.rows.size() - 1);
    std::vector<double> psd;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double expect = f0 + step * static_cast<double>(i);
        if (std::abs(t.rows[i][0] - expect) > 1e-6 * step)
            throw ParseError("frequency grid is not uniform", t.row_lines[i]);
        psd.push_back(t.rows[i][1]);
    }
    SpectrumMeta meta;
    const std::string rbw = t.get("rbw_hz");
    if (rbw != "none") meta.rbw = parse_double(rbw, 0);
    std::string mirrors = t.get("mirrors");
    for (auto m : split(mirrors, ';'))
        if (!trim(m).empty()) meta.mirrors.emplace_back(trim(m));
    try {
        const FrequencyGrid grid{f0, step, psd.size()};
        return Spectrum(grid, std::move(psd), std::move(meta));
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid spectrum: ") + e.what());
    }
}

std::string scanmap_to_csv(const ScanMap& map) {
    std::ostringstream os;
    os << "# " << kMapMagic << "\n";
    os << "# mode = " << to_string(map.mode) << "\n";
    os << "# mirror_radius_m = " << num(map.mirror_radius) << "\n";
    os << "# drive_omega_rad_s = " << num(map.drive_omega) << "\n";
    os << "# lines = " << map.lines << "\n";
    os << "# serpentine = " << (map.serpentine ? "true" : "false") << "\n";
    os << "# blur_length_m = " << num(map.blur_length) << "\n";
    os << "# resolution_warning = " << (map.resolution_warning ? "true" : "false") << "\n";
    for (const auto& w : map.warnings) os << "# warning: " << w << "\n";
    os << kMapColumns << "\n";
    for (const ScanPoint& p : map.points)
        os << num(p.x) << ',' << num(p.y) << ',' << num(p.amplitude) << ',' << num(p.phase) << '\n';
    return os.str();
}

ScanMap scanmap_from_csv(const std::string& text) {
    const Table t = parse_table(text, kMapMagic, kMapColumns);
    if (t.rows.empty()) throw ParseError("scan map holds no points");
    ScanMap map;
    map.mode = parse_mode_index(t.get("mode"));
    map.mirror_radius = parse_double(t.get("mirror_radius_m"), 0);
    map.drive_omega = parse_double(t.get("drive_omega_rad_s"), 0);
    map.lines = static_cast<int>(parse_double(t.get("lines"), 0));
    map.serpentine = t.get("serpentine") == "true";
    map.blur_length = parse_double(t.get("blur_length_m"), 0);
    map.resolution_warning = t.get("resolution_warning") == "true";
    if (!(map.mirror_radius > 0.0)) throw ParseError("mirror radius must be positive");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (std::hypot(r[0], r[1]) > map.mirror_radius * (1.0 + 1e-9))
            throw ParseError("scan point lies outside the mirror face", t.row_lines[i]);
        map.points.push_back({r[0], r[1], r[2], r[3]});
    }
    return map;
}

std::string format_catalog_table(const MirrorCatalog& catalog) {
    std::ostringstream os;
    os << "# catalog " << catalog.label << ": " << catalog.modes.size() << " modes\n";
    os << "family  idx        f_kHz          Q    modal_mass_g\n";
    for (const Mode& m : catalog.modes) {
        std::string idx = to_string(m.index());
        const std::string family = idx.substr(0, idx.find(' '));
        idx = idx.substr(idx.find(' ') + 1);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-7s %-8s %12.4f %10.0f %15.6g\n", family.c_str(), idx.c_str(),
                      m.frequency_hz() * 1e-3, m.quality_factor(), m.mass() * 1e3);
        os << buf;
    }
    return os.str();
}

std::string format_fit_report(std::span<const PeakFit> fits, std::span<const std::string> failures) {
    std::ostringstream os;
    os << "# lorentzian fits: " << fits.size() << " converged, " << failures.size() << " failed\n";
    os << "f_Hz,sigma_f_Hz,linewidth_Hz,Q,sigma_Q,area_m2,sigma_area_m2,integrated_area_m2,M_eff_kg,floor_m2_per_Hz,residual\n";
    for (const PeakFit& f : fits)
        os << num(f.frequency) << ',' << num(f.sigma_frequency) << ',' << num(f.linewidth) << ','
           << num(f.quality_factor) << ',' << num(f.sigma_quality) << ',' << num(f.area) << ','
           << num(f.sigma_area) << ',' << num(f.integrated_area) << ',' << num(f.effective_mass) << ','
           << num(f.floor) << ',' << num(f.residual_norm) << '\n';
    for (const auto& why : failures) os << "# fit failure: " << why << "\n";
    return os.str();
}

std::string format_assignment(const ModeAssignment& assignment, std::span<const Mode> predicted) {
    std::ostringstream os;
    os << "# mode assignment: " << assignment.pairs.size() << " matched, "
       << assignment.unmatched_measured.size() << " unmatched measured, "
       << assignment.unmatched_predicted.size() << " unmatched predicted\n";
    os << "predicted_index,predicted_kHz,measured_kHz,error_percent\n";
    for (const MatchedPair& p : assignment.pairs)
        os << to_string(predicted[p.predicted].index()) << ',' << fixed(p.predicted_hz * 1e-3, 4) << ','
           << fixed(p.measured_hz * 1e-3, 4) << ',' << fixed(100.0 * p.relative_error, 3) << '\n';
    for (std::size_t j : assignment.unmatched_predicted)
        os << to_string(predicted[j].index()) << ',' << fixed(predicted[j].frequency_hz() * 1e-3, 4) << ",,\n";
    return os.str();
}

std::string format_profile(const RadialProfile& profile, const WaistFit& fit, int l, int p) {
    std::ostringstream os;
    os << "# radial profile l = " << l << ", p = " << p << "\n";
    os << "# waist_m = " << num(fit.waist) << "\n";
    os << "# amplitude_m = " << num(fit.amplitude) << "\n";
    os << "# rms_residual = " << num(fit.rms_residual) << "\n";
    for (const auto& w : profile.warnings) os << "# warning: " << w << "\n";
    os << "r_m,value_m,samples\n";
    for (const ProfilePoint& pt : profile.points) os << num(pt.r) << ',' << num(pt.value) << ',' << pt.samples << '\n';
    return os.str();
}

}  // namespace mirrorsim
