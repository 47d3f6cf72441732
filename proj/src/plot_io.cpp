#include "mirrorsim/plot_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mirrorsim/catalog_io.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/table_io.hpp"

namespace mirrorsim {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 90, kRight = 20, kTop = 30, kBottom = 60;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string decade_label(int e) { return "1e" + std::to_string(e); }

// Diverging blue-white-red for v in [-1, 1].
std::string diverging(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const auto ch = [](double x) { return static_cast<int>(std::lround(255.0 * std::clamp(x, 0.0, 1.0))); };
    const int r = v >= 0 ? 255 : ch(1.0 + v), b = v <= 0 ? 255 : ch(1.0 - v), g = ch(1.0 - std::abs(v));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string spectrum_svg(const Spectrum& spectrum) {
    double a_min = INFINITY, a_max = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double a = spectrum.asd(i);
        if (a > 0.0) a_min = std::min(a_min, a), a_max = std::max(a_max, a);
    }
    if (!(a_max > 0.0)) throw DomainError("spectrum holds no positive values to plot");
    const double lf0 = std::floor(std::log10(spectrum.frequency(0)));
    double lf1 = std::ceil(std::log10(spectrum.grid().f_end()));
    if (lf1 <= lf0) lf1 = lf0 + 1;
    const double la0 = std::floor(std::log10(a_min)), la1 = std::max(la0 + 1, std::ceil(std::log10(a_max)));

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto X = [&](double f) { return kLeft + (std::log10(f) - lf0) / (lf1 - lf0) * pw; };
    const auto Y = [&](double a) { return kTop + (la1 - std::log10(a)) / (la1 - la0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<title>Displacement noise spectrum</title>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(lf0); e <= static_cast<int>(lf1); ++e)
        os << "<text x=\"" << fmt(X(std::pow(10.0, e))) << "\" y=\"" << kHeight - kBottom + 18
           << "\" text-anchor=\"middle\">" << decade_label(e) << "</text>\n";
    for (int e = static_cast<int>(la0); e <= static_cast<int>(la1); ++e)
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(Y(std::pow(10.0, e)) + 4)
           << "\" text-anchor=\"end\">" << decade_label(e) << "</text>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">Frequency (Hz)</text>\n";
    os << "<text transform=\"translate(18," << kTop + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">Displacement noise (m/&#8730;Hz)</text>\n";
    if (spectrum.meta().rbw)
        os << "<text x=\"" << kWidth - kRight << "\" y=\"" << kTop - 10 << "\" text-anchor=\"end\">RBW "
           << *spectrum.meta().rbw << " Hz</text>\n";

    os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
    const double floor_a = std::pow(10.0, la0);
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        os << fmt(X(spectrum.frequency(i))) << ',' << fmt(Y(std::max(spectrum.asd(i), floor_a))) << ' ';
    os << "\"/>\n</svg>\n";
    return os.str();
}

std::string scanmap_svg(const ScanMap& map) {
    if (map.points.empty()) throw DomainError("scan map holds no points to plot");
    const auto strongest = std::max_element(map.points.begin(), map.points.end(),
                                            [](const ScanPoint& a, const ScanPoint& b) { return a.amplitude < b.amplitude; });
    const double peak = strongest->amplitude, reference = strongest->phase;
    const double size = 480, margin = 30, scale = (size / 2 - margin) / map.mirror_radius;
    const double cx = size / 2, cy = size / 2;
    // Pixel size from line pitch.
    const double cell = std::max(1.0, 2.0 * map.mirror_radius / std::max(1, map.lines) * scale);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<title>Response map " << to_string(map.mode) << "</title>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const ScanPoint& p : map.points) {
        const double v = peak > 0.0 ? p.amplitude * std::cos(p.phase - reference) / peak : 0.0;
        os << "<rect x=\"" << fmt(cx + p.x * scale - cell / 2) << "\" y=\"" << fmt(cy - p.y * scale - cell / 2)
           << "\" width=\"" << fmt(cell) << "\" height=\"" << fmt(cell) << "\" fill=\"" << diverging(v) << "\"/>\n";
    }
    os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << fmt(map.mirror_radius * scale)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << cx << "\" y=\"" << size + 10 << "\" text-anchor=\"middle\">" << to_string(map.mode)
       << ", mirror radius " << fmt(map.mirror_radius * 1e3) << " mm</text>\n</svg>\n";
    return os.str();
}

namespace {

void check_svg_path(const std::filesystem::path& svg_path) {
    if (svg_path.extension() == ".csv") throw UsageError("plot path '" + svg_path.string() + "' would collide with its data file");
}

}  // namespace

void emit_plot(const Spectrum& spectrum, const std::filesystem::path& svg_path) {
    check_svg_path(svg_path);
    const std::string svg = spectrum_svg(spectrum);
    write_text_file(svg_path, svg);
    write_text_file(std::filesystem::path(svg_path).replace_extension(".csv"), spectrum_to_csv(spectrum));
}

void emit_plot(const ScanMap& map, const std::filesystem::path& svg_path) {
    check_svg_path(svg_path);
    const std::string svg = scanmap_svg(map);
    write_text_file(svg_path, svg);
    write_text_file(std::filesystem::path(svg_path).replace_extension(".csv"), scanmap_to_csv(map));
}

}  // namespace mirrorsim
