#pragma once

// Static SVG plots: log-log amplitude spectra and polar response maps.
// emit_plot writes the SVG and, next to it, the raw data as CSV (same stem).

#include <filesystem>
#include <string>

#include "mirrorsim/noise_synth.hpp"
#include "mirrorsim/scan_sim.hpp"

namespace mirrorsim {

std::string spectrum_svg(const Spectrum& spectrum);
std::string scanmap_svg(const ScanMap& map);

void emit_plot(const Spectrum& spectrum, const std::filesystem::path& svg_path);
void emit_plot(const ScanMap& map, const std::filesystem::path& svg_path);

}  // namespace mirrorsim
