#pragma once

// Delimited-text exports. Every file opens with '#' metadata lines, then one
// column-name line, then comma-separated rows printed with 17 significant
// digits so a read-back is exact.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/noise_synth.hpp"
#include "mirrorsim/scan_sim.hpp"

namespace mirrorsim {

std::string spectrum_to_csv(const Spectrum& spectrum);
Spectrum spectrum_from_csv(const std::string& text);

std::string scanmap_to_csv(const ScanMap& map);
ScanMap scanmap_from_csv(const std::string& text);

// Human-readable tables.
std::string format_catalog_table(const MirrorCatalog& catalog);
std::string format_fit_report(std::span<const PeakFit> fits, std::span<const std::string> failures);
std::string format_assignment(const ModeAssignment& assignment, std::span<const Mode> predicted);
std::string format_profile(const RadialProfile& profile, const WaistFit& fit, int l, int p);

// "cyl 0 1 3" / "gauss 4 1 3"
ModeIndex parse_mode_index(const std::string& text);

}  // namespace mirrorsim
