#pragma once

// Mode catalogs as versioned JSON. Shapes are stored as a polar grid
// (r-major), so a catalog read back carries PolarGridShape instances.

#include <filesystem>
#include <string>
#include <vector>

#include "mirrorsim/noise_synth.hpp"

namespace mirrorsim {

inline constexpr const char* kCatalogFormat = "mirrorsim-catalog";
inline constexpr int kCatalogVersion = 1;

struct ShapeGrid {
    int n_r = 65;
    int n_theta = 64;
};

std::string catalog_to_json(const MirrorCatalog& catalog, ShapeGrid grid = {});
// Throws ParseError (with a line number where one applies).
MirrorCatalog catalog_from_json(const std::string& text);

void write_catalog(const std::filesystem::path& path, const MirrorCatalog& catalog, ShapeGrid grid = {});
MirrorCatalog read_catalog(const std::filesystem::path& path);

// Whole-file helpers; IoError names the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mirrorsim
