#pragma once

// Run configuration: an INI file ([section] then key = value, '#' or ';'
// comments) plus "section.key=value" overrides, which win. Key names carry
// their unit as a suffix (_mm, _khz, _um, ...). Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

class RunConfig {
public:
    // Throws UsageError (with the line number) on malformed text or
    // unknown keys.
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);

    // "section.key=value"
    void set(const std::string& assignment);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    std::optional<double> number(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;

    static const std::vector<std::string>& known_keys();

private:
    void check_known() const;
    boost::property_tree::ptree tree_;
};

// Material file: "name = ...", "rho = ..." and either "E"/"nu" or
// "lambda"/"mu" (SI units).
Material parse_material(const std::string& text);
Material load_material_file(const std::filesystem::path& path);

// Directory searched for "<name>.mat": $MIRRORSIM_MATERIAL_DIR, else the
// bundled data/materials.
std::filesystem::path material_directory();
Material load_material(const std::string& name);

}  // namespace mirrorsim
