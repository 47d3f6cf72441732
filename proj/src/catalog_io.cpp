#include "mirrorsim/catalog_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {

using nlohmann::json;

namespace {

int line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Line of the first occurrence of `"key"`, used to locate semantic errors.
int line_of_key(const std::string& text, const std::string& key, std::size_t from = 0) {
    const auto pos = text.find('"' + key + '"', from);
    return pos == std::string::npos ? 0 : line_of(text, pos);
}

json index_to_json(const ModeIndex& index) {
    if (const auto* c = std::get_if<CylIndex>(&index)) return json::array({c->n, c->parity, c->order});
    const auto& g = std::get<GaussIndex>(index);
    return json::array({g.n, g.p, g.l});
}

}  // namespace

std::string catalog_to_json(const MirrorCatalog& catalog, ShapeGrid grid) {
    json modes = json::array();
    for (const Mode& mode : catalog.modes) {
        const auto* polar = dynamic_cast<const PolarGridShape*>(&mode.shape());
        std::shared_ptr<const PolarGridShape> sampled;
        if (!polar) {
            sampled = PolarGridShape::sample(mode.shape(), grid.n_r, grid.n_theta);
            polar = sampled.get();
        }
        modes.push_back({
            {"family", family_tag(mode.index())},
            {"index", index_to_json(mode.index())},
            {"frequency_hz", mode.frequency_hz()},
            {"omega_rad_s", mode.omega()},
            {"loss_angle", mode.loss_angle()},
            {"modal_mass_kg", mode.mass()},
            {"shape",
             {{"radius_m", polar->face_radius()},
              {"n_r", polar->n_r()},
              {"n_theta", polar->n_theta()},
              {"azimuthal_order", polar->azimuthal_order()},
              {"values", polar->values()}}},
        });
    }
    const json doc = {{"format", kCatalogFormat},
                      {"version", kCatalogVersion},
                      {"label", catalog.label},
                      {"modes", std::move(modes)}};
    return doc.dump(1) + "\n";
}

MirrorCatalog catalog_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed catalog: ") + e.what(), line_of(text, e.byte));
    }
    if (!doc.is_object() || doc.value("format", std::string()) != kCatalogFormat)
        throw ParseError("not a mirrorsim catalog (missing format tag)", line_of_key(text, "format"));
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<int>() != kCatalogVersion)
        throw ParseError("unsupported catalog version (expected " + std::to_string(kCatalogVersion) + ")",
                         line_of_key(text, "version"));

    MirrorCatalog catalog;
    std::size_t cursor = 0;
    try {
        catalog.label = doc.at("label").get<std::string>();
        for (const json& entry : doc.at("modes")) {
            cursor = text.find("\"family\"", cursor + 1);
            const auto family = entry.at("family").get<std::string>();
            const auto idx = entry.at("index").get<std::vector<int>>();
            if (idx.size() != 3) throw ParseError("mode index must have three entries", line_of(text, cursor));
            ModeIndex index;
            if (family == "cyl") index = CylIndex{idx[0], idx[1], idx[2]};
            else if (family == "gauss") index = GaussIndex{idx[0], idx[1], idx[2]};
            else throw ParseError("unknown mode family '" + family + "'", line_of(text, cursor));

            const json& s = entry.at("shape");
            auto shape = std::make_shared<const PolarGridShape>(
                s.at("radius_m").get<double>(), s.at("n_r").get<int>(), s.at("n_theta").get<int>(),
                s.at("values").get<std::vector<double>>(), s.at("azimuthal_order").get<int>());
            catalog.modes.emplace_back(index, entry.at("omega_rad_s").get<double>(),
                                       entry.at("loss_angle").get<double>(),
                                       entry.at("modal_mass_kg").get<double>(), std::move(shape));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed catalog entry: ") + e.what(),
                         cursor == std::string::npos ? 0 : line_of(text, cursor));
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid catalog entry: ") + e.what(),
                         cursor == std::string::npos ? 0 : line_of(text, cursor));
    }
    return catalog;
}

void write_catalog(const std::filesystem::path& path, const MirrorCatalog& catalog, ShapeGrid grid) {
    write_text_file(path, catalog_to_json(catalog, grid));
}

MirrorCatalog read_catalog(const std::filesystem::path& path) {
    return catalog_from_json(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace mirrorsim
