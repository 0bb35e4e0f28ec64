#include "ldis/catalog.hpp"

#include "ldis/csv.hpp"
#include "ldis/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <regex>

namespace ldis {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

LonLat parse_position(const json& pos) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
        throw Error("GeoJSON position must be [lon, lat]");
    }
    return {pos[0].get<double>(), pos[1].get<double>()};
}

Ring parse_ring(const json& ring) {
    if (!ring.is_array()) throw Error("GeoJSON ring must be an array of positions");
    Ring out;
    out.reserve(ring.size());
    for (const auto& p : ring) out.push_back(parse_position(p));
    return out;
}

Polygon parse_polygon(const json& rings) {
    if (!rings.is_array() || rings.empty()) throw Error("GeoJSON polygon needs at least one ring");
    Polygon p;
    p.outer = parse_ring(rings[0]);
    for (std::size_t k = 1; k < rings.size(); ++k) p.holes.push_back(parse_ring(rings[k]));
    return p;
}

std::string property_string(const json& v) {
    if (v.is_null()) return {};
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Aliases seen across hosts for each harmonised field.
const std::map<std::string, std::vector<std::string>>& aliases() {
    static const std::map<std::string, std::vector<std::string>> table{
        {"site_id", {"site_id", "site_id_reported", "siteId", "site"}},
        {"project_id", {"project_id", "project_id_reported", "projectId", "project"}},
        {"host_name", {"host_name", "host", "website"}},
        {"url", {"url", "link", "source_url"}},
        {"iso3", {"iso3", "country_iso3", "country_code"}},
        {"project_name", {"project_name", "name", "title"}},
        {"description", {"description", "project_description"}},
        {"classification", {"classification", "project_type", "category"}},
        {"planting_date", {"planting_date", "plantingDate", "planted_on", "planting_date_reported"}},
        {"planting_date_type", {"planting_date_type"}},
        {"intervention_year", {"intervention_year", "start_year"}},
        {"crediting_start", {"crediting_start", "crediting_period_start"}},
        {"registration_date", {"registration_date", "registered_on"}},
        {"trees_planted", {"trees_planted", "treesPlanted", "number_of_trees"}},
        {"species", {"species", "species_planted", "species_planted_reported"}},
        {"survival_rate", {"survival_rate", "survivalRate"}},
    };
    return table;
}

std::string lookup(const std::map<std::string, std::string>& props, const std::string& field) {
    for (const auto& key : aliases().at(field)) {
        auto it = props.find(key);
        if (it != props.end() && !trim(it->second).empty()) return trim(it->second);
    }
    return {};
}

std::optional<double> lookup_area_km2(const std::map<std::string, std::string>& props) {
    if (auto it = props.find("area_km2"); it != props.end()) {
        if (auto v = to_number(it->second)) return *v;
    }
    if (auto it = props.find("area_ha"); it != props.end()) {
        if (auto v = to_number(it->second)) return *v / 100.0;
    }
    for (const char* key : {"area", "size", "area_reported"}) {
        if (auto it = props.find(key); it != props.end()) {
            if (auto v = parse_area_km2(it->second)) return v;
        }
    }
    return std::nullopt;
}

std::optional<double> parse_rate(std::string_view text) {
    std::string t = trim(text);
    bool pct = false;
    if (!t.empty() && t.back() == '%') {
        pct = true;
        t.pop_back();
    }
    auto v = to_number(t);
    if (!v) return std::nullopt;
    if (pct || *v > 1.0) return *v / 100.0;
    return *v;
}

}  // namespace

SiteGeometry parse_geometry(const json& geometry) {
    if (!geometry.is_object() || !geometry.contains("type")) throw Error("GeoJSON geometry without type");
    const std::string type = geometry.at("type").get<std::string>();
    const json& coords = geometry.at("coordinates");
    SiteGeometry g;
    if (type == "Point") {
        g.kind = GeometryKind::point;
        g.point = parse_position(coords);
        g.is_point_origin = true;
    } else if (type == "Polygon") {
        g.kind = GeometryKind::polygon;
        g.reported.push_back(parse_polygon(coords));
    } else if (type == "MultiPolygon") {
        if (!coords.is_array() || coords.empty()) throw Error("empty MultiPolygon");
        for (const auto& part : coords) g.reported.push_back(parse_polygon(part));
        g.kind = g.reported.size() == 1 ? GeometryKind::polygon : GeometryKind::multipart;
    } else {
        throw Error(fmt::format("unsupported site geometry type '{}'", type));
    }
    return g;
}

std::optional<double> parse_area_km2(std::string_view text) {
    static const std::regex re(R"(^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z²^0-9 ]*)\s*$)");
    // Thousands separators: "1,000,000 m2".
    static const std::regex sep(R"((\d),(?=\d{3}\b))");
    const std::string s = std::regex_replace(std::string(text), sep, "$1");
    std::smatch m;
    if (!std::regex_match(s, m, re)) return std::nullopt;
    const double v = std::stod(m[1].str());
    std::string unit = lower(trim(m[2].str()));
    unit.erase(std::remove(unit.begin(), unit.end(), ' '), unit.end());
    if (unit.empty() || unit == "ha" || unit == "hectare" || unit == "hectares") return v / 100.0;
    if (unit == "km2" || unit == "km^2" || unit == "km²" || unit == "sqkm") return v;
    if (unit == "m2" || unit == "m^2" || unit == "m²") return v / 1e6;
    if (unit == "acre" || unit == "acres" || unit == "ac") return v * 0.0040468564224;
    return std::nullopt;
}

IngestResult ingest_features(const json& collection, const std::string& source_name,
                             const std::map<std::string, std::map<std::string, std::string>>& metadata,
                             const GeometryOptions& opts) {
    std::vector<json> features;
    if (collection.value("type", "") == "FeatureCollection") {
        for (const auto& f : collection.at("features")) features.push_back(f);
    } else if (collection.value("type", "") == "Feature") {
        features.push_back(collection);
    } else {
        throw IngestError(fmt::format("{}: expected a GeoJSON Feature or FeatureCollection", source_name));
    }

    IngestResult result;
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const json& f = features[fi];
        std::map<std::string, std::string> props;
        if (f.contains("properties") && f["properties"].is_object()) {
            for (const auto& [k, v] : f["properties"].items()) props[k] = property_string(v);
        }
        std::string site_id = lookup(props, "site_id");
        if (site_id.empty() && f.contains("id")) site_id = property_string(f["id"]);
        if (site_id.empty()) {
            site_id = fmt::format("{}:{}", source_name, fi);
            result.warnings.push_back(fmt::format("feature {} of {} has no site id; using '{}'", fi, source_name, site_id));
        }
        if (auto it = metadata.find(site_id); it != metadata.end()) {
            for (const auto& [k, v] : it->second) {
                if (k != "site_id" && (!props.count(k) || trim(props[k]).empty())) props[k] = v;
            }
        }

        SiteRecord rec;
        rec.site_id = site_id;
        rec.reported = props;
        rec.project_id = lookup(props, "project_id");
        rec.host_name = lookup(props, "host_name");
        rec.url = lookup(props, "url");
        rec.project_name = lookup(props, "project_name");
        rec.description = lookup(props, "description");
        rec.classification = lookup(props, "classification");
        rec.species_reported = lookup(props, "species");
        if (const std::string iso = lookup(props, "iso3"); iso.size() == 3 &&
            std::all_of(iso.begin(), iso.end(), [](unsigned char c) { return std::isalpha(c); })) {
            rec.iso3 = iso;
            std::transform(rec.iso3.begin(), rec.iso3.end(), rec.iso3.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        }
        rec.trees_planted = to_number(lookup(props, "trees_planted"));
        rec.survival_rate = parse_rate(lookup(props, "survival_rate"));
        rec.area_km2_reported = lookup_area_km2(props);

        // Planting date: explicit planting date > intervention year >
        // crediting start > registration date.
        const std::pair<const char*, PlantingDateType> sources[] = {
            {"planting_date", PlantingDateType::planting},
            {"intervention_year", PlantingDateType::intervention_year},
            {"crediting_start", PlantingDateType::crediting_start},
            {"registration_date", PlantingDateType::registration},
        };
        for (const auto& [field, type] : sources) {
            const std::string text = lookup(props, field);
            if (text.empty()) continue;
            if (auto d = parse_date(text)) {
                rec.planting_date = d;
                rec.planting_date_type = type;
                if (type == PlantingDateType::planting) {
                    if (auto declared = parse_planting_date_type(lookup(props, "planting_date_type"))) {
                        rec.planting_date_type = *declared;
                    }
                }
                break;
            }
            result.warnings.push_back(
                fmt::format("site '{}': unparseable {} '{}'; date type set to unknown", site_id, field, text));
            break;
        }

        if (!f.contains("geometry") || f["geometry"].is_null()) {
            throw IngestError(fmt::format("site '{}' has no geometry", site_id));
        }
        SiteGeometry geom;
        try {
            geom = parse_geometry(f["geometry"]);
        } catch (const IngestError&) {
            throw;
        } catch (const Error& e) {
            throw IngestError(fmt::format("site '{}': {}", site_id, e.what()));
        }
        check_coordinates(geom, site_id);

        std::vector<SiteGeometry> parts = derive_geometry(geom, opts);
        if (parts.size() == 1) {
            rec.geometry = std::move(parts.front());
            rec.area_km2 = spherical_area_km2(*rec.geometry.derived);
            result.sites.push_back(std::move(rec));
        } else {
            for (std::size_t k = 0; k < parts.size(); ++k) {
                SiteRecord child = rec;
                child.site_id = fmt::format("{}#{}", site_id, k + 1);
                child.parent_id = site_id;
                child.geometry = std::move(parts[k]);
                child.area_km2 = spherical_area_km2(*child.geometry.derived);
                result.sites.push_back(std::move(child));
            }
        }
    }

    std::sort(result.sites.begin(), result.sites.end(),
              [](const SiteRecord& a, const SiteRecord& b) { return a.site_id < b.site_id; });
    std::vector<std::string> collisions;
    for (std::size_t i = 1; i < result.sites.size(); ++i) {
        if (result.sites[i].site_id == result.sites[i - 1].site_id &&
            (collisions.empty() || collisions.back() != result.sites[i].site_id)) {
            collisions.push_back(result.sites[i].site_id);
        }
    }
    if (!collisions.empty()) {
        throw IngestError(fmt::format("duplicate site ids: {}", fmt::join(collisions, ", ")));
    }
    return result;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

IngestResult ingest_catalog(std::span<const std::filesystem::path> paths,
                            const std::optional<std::filesystem::path>& metadata_csv, const GeometryOptions& opts) {
    std::map<std::string, std::map<std::string, std::string>> metadata;
    if (metadata_csv) {
        const csv::Table t = csv::read(*metadata_csv);
        const std::size_t id_col = t.column("site_id");
        for (const auto& row : t.rows) {
            auto& m = metadata[row[id_col]];
            for (std::size_t c = 0; c < t.header.size(); ++c) m[t.header[c]] = row[c];
        }
    }

    IngestResult all;
    for (const auto& p : paths) {
        IngestResult part = ingest_features(read_json_file(p), p.filename().string(), metadata, opts);
        std::move(part.sites.begin(), part.sites.end(), std::back_inserter(all.sites));
        std::move(part.warnings.begin(), part.warnings.end(), std::back_inserter(all.warnings));
    }
    std::sort(all.sites.begin(), all.sites.end(),
              [](const SiteRecord& a, const SiteRecord& b) { return a.site_id < b.site_id; });
    std::vector<std::string> collisions;
    for (std::size_t i = 1; i < all.sites.size(); ++i) {
        if (all.sites[i].site_id == all.sites[i - 1].site_id) collisions.push_back(all.sites[i].site_id);
    }
    if (!collisions.empty()) {
        throw IngestError(fmt::format("duplicate site ids across catalog files: {}", fmt::join(collisions, ", ")));
    }
    return all;
}

FilterDecision filter_afforestation(std::string_view name, std::string_view description,
                                    std::string_view classification, const FilterRules& rules) {
    FilterDecision d;
    const std::string cls = lower(trim(classification));
    if (!cls.empty()) {
        for (const auto& allowed : rules.classifications) {
            if (cls == lower(allowed)) {
                d.keep = true;
                d.rule = "classification";
                d.reason = fmt::format("classification '{}' is allow-listed", trim(classification));
                return d;
            }
        }
    }
    const std::string text = lower(name) + "\n" + lower(description);
    for (const auto& kw : rules.keywords) {
        if (text.find(lower(kw)) != std::string::npos) {
            d.keep = true;
            d.rule = "keyword";
            d.reason = fmt::format("keyword '{}' in name/description", kw);
            return d;
        }
    }
    d.rule = "none";
    d.reason = cls.empty() ? "no allow-listed classification or keyword"
                           : fmt::format("classification '{}' not allow-listed and no keyword match",
                                         trim(classification));
    return d;
}

std::vector<AdminUnit> read_admin_layer(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    std::vector<AdminUnit> units;
    std::size_t index = 0;
    for (const auto& f : doc.at("features")) {
        std::string id;
        if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("admin_id")) {
            id = property_string(f["properties"]["admin_id"]);
        }
        if (id.empty()) id = fmt::format("admin:{}", index);
        const SiteGeometry g = parse_geometry(f.at("geometry"));
        for (std::size_t k = 0; k < g.reported.size(); ++k) {
            units.push_back({g.reported.size() == 1 ? id : fmt::format("{}#{}", id, k + 1), g.reported[k]});
        }
        ++index;
    }
    return units;
}

std::vector<Polyline> read_roads(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    std::vector<Polyline> roads;
    auto line = [](const json& coords) {
        Polyline l;
        for (const auto& p : coords) l.push_back(parse_position(p));
        return l;
    };
    for (const auto& f : doc.at("features")) {
        const json& g = f.at("geometry");
        const std::string type = g.at("type").get<std::string>();
        if (type == "LineString") {
            roads.push_back(line(g.at("coordinates")));
        } else if (type == "MultiLineString") {
            for (const auto& part : g.at("coordinates")) roads.push_back(line(part));
        } else {
            throw ConfigError(fmt::format("roads '{}': unsupported geometry '{}'", path.string(), type));
        }
    }
    return roads;
}

}  // namespace ldis
