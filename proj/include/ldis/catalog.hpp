#pragma once

// Catalog ingestion: GeoJSON features with reported properties, harmonised
// into SiteRecords, plus the afforestation project-type filter and readers
// for the vector layers.

#include "ldis/geometry.hpp"
#include "ldis/overlay.hpp"
#include "ldis/relations.hpp"
#include "ldis/site.hpp"

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ldis {

/// Throws Error for unsupported or malformed geometry objects.
SiteGeometry parse_geometry(const nlohmann::json& geometry);

/// "250 ha" -> 2.5; also km2/km²/sqkm, m2, acres. Bare numbers are hectares.
std::optional<double> parse_area_km2(std::string_view text);

struct IngestResult {
    std::vector<SiteRecord> sites;  // sorted by site_id
    std::vector<std::string> warnings;
};

/// Harmonises a FeatureCollection (or single Feature). `metadata` rows keyed
/// by site_id fill properties that the feature does not carry. Throws
/// IngestError on duplicate site ids and GeometryError on bad coordinates.
IngestResult ingest_features(const nlohmann::json& collection, const std::string& source_name,
                             const std::map<std::string, std::map<std::string, std::string>>& metadata = {},
                             const GeometryOptions& opts = {});

IngestResult ingest_catalog(std::span<const std::filesystem::path> paths,
                            const std::optional<std::filesystem::path>& metadata_csv = std::nullopt,
                            const GeometryOptions& opts = {});

struct FilterRules {
    std::set<std::string> classifications{"arr", "afforestation", "reforestation"};
    std::vector<std::string> keywords{"afforestation", "reforestation", "tree planting", "revegetation"};
};

struct FilterDecision {
    bool keep = false;
    std::string rule;    // classification / keyword / none
    std::string reason;  // always set
};

FilterDecision filter_afforestation(std::string_view name, std::string_view description,
                                    std::string_view classification, const FilterRules& rules = {});

/// Admin units: polygons (multipolygons are split) with an `admin_id` property.
std::vector<AdminUnit> read_admin_layer(const std::filesystem::path& path);

/// LineString / MultiLineString features.
std::vector<Polyline> read_roads(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ldis
