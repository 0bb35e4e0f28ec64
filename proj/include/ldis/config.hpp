#pragma once

// JSON run configuration. Relative paths resolve against the directory of
// the config file; every referenced path must exist when the config loads.
// The schema is documented in docs/config.md.

#include "ldis/catalog.hpp"
#include "ldis/geometry.hpp"
#include "ldis/scoring.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ldis {

namespace fs = std::filesystem;

struct ClassLayerConfig {
    fs::path path;
    std::set<long> classes;
};

/// One land-cover grid with a class set per derived fraction.
struct LandcoverConfig {
    fs::path path;
    std::set<long> water;
    std::set<long> other;
    std::set<long> stable_cropland;
    std::set<long> cropland_from_tree;
    std::set<long> cropland_to_tree;
    std::set<long> short_veg_after_loss;
};

/// Tree-cover grid: a single layer or one per year (the planting year is used).
struct TreecoverConfig {
    std::optional<fs::path> path;
    std::map<int, fs::path> by_year;
    std::set<long> classes;
};

struct ClimateConfig {
    // year -> 12 monthly grids
    std::map<int, std::vector<fs::path>> precip, tmin, tmax;
};

struct StackEntry {
    std::string tile;  // site id, or empty to serve every site inside the extent
    int year = 0;
    int month = 0;
    std::map<std::string, fs::path> bands;
};

struct VegetationConfig {
    std::vector<StackEntry> stacks;
    int reference_year = 2023;
    double annulus_m = 500.0;
    double max_cloud_fraction = 0.20;
    /// Fixed greenest months keyed by iso3 (or "*" for every site).
    std::map<std::string, std::array<int, 3>> green_months;
    int bootstrap_reps = 1000;
    double bootstrap_level = 0.95;
};

struct RunConfig {
    fs::path source;           // config file, empty when built in memory
    nlohmann::json document;   // as loaded, for the verbatim copy
    std::string raw_text;

    std::vector<fs::path> catalog;
    std::optional<fs::path> metadata_csv;
    fs::path output_dir = "ldis_out";
    std::uint64_t seed = 0;
    int workers = 0;  // 0: OpenMP default

    bool filter_enabled = false;
    FilterRules filter;

    ScoringConfig scoring;
    GeometryOptions geometry;

    std::optional<fs::path> admin;
    std::optional<fs::path> roads;
    std::optional<ClassLayerConfig> built;
    std::optional<LandcoverConfig> landcover;
    std::optional<TreecoverConfig> treecover;
    std::optional<fs::path> lossyear;
    std::optional<fs::path> dem;
    std::optional<ClimateConfig> climate;
    std::optional<VegetationConfig> vegetation;
};

/// Throws ConfigError naming the offending key or missing path.
RunConfig parse_config(const nlohmann::json& doc, const fs::path& base_dir, bool check_paths = true);
RunConfig load_config(const fs::path& path);

}  // namespace ldis
