#pragma once

// Per-site overlay statistics from class-coded, continuous and loss-year grids
// and from road polylines. Pixel inclusion is the pixel-centre rule throughout.

#include "ldis/geometry.hpp"
#include "ldis/grid.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ldis {

struct ZonalCount {
    long long in_class = 0;
    long long valid = 0;  // non-nodata pixels with centre in the zone

    std::optional<double> fraction() const {
        if (valid == 0) return std::nullopt;
        return static_cast<double>(in_class) / static_cast<double>(valid);
    }
};

ZonalCount zonal_class_count(const GridLayer& layer, const Polygon& zone, const std::set<long>& classes);

/// nullopt when the zone misses the layer or holds no valid pixel centre.
std::optional<double> zonal_class_fraction(const GridLayer& layer, const Polygon& zone,
                                           const std::set<long>& classes);

using Polyline = std::vector<LonLat>;

/// Total great-circle length of `roads` inside `zone`, in km. Edges of the
/// roads and of the zone are treated as great-circle arcs.
double clipped_length_km(std::span<const Polyline> roads, const Polygon& zone);

/// Road km per zone km^2; nullopt when the road layer is empty.
std::optional<double> road_density(std::span<const Polyline> roads, const Polygon& zone);

/// Fraction of the zone covered by roads buffered by `buffer_m` on each side.
std::optional<double> road_area_fraction(std::span<const Polyline> roads, const Polygon& zone,
                                         double buffer_m);

inline constexpr int kLossFirstYear = 2001;
inline constexpr int kLossLastYear = 2023;

struct LossWindows {
    double pre5 = 0.0;   // loss in [y-5, y-1]
    double pre1 = 0.0;   // loss in {y-1}
    double post5 = 0.0;  // loss in [y+1, y+5]
    bool pre5_partial = false;
    bool pre1_partial = false;
    bool post5_partial = false;
    long long pixel_count = 0;
};

/// Loss-year cells hold 0 for no loss and k for loss in 2000 + k. Windows are
/// clipped to the 2001-2023 layer range and flagged when clipped. nullopt when
/// the planting year lies outside 2000-2023 or the zone has no valid pixels.
std::optional<LossWindows> tree_loss_windows(const GridLayer& lossyear, const Polygon& zone,
                                             int planting_year);

/// Horn 3x3 slope in degrees for every cell; cells without a complete valid
/// neighbourhood get the layer's nodata value. Rows are processed in parallel.
GridLayer slope_degrees(const GridLayer& dem);

struct TerrainStats {
    double mean_elevation_m = 0.0;
    std::optional<double> mean_slope_deg;
    long long elevation_count = 0;
    long long slope_count = 0;
};

/// Means over valid cells with centre in the zone. `slope` must come from
/// slope_degrees(dem). nullopt when no valid elevation cell is in the zone.
std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const GridLayer& slope,
                                          const Polygon& zone);
std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const Polygon& zone);

/// Nearest cell to `p`; a point on a cell boundary goes to the lower
/// row/column index. nullopt outside the layer.
std::optional<std::pair<int, int>> nearest_cell(const GridLayer& layer, LonLat p) noexcept;

enum class ClimateVariable { precip, tmin, tmax };
const char* to_string(ClimateVariable v) noexcept;

/// Monthly grids per calendar year (12 entries, January first).
struct MonthlyLayers {
    std::map<int, std::vector<GridLayer>> by_year;
};

inline constexpr std::array<int, 4> kClimateOffsets{0, 1, 2, 5};

struct ClimateSamples {
    // [variable][offset index] -> annual mean of the monthly samples
    std::array<std::array<std::optional<double>, kClimateOffsets.size()>, 3> values{};
};

/// Mean of the 12 monthly nearest-cell samples of `year`; nullopt when the
/// year is missing or has no valid sample.
std::optional<double> sample_year_mean(const MonthlyLayers& layers, int year, LonLat p);

ClimateSamples sample_climate_at_centroid(const std::array<const MonthlyLayers*, 3>& layers,
                                          LonLat centroid, int planting_year);

struct AugmentationRecord {
    std::string site_id;
    std::optional<double> built_fraction;
    std::optional<double> water_fraction;
    std::optional<double> other_landcover_fraction;
    std::optional<double> stable_cropland_fraction;
    std::optional<double> treecover_at_planting_fraction;
    std::optional<double> cropland_from_tree_fraction;
    std::optional<double> cropland_to_tree_fraction;
    std::optional<double> short_veg_after_loss_fraction;
    std::optional<double> road_km_per_km2;
    std::optional<double> road_area_fraction;  // only with a road buffer
    std::optional<LossWindows> loss;
    std::optional<TerrainStats> terrain;
    ClimateSamples climate;
};

}  // namespace ldis
