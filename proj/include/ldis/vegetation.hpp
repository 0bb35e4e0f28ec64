#pragma once

#include "ldis/geometry.hpp"
#include "ldis/grid.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldis {

enum class VegIndex { ndvi, ndre, savi };
const char* to_string(VegIndex i) noexcept;
inline constexpr std::array<VegIndex, 3> kVegIndices{VegIndex::ndvi, VegIndex::ndre, VegIndex::savi};

/// Soil brightness correction factor of SAVI.
inline constexpr double kSaviL = 0.5;

double ndvi(double nir, double red) noexcept;
double ndre(double nir, double rededge) noexcept;
/// (nir - red) / (nir + red + L) * (1 + L)
double savi(double nir, double red) noexcept;

/// One month of imagery. Band names: red, nir, rededge, qa_cloud.
struct BandStack {
    std::string tile;
    int year = 0;
    int month = 0;
    std::map<std::string, GridLayer> bands;

    const GridLayer& band(const std::string& name) const;  // throws ConfigError
};

/// Pixels with a zero denominator or nodata input become nodata. Parallel
/// over rows.
GridLayer compute_index(const BandStack& stack, VegIndex index);

struct CloudScreen {
    bool keep = false;
    std::optional<double> cloud_fraction;
    std::string reason;
};

/// Keep iff cloudy / valid pixel centres in the zone is strictly below
/// `max_fraction`. qa_cloud == 1 marks a cloudy pixel.
CloudScreen cloud_fraction_screen(const BandStack& stack, const Polygon& zone, double max_fraction = 0.20);

using MonthlyMeans = std::array<std::optional<double>, 12>;

/// Calendar months (1-12, ascending) of the three largest means; ties go to
/// the earlier month. nullopt with fewer than three valid months.
std::optional<std::array<int, 3>> top_green_months(const MonthlyMeans& means);

/// Greenest months observed by region in a 2023 reference year.
std::optional<std::array<int, 3>> continent_green_months(std::string_view continent);

enum class Zone { site, annulus };
const char* to_string(Zone z) noexcept;

inline constexpr std::array<int, 5> kVegPeriods{-1, 0, 1, 2, 5};

struct ZoneIndexSeries {
    std::string site_id;
    Zone zone = Zone::site;
    int period = 0;
    VegIndex index = VegIndex::ndvi;
    double mean_value = 0.0;
    long long pixel_count = 0;
    bool evaluable = false;
};

struct VegetationOptions {
    int reference_year = 2023;
    double max_cloud_fraction = 0.20;
    /// Fixed months for the site, overriding per-site selection.
    std::optional<std::array<int, 3>> months_override;
};

struct ZoneMean {
    double mean = 0.0;
    long long count = 0;
};

/// Mean of valid cells with centre in the zone.
std::optional<ZoneMean> zone_mean(const GridLayer& layer, const Polygon& zone);

/// Per-pixel median over stacks sharing one grid; nodata is skipped and an
/// even count averages the two middle values.
BandStack median_composite(std::span<const BandStack* const> stacks);

/// One record per (zone, period, index) ordered by zone, period, index.
/// Months are the site's greenest months in the reference year (or the
/// override); when those cannot be determined every month of the period is
/// used. Stacks failing the cloud screen over the site are ignored.
std::vector<ZoneIndexSeries> zone_index_series(std::span<const BandStack> stacks, const std::string& site_id,
                                               int planting_year, const Polygon& site,
                                               const Polygon& annulus, const VegetationOptions& opts = {});
std::vector<ZoneIndexSeries> zone_index_series(std::span<const BandStack* const> stacks, const std::string& site_id,
                                               int planting_year, const Polygon& site,
                                               const Polygon& annulus, const VegetationOptions& opts = {});

}  // namespace ldis
