#pragma once

// Location data integrity indicators and score.
//
// Polarity: an indicator passes when no integrity issue is detected, so the
// score counts passes. Indicators whose inputs are missing are not evaluable
// and count toward neither `passed` nor `evaluated`.

#include "ldis/geometry.hpp"
#include "ldis/overlay.hpp"
#include "ldis/relations.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldis {

struct ScoringConfig {
    double infra_threshold = 0.10;               // strict >
    double landcover_threshold = 0.20;           // >=
    double forest_at_planting_threshold = 0.20;  // >=
    double stable_cropland_threshold = 0.20;     // >=
    double circle_threshold = 0.95;              // >=
    double admin_threshold = 0.98;               // strict >
    double dup_threshold = 0.95;                 // strict >
    double road_buffer_m = 0.0;                  // 0: any clipped road length counts

    /// Throws ConfigError unless every threshold lies in (0, 1).
    void validate() const;
};

enum class Indicator {
    road_presence,
    built_area_presence,
    forest_at_planting_glad,
    other_landcover_score,
    nesting_polygon,
    intersecting_polygon,
    exact_admin_area,
    perfect_circle_indicator,
    geometry_validity,
    stable_cropland_score,
};

inline constexpr std::size_t kIndicatorCount = 10;
const char* to_string(Indicator i) noexcept;
inline constexpr std::array<Indicator, kIndicatorCount> kIndicators{
    Indicator::road_presence,       Indicator::built_area_presence,  Indicator::forest_at_planting_glad,
    Indicator::other_landcover_score, Indicator::nesting_polygon,    Indicator::intersecting_polygon,
    Indicator::exact_admin_area,    Indicator::perfect_circle_indicator, Indicator::geometry_validity,
    Indicator::stable_cropland_score,
};

enum class IndicatorState { pass, fail, not_evaluable };
const char* to_string(IndicatorState s) noexcept;  // pass / fail / na

struct IndicatorVector {
    std::array<IndicatorState, kIndicatorCount> states;

    IndicatorVector() { states.fill(IndicatorState::not_evaluable); }
    IndicatorState& operator[](Indicator i) { return states[static_cast<std::size_t>(i)]; }
    IndicatorState operator[](Indicator i) const { return states[static_cast<std::size_t>(i)]; }
};

/// Relations of one site, as seen from that site.
struct SiteRelations {
    bool nested = false;        // subset of (or duplicate of) another site
    bool intersecting = false;  // partial overlap with another site
    bool superset = false;      // contains a smaller site; reported, not scored
};

/// Scans relation records (site_a orientation) for `site_id`.
SiteRelations relations_for(std::string_view site_id, std::span<const RelationRecord> records);

struct IndicatorInputs {
    std::optional<GeometryQuality> quality;
    std::optional<SiteRelations> relations;  // nullopt: relation stage not run
    std::optional<AdminMatch> admin;         // nullopt: no admin layer
    std::optional<AugmentationRecord> augment;
};

IndicatorVector evaluate_indicators(const IndicatorInputs& in, const ScoringConfig& cfg = {});

struct LdisScore {
    std::string site_id;
    int passed = 0;
    int evaluated = 0;
    bool perfect = false;
};

LdisScore ldis_score(const IndicatorVector& v, std::string site_id = {});

// ---------------------------------------------------------------------------
// Corpus report

struct SizeBin {
    std::string label;
    double lower_km2;
    double upper_km2;  // exclusive; infinity for the last bin
};

/// <10, 10-50, 50-100, 100-500, 500-1000, 1000-2000, 2000-5000, >5000 km^2.
const std::vector<SizeBin>& size_bins();
std::size_t size_bin_of(double area_km2);

struct ScoredSite {
    LdisScore score;
    IndicatorVector indicators;
    double area_km2 = 0.0;
    bool nested = false;
    bool point_origin = false;
};

struct SizeBinRow {
    std::string label;
    long long count = 0;
    double count_pct = 0.0;
    double total_area_km2 = 0.0;
    double total_pct = 0.0;
    double nested_area_km2 = 0.0;
    double nested_pct = 0.0;  // of the bin's own area
};

struct CompletenessReport {
    long long site_count = 0;
    std::array<double, kIndicatorCount> completeness{};  // evaluable / sites
    std::array<long long, kIndicatorCount + 1> histogram{};  // by `passed`
    std::array<long long, kIndicatorCount + 1> histogram_point_origin{};
    std::array<long long, kIndicatorCount + 1> histogram_polygon{};
    long long perfect_count = 0;
    std::vector<SizeBinRow> size_table;
};

/// Empty input yields an empty report (site_count 0, no size rows).
CompletenessReport completeness_report(std::span<const ScoredSite> sites);

}  // namespace ldis
