#include "ldis/scoring.hpp"

#include "ldis/error.hpp"

#include <fmt/format.h>
#include <limits>

namespace ldis {

void ScoringConfig::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"infra_threshold", infra_threshold},
        {"landcover_threshold", landcover_threshold},
        {"forest_at_planting_threshold", forest_at_planting_threshold},
        {"stable_cropland_threshold", stable_cropland_threshold},
        {"circle_threshold", circle_threshold},
        {"admin_threshold", admin_threshold},
        {"dup_threshold", dup_threshold},
    };
    for (const auto& [name, v] : fields) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(fmt::format("scoring.{} must lie in (0, 1), got {}", name, v));
    }
    if (!(road_buffer_m >= 0.0)) throw ConfigError("scoring.road_buffer_m must be >= 0");
}

const char* to_string(Indicator i) noexcept {
    switch (i) {
        case Indicator::road_presence: return "road_presence";
        case Indicator::built_area_presence: return "built_area_presence";
        case Indicator::forest_at_planting_glad: return "forest_at_planting_glad";
        case Indicator::other_landcover_score: return "other_landcover_score";
        case Indicator::nesting_polygon: return "nesting_polygon";
        case Indicator::intersecting_polygon: return "intersecting_polygon";
        case Indicator::exact_admin_area: return "exact_admin_area";
        case Indicator::perfect_circle_indicator: return "perfect_circle_indicator";
        case Indicator::geometry_validity: return "geometry_validity";
        case Indicator::stable_cropland_score: return "stable_cropland_score";
    }
    return "";
}

const char* to_string(IndicatorState s) noexcept {
    switch (s) {
        case IndicatorState::pass: return "pass";
        case IndicatorState::fail: return "fail";
        case IndicatorState::not_evaluable: return "na";
    }
    return "na";
}

SiteRelations relations_for(std::string_view site_id, std::span<const RelationRecord> records) {
    SiteRelations r;
    for (const auto& rec : records) {
        if (rec.site_a != site_id) continue;
        switch (rec.relation) {
            case Relation::duplicate:
            case Relation::a_nested_in_b: r.nested = true; break;
            case Relation::b_nested_in_a: r.superset = true; break;
            case Relation::intersecting: r.intersecting = true; break;
            case Relation::disjoint: break;
        }
    }
    return r;
}

namespace {
IndicatorState fail_if(bool failed) { return failed ? IndicatorState::fail : IndicatorState::pass; }
}  // namespace

IndicatorVector evaluate_indicators(const IndicatorInputs& in, const ScoringConfig& cfg) {
    IndicatorVector v;
    if (in.augment) {
        const AugmentationRecord& a = *in.augment;
        if (cfg.road_buffer_m > 0.0) {
            if (a.road_area_fraction) v[Indicator::road_presence] = fail_if(*a.road_area_fraction > cfg.infra_threshold);
        } else if (a.road_km_per_km2) {
            v[Indicator::road_presence] = fail_if(*a.road_km_per_km2 > 0.0);
        }
        if (a.built_fraction) {
            v[Indicator::built_area_presence] =
                fail_if(*a.built_fraction + a.water_fraction.value_or(0.0) > cfg.infra_threshold);
        }
        if (a.treecover_at_planting_fraction) {
            v[Indicator::forest_at_planting_glad] =
                fail_if(*a.treecover_at_planting_fraction >= cfg.forest_at_planting_threshold);
        }
        if (a.other_landcover_fraction) {
            v[Indicator::other_landcover_score] = fail_if(*a.other_landcover_fraction >= cfg.landcover_threshold);
        }
        if (a.stable_cropland_fraction) {
            v[Indicator::stable_cropland_score] =
                fail_if(*a.stable_cropland_fraction >= cfg.stable_cropland_threshold);
        }
    }
    if (in.relations) {
        v[Indicator::nesting_polygon] = fail_if(in.relations->nested);
        v[Indicator::intersecting_polygon] = fail_if(in.relations->intersecting);
    }
    if (in.admin) v[Indicator::exact_admin_area] = fail_if(in.admin->mutual);
    if (in.quality) {
        v[Indicator::geometry_validity] = fail_if(!in.quality->is_valid);
        if (in.quality->circularity) {
            v[Indicator::perfect_circle_indicator] = fail_if(*in.quality->circularity >= cfg.circle_threshold);
        }
    }
    return v;
}

LdisScore ldis_score(const IndicatorVector& v, std::string site_id) {
    LdisScore s;
    s.site_id = std::move(site_id);
    for (IndicatorState st : v.states) {
        if (st == IndicatorState::pass) ++s.passed;
        if (st != IndicatorState::not_evaluable) ++s.evaluated;
    }
    s.perfect = s.passed == static_cast<int>(kIndicatorCount) && s.evaluated == static_cast<int>(kIndicatorCount);
    return s;
}

// ---------------------------------------------------------------------------

const std::vector<SizeBin>& size_bins() {
    static const std::vector<SizeBin> bins{
        {"<10", 0.0, 10.0},          {"10-50", 10.0, 50.0},       {"50-100", 50.0, 100.0},
        {"100-500", 100.0, 500.0},   {"500-1000", 500.0, 1000.0}, {"1000-2000", 1000.0, 2000.0},
        {"2000-5000", 2000.0, 5000.0}, {">5000", 5000.0, std::numeric_limits<double>::infinity()},
    };
    return bins;
}

std::size_t size_bin_of(double area_km2) {
    const auto& bins = size_bins();
    for (std::size_t b = 0; b < bins.size(); ++b) {
        if (area_km2 < bins[b].upper_km2) return b;
    }
    return bins.size() - 1;
}

CompletenessReport completeness_report(std::span<const ScoredSite> sites) {
    CompletenessReport rep;
    if (sites.empty()) return rep;
    rep.site_count = static_cast<long long>(sites.size());

    std::array<long long, kIndicatorCount> evaluable{};
    const auto& bins = size_bins();
    rep.size_table.resize(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) rep.size_table[b].label = bins[b].label;

    double total_area = 0.0;
    for (const ScoredSite& s : sites) {
        for (std::size_t k = 0; k < kIndicatorCount; ++k) {
            if (s.indicators.states[k] != IndicatorState::not_evaluable) ++evaluable[k];
        }
        const auto p = static_cast<std::size_t>(s.score.passed);
        ++rep.histogram[p];
        ++(s.point_origin ? rep.histogram_point_origin : rep.histogram_polygon)[p];
        if (s.score.perfect) ++rep.perfect_count;

        SizeBinRow& row = rep.size_table[size_bin_of(s.area_km2)];
        ++row.count;
        row.total_area_km2 += s.area_km2;
        if (s.nested) row.nested_area_km2 += s.area_km2;
        total_area += s.area_km2;
    }
    for (std::size_t k = 0; k < kIndicatorCount; ++k) {
        rep.completeness[k] = static_cast<double>(evaluable[k]) / static_cast<double>(rep.site_count);
    }
    for (SizeBinRow& row : rep.size_table) {
        row.count_pct = 100.0 * static_cast<double>(row.count) / static_cast<double>(rep.site_count);
        row.total_pct = total_area > 0.0 ? 100.0 * row.total_area_km2 / total_area : 0.0;
        row.nested_pct = row.total_area_km2 > 0.0 ? 100.0 * row.nested_area_km2 / row.total_area_km2 : 0.0;
    }
    return rep;
}

}  // namespace ldis
