#pragma once

#include "ldis/geometry.hpp"

#include <map>
#include <optional>
#include <string>

namespace ldis {

struct Date {
    int year = 0;
    int month = 0;  // 0 when only the year is known
    int day = 0;    // 0 when unknown

    std::string iso() const;
    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Parses YYYY, YYYY-MM, YYYY-MM-DD (optionally with a time suffix),
/// DD/MM/YYYY and DD.MM.YYYY.
std::optional<Date> parse_date(std::string_view text);

enum class PlantingDateType { planting, registration, intervention_year, crediting_start, unknown };

const char* to_string(PlantingDateType t) noexcept;
std::optional<PlantingDateType> parse_planting_date_type(std::string_view text);

struct SiteRecord {
    std::string site_id;
    std::string project_id;
    std::string parent_id;  // set for parts split from a multipart geometry
    std::string host_name;
    std::string url;
    std::string iso3 = "unknown";
    std::string project_name;
    std::string description;
    std::string classification;

    SiteGeometry geometry;

    std::optional<Date> planting_date;
    PlantingDateType planting_date_type = PlantingDateType::unknown;

    std::optional<double> trees_planted;
    std::string species_reported;
    std::optional<double> survival_rate;
    std::optional<double> area_km2_reported;
    double area_km2 = 0.0;

    /// Every reported property, verbatim, keyed by its source name.
    std::map<std::string, std::string> reported;

    std::optional<int> planting_year() const {
        if (planting_date) return planting_date->year;
        return std::nullopt;
    }
    const Polygon& polygon() const { return *geometry.derived; }
};

}  // namespace ldis
