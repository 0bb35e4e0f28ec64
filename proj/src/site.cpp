#include "ldis/site.hpp"

#include <charconv>
#include <fmt/format.h>
#include <regex>

namespace ldis {

namespace {

bool valid_ymd(int y, int m, int d) {
    if (y < 1000 || y > 9999) return false;
    if (m == 0) return d == 0;
    if (m < 1 || m > 12) return false;
    if (d == 0) return true;
    static constexpr int days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (d < 1 || d > days[m - 1]) return false;
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return !(m == 2 && d == 29 && !leap);
}

}  // namespace

std::string Date::iso() const {
    if (month == 0) return fmt::format("{:04d}", year);
    if (day == 0) return fmt::format("{:04d}-{:02d}", year, month);
    return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day);
}

std::optional<Date> parse_date(std::string_view text) {
    static const std::regex iso(R"(^\s*(\d{4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?(?:[T ][0-9:.+\-Z]*)?\s*$)");
    static const std::regex dmy(R"(^\s*(\d{1,2})[/.](\d{1,2})[/.](\d{4})\s*$)");
    // Numeric JSON values may arrive as "2015.0".
    static const std::regex year_float(R"(^\s*(\d{4})\.0*\s*$)");
    const std::string s(text);
    std::smatch m;
    Date d;
    if (std::regex_match(s, m, iso)) {
        d.year = std::stoi(m[1].str());
        if (m[2].matched) d.month = std::stoi(m[2].str());
        if (m[3].matched) d.day = std::stoi(m[3].str());
    } else if (std::regex_match(s, m, dmy)) {
        d.day = std::stoi(m[1].str());
        d.month = std::stoi(m[2].str());
        d.year = std::stoi(m[3].str());
    } else if (std::regex_match(s, m, year_float)) {
        d.year = std::stoi(m[1].str());
    } else {
        return std::nullopt;
    }
    if (!valid_ymd(d.year, d.month, d.day)) return std::nullopt;
    return d;
}

const char* to_string(PlantingDateType t) noexcept {
    switch (t) {
        case PlantingDateType::planting: return "planting";
        case PlantingDateType::registration: return "registration";
        case PlantingDateType::intervention_year: return "intervention_year";
        case PlantingDateType::crediting_start: return "crediting_start";
        case PlantingDateType::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<PlantingDateType> parse_planting_date_type(std::string_view text) {
    for (auto t : {PlantingDateType::planting, PlantingDateType::registration, PlantingDateType::intervention_year,
                   PlantingDateType::crediting_start, PlantingDateType::unknown}) {
        if (text == to_string(t)) return t;
    }
    return std::nullopt;
}

}  // namespace ldis
