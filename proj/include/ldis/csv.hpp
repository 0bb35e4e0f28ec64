#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ldis::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position; throws Error when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

/// Comma-separated with double-quote escaping; the first line is the header.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

/// Shortest round-trip-safe representation used in every output table.
std::string number(double v);

}  // namespace ldis::csv
