#include "ldis/csv.hpp"

#include "ldis/error.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace ldis::csv {

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(fmt::format("csv: missing column '{}'", name));
}

bool Table::has_column(std::string_view name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

Table parse(std::string_view text) {
    Table t;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false, any = false, first = true;
    auto end_row = [&] {
        fields.push_back(std::move(field));
        field.clear();
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            fields.resize(t.header.size());
            t.rows.push_back(std::move(fields));
        }
        fields.clear();
        any = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',': fields.push_back(std::move(field)); field.clear(); any = true; break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) end_row();
                break;
            default: field += c; any = true;
        }
    }
    if (any || !field.empty()) end_row();
    return t;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open csv '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    return out;
}

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace ldis::csv
