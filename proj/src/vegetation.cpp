#include "ldis/vegetation.hpp"

#include "ldis/error.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>

namespace ldis {

const char* to_string(VegIndex i) noexcept {
    switch (i) {
        case VegIndex::ndvi: return "ndvi";
        case VegIndex::ndre: return "ndre";
        case VegIndex::savi: return "savi";
    }
    return "ndvi";
}

const char* to_string(Zone z) noexcept { return z == Zone::site ? "site" : "annulus"; }

double ndvi(double nir, double red) noexcept { return (nir - red) / (nir + red); }
double ndre(double nir, double rededge) noexcept { return (nir - rededge) / (nir + rededge); }
double savi(double nir, double red) noexcept { return (nir - red) / (nir + red + kSaviL) * (1.0 + kSaviL); }

const GridLayer& BandStack::band(const std::string& name) const {
    auto it = bands.find(name);
    if (it == bands.end()) {
        throw ConfigError(fmt::format("band stack {}-{:02} ({}) is missing band '{}'", year, month, tile, name));
    }
    return it->second;
}

GridLayer compute_index(const BandStack& stack, VegIndex index) {
    const GridLayer& nir = stack.band("nir");
    const GridLayer& other = stack.band(index == VegIndex::ndre ? "rededge" : "red");
    if (!nir.same_grid(other)) throw ConfigError("band grids differ in shape or georeferencing");
    GridLayer out = nir;
    out.semantics = LayerSemantics::continuous;
    const double nodata = out.nodata;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.values.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const double a = nir.values[static_cast<std::size_t>(k)];
        const double b = other.values[static_cast<std::size_t>(k)];
        double& v = out.values[static_cast<std::size_t>(k)];
        if (nir.is_nodata(a) || other.is_nodata(b)) {
            v = nodata;
            continue;
        }
        switch (index) {
            case VegIndex::ndvi:
            case VegIndex::ndre:
                v = (a + b) == 0.0 ? nodata : (a - b) / (a + b);
                break;
            case VegIndex::savi:
                v = (a + b + kSaviL) == 0.0 ? nodata : savi(a, b);
                break;
        }
    }
    return out;
}

CloudScreen cloud_fraction_screen(const BandStack& stack, const Polygon& zone, double max_fraction) {
    const GridLayer& qa = stack.band("qa_cloud");
    CloudScreen s;
    long long valid = 0, cloudy = 0;
    if (qa.extent().intersects(bounding_box(zone))) {
        ZoneScanner(zone).for_each(qa, [&](int r, int c) {
            const double v = qa.at(r, c);
            if (qa.is_nodata(v)) return;
            ++valid;
            if (v == 1.0) ++cloudy;
        });
    }
    if (valid == 0) {
        s.reason = "not evaluable: no valid pixels in zone";
        return s;
    }
    s.cloud_fraction = static_cast<double>(cloudy) / static_cast<double>(valid);
    s.keep = *s.cloud_fraction < max_fraction;
    if (!s.keep) s.reason = fmt::format("cloud fraction {:.4f} not below {:.4f}", *s.cloud_fraction, max_fraction);
    return s;
}

std::optional<std::array<int, 3>> top_green_months(const MonthlyMeans& means) {
    std::vector<int> months;
    for (int m = 0; m < 12; ++m) {
        if (means[static_cast<std::size_t>(m)]) months.push_back(m);
    }
    if (months.size() < 3) return std::nullopt;
    std::stable_sort(months.begin(), months.end(), [&](int a, int b) {
        return *means[static_cast<std::size_t>(a)] > *means[static_cast<std::size_t>(b)];
    });
    std::array<int, 3> top{months[0] + 1, months[1] + 1, months[2] + 1};
    std::sort(top.begin(), top.end());
    return top;
}

std::optional<std::array<int, 3>> continent_green_months(std::string_view continent) {
    std::string key(continent);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "africa") return std::array<int, 3>{1, 4, 5};
    if (key == "asia") return std::array<int, 3>{6, 7, 8};
    if (key == "europe") return std::array<int, 3>{4, 5, 6};
    if (key == "south america" || key == "south_america") return std::array<int, 3>{2, 3, 10};
    return std::nullopt;
}

std::optional<ZoneMean> zone_mean(const GridLayer& layer, const Polygon& zone) {
    if (zone.empty() || !layer.extent().intersects(bounding_box(zone))) return std::nullopt;
    ZoneMean m;
    double sum = 0.0;
    ZoneScanner(zone).for_each(layer, [&](int r, int c) {
        const double v = layer.at(r, c);
        if (layer.is_nodata(v)) return;
        sum += v;
        ++m.count;
    });
    if (m.count == 0) return std::nullopt;
    m.mean = sum / static_cast<double>(m.count);
    return m;
}

BandStack median_composite(std::span<const BandStack* const> stacks) {
    if (stacks.empty()) throw Error("median composite of zero stacks");
    BandStack out;
    out.tile = stacks.front()->tile;
    out.year = stacks.front()->year;
    out.month = 0;
    for (const auto& [name, first] : stacks.front()->bands) {
        std::vector<const GridLayer*> layers;
        for (const BandStack* s : stacks) {
            const GridLayer& g = s->band(name);
            if (!g.same_grid(first)) throw ConfigError(fmt::format("band '{}' grids differ across stacks", name));
            layers.push_back(&g);
        }
        GridLayer comp = first;
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(comp.values.size());
#pragma omp parallel
        {
            std::vector<double> buf;
            buf.reserve(layers.size());
#pragma omp for schedule(static)
            for (std::ptrdiff_t k = 0; k < n; ++k) {
                buf.clear();
                for (const GridLayer* g : layers) {
                    const double v = g->values[static_cast<std::size_t>(k)];
                    if (!g->is_nodata(v)) buf.push_back(v);
                }
                double& cell = comp.values[static_cast<std::size_t>(k)];
                if (buf.empty()) {
                    cell = comp.nodata;
                    continue;
                }
                std::sort(buf.begin(), buf.end());
                const std::size_t m = buf.size();
                cell = m % 2 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
            }
        }
        out.bands.emplace(name, std::move(comp));
    }
    return out;
}

std::vector<ZoneIndexSeries> zone_index_series(std::span<const BandStack> stacks, const std::string& site_id,
                                               int planting_year, const Polygon& site,
                                               const Polygon& annulus, const VegetationOptions& opts) {
    std::vector<const BandStack*> ptrs;
    ptrs.reserve(stacks.size());
    for (const BandStack& s : stacks) ptrs.push_back(&s);
    return zone_index_series(std::span<const BandStack* const>(ptrs), site_id, planting_year, site, annulus, opts);
}

std::vector<ZoneIndexSeries> zone_index_series(std::span<const BandStack* const> stacks, const std::string& site_id,
                                               int planting_year, const Polygon& site,
                                               const Polygon& annulus, const VegetationOptions& opts) {
    // Cloud screening over the site footprint, once per stack.
    std::vector<const BandStack*> accepted;
    for (const BandStack* s : stacks) {
        if (cloud_fraction_screen(*s, site, opts.max_cloud_fraction).keep) accepted.push_back(s);
    }
    // Canonical order so the result does not depend on how stacks were supplied.
    std::sort(accepted.begin(), accepted.end(), [](const BandStack* a, const BandStack* b) {
        return std::tie(a->year, a->month, a->tile) < std::tie(b->year, b->month, b->tile);
    });

    std::optional<std::array<int, 3>> months = opts.months_override;
    if (!months) {
        MonthlyMeans means{};
        for (int m = 1; m <= 12; ++m) {
            std::vector<const BandStack*> in_month;
            for (const BandStack* s : accepted) {
                if (s->year == opts.reference_year && s->month == m) in_month.push_back(s);
            }
            if (in_month.empty()) continue;
            const BandStack comp = median_composite(in_month);
            if (const auto zm = zone_mean(compute_index(comp, VegIndex::ndvi), site)) {
                means[static_cast<std::size_t>(m - 1)] = zm->mean;
            }
        }
        months = top_green_months(means);
    }

    std::vector<ZoneIndexSeries> out;
    out.reserve(2 * kVegPeriods.size() * kVegIndices.size());
    std::vector<ZoneIndexSeries> annulus_out;
    for (int period : kVegPeriods) {
        const int year = planting_year + period;
        std::vector<const BandStack*> chosen;
        for (const BandStack* s : accepted) {
            if (s->year != year) continue;
            if (months && std::find(months->begin(), months->end(), s->month) == months->end()) continue;
            chosen.push_back(s);
        }
        std::optional<BandStack> comp;
        if (!chosen.empty()) comp = median_composite(chosen);
        for (VegIndex index : kVegIndices) {
            ZoneIndexSeries rs{site_id, Zone::site, period, index, 0.0, 0, false};
            ZoneIndexSeries ra{site_id, Zone::annulus, period, index, 0.0, 0, false};
            if (comp) {
                const GridLayer grid = compute_index(*comp, index);
                if (const auto m = zone_mean(grid, site)) {
                    rs.mean_value = m->mean;
                    rs.pixel_count = m->count;
                    rs.evaluable = true;
                }
                if (const auto m = zone_mean(grid, annulus)) {
                    ra.mean_value = m->mean;
                    ra.pixel_count = m->count;
                    ra.evaluable = true;
                }
            }
            out.push_back(rs);
            annulus_out.push_back(ra);
        }
    }
    out.insert(out.end(), annulus_out.begin(), annulus_out.end());
    return out;
}

}  // namespace ldis
