#include "ldis/overlay.hpp"

#include "boost_adapters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ldis {

namespace bg = boost::geometry;

ZonalCount zonal_class_count(const GridLayer& layer, const Polygon& zone, const std::set<long>& classes) {
    ZonalCount count;
    if (!layer.extent().intersects(bounding_box(zone))) return count;
    ZoneScanner(zone).for_each(layer, [&](int r, int c) {
        const double v = layer.at(r, c);
        if (layer.is_nodata(v)) return;
        ++count.valid;
        if (classes.count(static_cast<long>(v)) && static_cast<double>(static_cast<long>(v)) == v) {
            ++count.in_class;
        }
    });
    return count;
}

std::optional<double> zonal_class_fraction(const GridLayer& layer, const Polygon& zone,
                                           const std::set<long>& classes) {
    return zonal_class_count(layer, zone, classes).fraction();
}

// ---------------------------------------------------------------------------

namespace {

bool inside_even_odd(const std::vector<std::vector<Vec2>>& rings, Vec2 p) {
    bool inside = false;
    for (const auto& ring : rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            const Vec2 a = ring[i], b = ring[i + 1];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (x > p.x) inside = !inside;
            }
        }
    }
    return inside;
}

// Parameters t in (0,1) where segment p->q crosses segment a->b.
void crossing_params(Vec2 p, Vec2 q, Vec2 a, Vec2 b, std::vector<double>& ts) {
    const double rx = q.x - p.x, ry = q.y - p.y;
    const double sx = b.x - a.x, sy = b.y - a.y;
    const double denom = rx * sy - ry * sx;
    if (denom == 0.0) return;
    const double t = ((a.x - p.x) * sy - (a.y - p.y) * sx) / denom;
    const double u = ((a.x - p.x) * ry - (a.y - p.y) * rx) / denom;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
}

}  // namespace

double clipped_length_km(std::span<const Polyline> roads, const Polygon& zone) {
    const GnomonicPlane plane(centroid(zone));
    std::vector<std::vector<Vec2>> rings;
    auto add_ring = [&](const Ring& r) {
        std::vector<Vec2> out;
        out.reserve(r.size());
        for (const auto& p : r) {
            const auto v = plane.forward(p);
            if (!v) return false;
            out.push_back(*v);
        }
        rings.push_back(std::move(out));
        return true;
    };
    if (!add_ring(zone.outer)) return 0.0;
    for (const auto& h : zone.holes) add_ring(h);
    const BBox zbox = bounding_box(zone);

    double total = 0.0;
    std::vector<double> ts;
    for (const auto& road : roads) {
        for (std::size_t i = 0; i + 1 < road.size(); ++i) {
            const LonLat a = road[i], b = road[i + 1];
            const BBox sbox{std::min(a.lon, b.lon), std::min(a.lat, b.lat), std::max(a.lon, b.lon),
                            std::max(a.lat, b.lat)};
            if (!sbox.intersects(zbox)) continue;
            const auto pa = plane.forward(a), pb = plane.forward(b);
            if (!pa || !pb) continue;
            ts.assign({0.0, 1.0});
            for (const auto& ring : rings) {
                for (std::size_t k = 0; k + 1 < ring.size(); ++k) crossing_params(*pa, *pb, ring[k], ring[k + 1], ts);
            }
            std::sort(ts.begin(), ts.end());
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                if (ts[k + 1] <= ts[k]) continue;
                const double tm = 0.5 * (ts[k] + ts[k + 1]);
                const Vec2 mid{pa->x + tm * (pb->x - pa->x), pa->y + tm * (pb->y - pa->y)};
                if (!inside_even_odd(rings, mid)) continue;
                const auto at = [&](double t) {
                    if (t == 0.0) return a;
                    if (t == 1.0) return b;
                    return plane.inverse({pa->x + t * (pb->x - pa->x), pa->y + t * (pb->y - pa->y)});
                };
                total += geodesic_distance_km(at(ts[k]), at(ts[k + 1]));
            }
        }
    }
    return total;
}

std::optional<double> road_density(std::span<const Polyline> roads, const Polygon& zone) {
    if (roads.empty()) return std::nullopt;
    const double area = spherical_area_km2(zone);
    if (!(area > 0.0)) return std::nullopt;
    return clipped_length_km(roads, zone) / area;
}

std::optional<double> road_area_fraction(std::span<const Polyline> roads, const Polygon& zone,
                                         double buffer_m) {
    if (roads.empty() || !(buffer_m > 0.0)) return std::nullopt;
    const LocalPlane plane(centroid(zone));
    const bgx::PlanarPolygon pz = bgx::to_planar(zone, plane);
    const double zone_area = bg::area(pz);
    if (!(zone_area > 0.0)) return std::nullopt;
    const BBox zbox = bounding_box(zone);
    // Lon/lat slack covering the buffer distance.
    const double pad = buffer_m / 1000.0 / (kEarthRadiusKm * std::numbers::pi / 180.0) /
                       std::max(0.01, std::cos(0.5 * (zbox.min_lat + zbox.max_lat) * std::numbers::pi / 180.0));
    const BBox padded{zbox.min_lon - pad, zbox.min_lat - pad, zbox.max_lon + pad, zbox.max_lat + pad};

    bgx::PlanarMultiLine lines;
    for (const auto& road : roads) {
        if (road.size() < 2) continue;
        if (!bounding_box(Ring(road.begin(), road.end())).intersects(padded)) continue;
        bgx::PlanarLine line;
        for (const auto& p : road) {
            const Vec2 v = plane.forward(p);
            line.emplace_back(v.x, v.y);
        }
        lines.push_back(std::move(line));
    }
    if (lines.empty()) return 0.0;
    namespace bs = bg::strategy::buffer;
    bgx::PlanarMultiPolygon buffered;
    bg::buffer(lines, buffered, bs::distance_symmetric<double>(buffer_m / 1000.0), bs::side_straight(),
               bs::join_round(32), bs::end_flat(), bs::point_circle(32));
    bgx::PlanarMultiPolygon inter;
    bg::intersection(pz, buffered, inter);
    return std::clamp(bg::area(inter) / zone_area, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

std::optional<LossWindows> tree_loss_windows(const GridLayer& lossyear, const Polygon& zone,
                                             int planting_year) {
    if (planting_year < 2000 || planting_year > kLossLastYear) return std::nullopt;
    const int y = planting_year;
    long long valid = 0, pre5 = 0, pre1 = 0, post5 = 0;
    if (lossyear.extent().intersects(bounding_box(zone))) {
        ZoneScanner(zone).for_each(lossyear, [&](int r, int c) {
            const double v = lossyear.at(r, c);
            if (lossyear.is_nodata(v)) return;
            ++valid;
            const long k = static_cast<long>(v);
            if (k <= 0) return;
            const long year = 2000 + k;
            if (year >= y - 5 && year <= y - 1) ++pre5;
            if (year == y - 1) ++pre1;
            if (year >= y + 1 && year <= y + 5) ++post5;
        });
    }
    if (valid == 0) return std::nullopt;
    LossWindows w;
    w.pixel_count = valid;
    const double n = static_cast<double>(valid);
    w.pre5 = pre5 / n;
    w.pre1 = pre1 / n;
    w.post5 = post5 / n;
    w.pre5_partial = y - 5 < kLossFirstYear;
    w.pre1_partial = y - 1 < kLossFirstYear;
    w.post5_partial = y + 5 > kLossLastYear;
    return w;
}

// ---------------------------------------------------------------------------

GridLayer slope_degrees(const GridLayer& dem) {
    GridLayer out = dem;
    out.semantics = LayerSemantics::continuous;
    constexpr double deg = std::numbers::pi / 180.0;
    const double m_per_deg = kEarthRadiusKm * 1000.0 * deg;
    const double dy_m = dem.pixel_dy * m_per_deg;

#pragma omp parallel for schedule(static)
    for (int r = 0; r < dem.height; ++r) {
        const double dx_m = dem.pixel_dx * m_per_deg * std::cos(dem.center_lat(r) * deg);
        for (int c = 0; c < dem.width; ++c) {
            double& cell = out.at(r, c);
            if (r == 0 || c == 0 || r == dem.height - 1 || c == dem.width - 1) {
                cell = dem.nodata;
                continue;
            }
            const double a = dem.at(r - 1, c - 1), b = dem.at(r - 1, c), cc = dem.at(r - 1, c + 1);
            const double d = dem.at(r, c - 1), e = dem.at(r, c), f = dem.at(r, c + 1);
            const double g = dem.at(r + 1, c - 1), h = dem.at(r + 1, c), i = dem.at(r + 1, c + 1);
            if (dem.is_nodata(a) || dem.is_nodata(b) || dem.is_nodata(cc) || dem.is_nodata(d) ||
                dem.is_nodata(e) || dem.is_nodata(f) || dem.is_nodata(g) || dem.is_nodata(h) ||
                dem.is_nodata(i)) {
                cell = dem.nodata;
                continue;
            }
            const double dzdx = ((cc + 2.0 * f + i) - (a + 2.0 * d + g)) / (8.0 * dx_m);
            const double dzdy = ((g + 2.0 * h + i) - (a + 2.0 * b + cc)) / (8.0 * dy_m);
            cell = std::atan(std::sqrt(dzdx * dzdx + dzdy * dzdy)) / deg;
        }
    }
    return out;
}

std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const GridLayer& slope,
                                          const Polygon& zone) {
    if (!dem.extent().intersects(bounding_box(zone))) return std::nullopt;
    TerrainStats t;
    double elev_sum = 0.0, slope_sum = 0.0;
    ZoneScanner(zone).for_each(dem, [&](int r, int c) {
        const double z = dem.at(r, c);
        if (dem.is_nodata(z)) return;
        elev_sum += z;
        ++t.elevation_count;
        const double s = slope.at(r, c);
        if (slope.is_nodata(s)) return;
        slope_sum += s;
        ++t.slope_count;
    });
    if (t.elevation_count == 0) return std::nullopt;
    t.mean_elevation_m = elev_sum / static_cast<double>(t.elevation_count);
    if (t.slope_count > 0) t.mean_slope_deg = slope_sum / static_cast<double>(t.slope_count);
    return t;
}

std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const Polygon& zone) {
    return terrain_stats(dem, slope_degrees(dem), zone);
}

// ---------------------------------------------------------------------------

std::optional<std::pair<int, int>> nearest_cell(const GridLayer& layer, LonLat p) noexcept {
    const double u = (p.lon - layer.origin_lon) / layer.pixel_dx;
    const double v = (layer.origin_lat - p.lat) / layer.pixel_dy;
    if (!(u >= 0.0 && u <= layer.width && v >= 0.0 && v <= layer.height)) return std::nullopt;
    // Cell k covers (k, k+1]; the outer edge at 0 belongs to cell 0.
    const int col = std::max(0, static_cast<int>(std::ceil(u)) - 1);
    const int row = std::max(0, static_cast<int>(std::ceil(v)) - 1);
    return std::make_pair(row, col);
}

const char* to_string(ClimateVariable v) noexcept {
    switch (v) {
        case ClimateVariable::precip: return "precip";
        case ClimateVariable::tmin: return "tmin";
        case ClimateVariable::tmax: return "tmax";
    }
    return "precip";
}

std::optional<double> sample_year_mean(const MonthlyLayers& layers, int year, LonLat p) {
    auto it = layers.by_year.find(year);
    if (it == layers.by_year.end() || it->second.size() != 12) return std::nullopt;
    double sum = 0.0;
    int n = 0;
    for (const GridLayer& month : it->second) {
        const auto cell = nearest_cell(month, p);
        if (!cell) continue;
        const double v = month.at(cell->first, cell->second);
        if (month.is_nodata(v)) continue;
        sum += v;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

ClimateSamples sample_climate_at_centroid(const std::array<const MonthlyLayers*, 3>& layers,
                                          LonLat centroid, int planting_year) {
    ClimateSamples s;
    for (std::size_t v = 0; v < layers.size(); ++v) {
        if (layers[v] == nullptr) continue;
        for (std::size_t k = 0; k < kClimateOffsets.size(); ++k) {
            s.values[v][k] = sample_year_mean(*layers[v], planting_year + kClimateOffsets[k], centroid);
        }
    }
    return s;
}

}  // namespace ldis
