#include "ldis/reference/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace ldis::reference {

bool centre_inside(const Polygon& zone, double px, double py) {
    bool inside = false;
    auto scan = [&](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            const double x1 = ring[i].lon, y1 = ring[i].lat;
            const double x2 = ring[i + 1].lon, y2 = ring[i + 1].lat;
            if ((y1 > py) != (y2 > py) && x1 + (py - y1) * (x2 - x1) / (y2 - y1) > px) inside = !inside;
        }
    };
    scan(zone.outer);
    for (const Ring& h : zone.holes) scan(h);
    return inside;
}

std::vector<std::pair<int, int>> pixels_in_zone(const GridLayer& layer, const Polygon& zone) {
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < layer.height; ++r) {
        for (int c = 0; c < layer.width; ++c) {
            if (centre_inside(zone, layer.center_lon(c), layer.center_lat(r))) out.emplace_back(r, c);
        }
    }
    return out;
}

ZonalCount zonal_class_count(const GridLayer& layer, const Polygon& zone, const std::set<long>& classes) {
    ZonalCount n;
    for (const auto& [r, c] : pixels_in_zone(layer, zone)) {
        const double v = layer.at(r, c);
        if (v == layer.nodata || std::isnan(v)) continue;
        ++n.valid;
        if (v == std::floor(v) && classes.count(static_cast<long>(v))) ++n.in_class;
    }
    return n;
}

std::optional<LossWindows> tree_loss_windows(const GridLayer& lossyear, const Polygon& zone, int y) {
    if (y < 2000 || y > 2023) return std::nullopt;
    long long valid = 0, pre5 = 0, pre1 = 0, post5 = 0;
    for (const auto& [r, c] : pixels_in_zone(lossyear, zone)) {
        const double v = lossyear.at(r, c);
        if (v == lossyear.nodata || std::isnan(v)) continue;
        ++valid;
        if (v <= 0) continue;
        const long year = 2000 + static_cast<long>(v);
        pre5 += year >= y - 5 && year <= y - 1;
        pre1 += year == y - 1;
        post5 += year >= y + 1 && year <= y + 5;
    }
    if (valid == 0) return std::nullopt;
    LossWindows w;
    w.pixel_count = valid;
    w.pre5 = static_cast<double>(pre5) / static_cast<double>(valid);
    w.pre1 = static_cast<double>(pre1) / static_cast<double>(valid);
    w.post5 = static_cast<double>(post5) / static_cast<double>(valid);
    w.pre5_partial = y - 5 < 2001;
    w.pre1_partial = y - 1 < 2001;
    w.post5_partial = y + 5 > 2023;
    return w;
}

GridLayer slope_degrees(const GridLayer& dem) {
    GridLayer out = dem;
    const double deg = std::numbers::pi / 180.0;
    const double m_per_deg = kEarthRadiusKm * 1000.0 * deg;
    auto z = [&](int r, int c, bool& ok) {
        const double v = dem.at(r, c);
        if (v == dem.nodata || std::isnan(v)) ok = false;
        return v;
    };
    for (int r = 0; r < dem.height; ++r) {
        for (int c = 0; c < dem.width; ++c) {
            out.at(r, c) = dem.nodata;
            if (r == 0 || c == 0 || r + 1 == dem.height || c + 1 == dem.width) continue;
            bool ok = true;
            const double a = z(r - 1, c - 1, ok), b = z(r - 1, c, ok), cc = z(r - 1, c + 1, ok);
            const double d = z(r, c - 1, ok), e = z(r, c, ok), f = z(r, c + 1, ok);
            const double g = z(r + 1, c - 1, ok), h = z(r + 1, c, ok), i = z(r + 1, c + 1, ok);
            (void)e;
            if (!ok) continue;
            const double dx_m = dem.pixel_dx * m_per_deg * std::cos(dem.center_lat(r) * deg);
            const double dy_m = dem.pixel_dy * m_per_deg;
            const double dzdx = ((cc + 2.0 * f + i) - (a + 2.0 * d + g)) / (8.0 * dx_m);
            const double dzdy = ((g + 2.0 * h + i) - (a + 2.0 * b + cc)) / (8.0 * dy_m);
            out.at(r, c) = std::atan(std::sqrt(dzdx * dzdx + dzdy * dzdy)) / deg;
        }
    }
    return out;
}

std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const Polygon& zone) {
    const GridLayer slope = reference::slope_degrees(dem);
    TerrainStats t;
    double es = 0.0, ss = 0.0;
    for (const auto& [r, c] : pixels_in_zone(dem, zone)) {
        const double v = dem.at(r, c);
        if (v == dem.nodata || std::isnan(v)) continue;
        es += v;
        ++t.elevation_count;
        const double s = slope.at(r, c);
        if (s == slope.nodata || std::isnan(s)) continue;
        ss += s;
        ++t.slope_count;
    }
    if (t.elevation_count == 0) return std::nullopt;
    t.mean_elevation_m = es / static_cast<double>(t.elevation_count);
    if (t.slope_count) t.mean_slope_deg = ss / static_cast<double>(t.slope_count);
    return t;
}

// ---------------------------------------------------------------------------

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double shoelace(const std::vector<Vec2>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 a = p[i], b = p[(i + 1) % p.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

std::vector<Vec2> open_ccw(const Ring& ring, const LocalPlane& plane) {
    std::vector<Vec2> v;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) v.push_back(plane.forward(ring[i]));
    if (shoelace(v) < 0) std::reverse(v.begin(), v.end());
    return v;
}

}  // namespace

double convex_intersection_area(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
    std::vector<Vec2> out = subject;
    for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
        const Vec2 a = clip[e], b = clip[(e + 1) % clip.size()];
        std::vector<Vec2> in;
        in.swap(out);
        for (std::size_t i = 0; i < in.size(); ++i) {
            const Vec2 p = in[i], q = in[(i + 1) % in.size()];
            const double sp = cross(a, b, p), sq = cross(a, b, q);
            if (sp >= 0) out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
            }
        }
    }
    return out.size() < 3 ? 0.0 : std::max(0.0, shoelace(out));
}

std::vector<RelationRecord> all_pairs_relations(std::span<const SiteRecord> sites, double t) {
    std::vector<RelationRecord> out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (std::size_t j = 0; j < sites.size(); ++j) {
            const SiteRecord& a = sites[i];
            const SiteRecord& b = sites[j];
            if (!(a.site_id < b.site_id)) continue;
            const LonLat ca = centroid(a.polygon()), cb = centroid(b.polygon());
            const LocalPlane plane({0.5 * (ca.lon + cb.lon), 0.5 * (ca.lat + cb.lat)});
            const auto pa = open_ccw(a.polygon().outer, plane);
            const auto pb = open_ccw(b.polygon().outer, plane);
            const double inter = convex_intersection_area(pa, pb);
            const double ra = std::min(1.0, inter / shoelace(pa));
            const double rb = std::min(1.0, inter / shoelace(pb));
            Relation rel = Relation::disjoint;
            if (ra > t && rb > t) {
                rel = Relation::duplicate;
            } else if (ra > t) {
                rel = Relation::a_nested_in_b;
            } else if (rb > t) {
                rel = Relation::b_nested_in_a;
            } else if (ra > 0 && rb > 0) {
                rel = Relation::intersecting;
            }
            if (rel == Relation::disjoint) continue;
            out.push_back({a.site_id, b.site_id, ra, rb, rel});
            out.push_back({b.site_id, a.site_id, rb, ra, mirrored(rel)});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return std::tie(x.site_a, x.site_b) < std::tie(y.site_a, y.site_b); });
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> box_overlap_pairs(std::span<const BBox> boxes) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            const BBox &a = boxes[i], &b = boxes[j];
            if (a.min_lon <= b.max_lon && b.min_lon <= a.max_lon && a.min_lat <= b.max_lat && b.min_lat <= a.max_lat) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

}  // namespace ldis::reference
