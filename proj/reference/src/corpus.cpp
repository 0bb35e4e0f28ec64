#include "ldis/reference/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

namespace ldis::corpus {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Ring close_ccw(std::vector<LonLat> pts) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const LonLat a = pts[i], b = pts[(i + 1) % pts.size()];
        s += a.lon * b.lat - b.lon * a.lat;
    }
    if (s < 0) std::reverse(pts.begin(), pts.end());
    pts.push_back(pts.front());
    return pts;
}

// Local frame offset (km) rotated by `angle` and mapped back to lon/lat.
LonLat offset(LonLat centre, double x_km, double y_km, double angle) {
    const LocalPlane plane(centre);
    const double c = std::cos(angle), s = std::sin(angle);
    return plane.inverse({c * x_km - s * y_km, s * x_km + c * y_km});
}

struct Rect {
    LonLat centre;
    double w = 0.0, h = 0.0, angle = 0.0;
};

Polygon make(const Rect& r) { return rectangle(r.centre, r.w, r.h, r.angle); }

nlohmann::json feature(const std::string& id, const SiteGeometry& g) {
    nlohmann::json geom;
    if (g.point) {
        geom = {{"type", "Point"}, {"coordinates", {g.point->lon, g.point->lat}}};
    } else {
        nlohmann::json ring = nlohmann::json::array();
        for (const LonLat& p : g.reported.front().outer) ring.push_back({p.lon, p.lat});
        geom = {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}};
    }
    return {{"type", "Feature"}, {"properties", {{"site_id", id}}}, {"geometry", geom}};
}

}  // namespace

SiteRecord polygon_site(std::string id, Polygon polygon) {
    SiteRecord s;
    s.site_id = std::move(id);
    s.geometry.kind = GeometryKind::polygon;
    s.geometry.reported.push_back(polygon);
    s.geometry.derived = std::move(polygon);
    s.geometry.centroid = centroid(*s.geometry.derived);
    s.area_km2 = spherical_area_km2(*s.geometry.derived);
    return s;
}

SiteRecord point_site(std::string id, LonLat point) {
    SiteRecord s;
    s.site_id = std::move(id);
    SiteGeometry g;
    g.kind = GeometryKind::point;
    g.point = point;
    g.is_point_origin = true;
    s.geometry = derive_geometry(g).front();
    s.area_km2 = spherical_area_km2(*s.geometry.derived);
    return s;
}

Polygon rectangle(LonLat centre, double width_km, double height_km, double angle_rad) {
    const double hw = 0.5 * width_km, hh = 0.5 * height_km;
    Polygon p;
    p.outer = close_ccw({offset(centre, -hw, -hh, angle_rad), offset(centre, hw, -hh, angle_rad),
                         offset(centre, hw, hh, angle_rad), offset(centre, -hw, hh, angle_rad)});
    return p;
}

std::vector<SiteRecord> relation_corpus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const LonLat origin{10.0, 5.0};
    const double side_km = 1.6 * std::sqrt(static_cast<double>(n));
    std::vector<Rect> rects;
    const std::size_t base = std::max<std::size_t>(1, n * 3 / 5);
    for (std::size_t i = 0; i < base; ++i) {
        const double x = uniform(rng, 0, side_km), y = uniform(rng, 0, side_km);
        rects.push_back({LocalPlane(origin).inverse({x, y}), uniform(rng, 0.4, 1.6), uniform(rng, 0.4, 1.6),
                         uniform(rng, 0, std::numbers::pi)});
    }
    while (rects.size() < n) {
        const Rect parent = rects[std::uniform_int_distribution<std::size_t>(0, base - 1)(rng)];
        const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
        Rect r = parent;
        if (kind == 0) {
            // Near-duplicate: slightly smaller, same centre.
            const double s = uniform(rng, 0.985, 0.995);
            r.w *= s;
            r.h *= s;
        } else if (kind == 1) {
            // Nested: shrunk copy placed strictly inside the parent.
            const double s = uniform(rng, 0.3, 0.7);
            r.w *= s;
            r.h *= s;
            const double dx = uniform(rng, -0.45, 0.45) * (parent.w - r.w);
            const double dy = uniform(rng, -0.45, 0.45) * (parent.h - r.h);
            r.centre = offset(parent.centre, dx, dy, parent.angle);
        } else {
            // Partial overlap: shifted along the parent's long axis.
            const double f = uniform(rng, 0.3, 0.7);
            r.centre = offset(parent.centre, f * parent.w, 0.0, parent.angle);
        }
        rects.push_back(r);
    }
    std::vector<SiteRecord> sites;
    for (std::size_t i = 0; i < rects.size(); ++i) sites.push_back(polygon_site(fmt::format("r{:05d}", i), make(rects[i])));
    std::shuffle(sites.begin(), sites.end(), rng);
    return sites;
}

std::vector<SiteRecord> point_and_polygon_corpus(std::size_t n_points, std::size_t n_polygons, std::uint64_t seed) {
    Rng rng(seed);
    const double cell = 0.02;
    const std::size_t k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max(n_points, n_polygons)))));
    std::vector<SiteRecord> sites;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double lon = 30.0 + (static_cast<double>(i % k) + 0.25) * cell;
        const double lat = 0.0 + (static_cast<double>(i / k) + 0.25) * cell;
        sites.push_back(point_site(fmt::format("pt{:05d}", i), {lon, lat}));
    }
    for (std::size_t i = 0; i < n_polygons; ++i) {
        const double lon = 30.0 + (static_cast<double>(i % k) + 0.75) * cell;
        const double lat = 0.0 + (static_cast<double>(i / k) + 0.75) * cell;
        const double w = uniform(rng, 0.3, 0.55);
        const double h = w * uniform(rng, 2.0, 2.2);
        sites.push_back(polygon_site(fmt::format("pg{:05d}", i),
                                     rectangle({lon, lat}, w, h, uniform(rng, 0, std::numbers::pi))));
    }
    return sites;
}

nlohmann::json lattice_collection(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const double cell = 0.01;
    const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    nlohmann::json features = nlohmann::json::array();
    Rect previous;
    bool has_previous = false;
    for (std::size_t i = 0; i < n; ++i) {
        const LonLat c{20.0 + (static_cast<double>(i % k) + 0.5) * cell, -10.0 + (static_cast<double>(i / k) + 0.5) * cell};
        const double roll = uniform(rng, 0, 1);
        const std::string id = fmt::format("s{:06d}", i);
        if (roll < 0.10) {
            SiteGeometry g;
            g.kind = GeometryKind::point;
            g.point = c;
            features.push_back(feature(id, g));
            has_previous = false;
            continue;
        }
        Rect r{c, uniform(rng, 0.2, 0.5), uniform(rng, 0.2, 0.5), uniform(rng, 0, std::numbers::pi)};
        if (roll < 0.14 && has_previous) {
            // Shifted copy of the previous site, reaching into its cell.
            r = previous;
            r.centre = offset(previous.centre, 0.5 * previous.w, 0.0, previous.angle);
        } else if (roll < 0.16 && has_previous) {
            r = previous;
        }
        SiteGeometry g;
        g.reported.push_back(make(r));
        features.push_back(feature(id, g));
        previous = r;
        has_previous = true;
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace ldis::corpus
