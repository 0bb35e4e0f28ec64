#include "ldis/geometry.hpp"

#include "boost_adapters.hpp"
#include "ldis/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace ldis {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double orient(const LonLat& a, const LonLat& b, const LonLat& c) noexcept {
    return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

bool on_segment(const LonLat& a, const LonLat& b, const LonLat& p) noexcept {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(const LonLat& p1, const LonLat& p2, const LonLat& q1,
                        const LonLat& q2) noexcept {
    const int d1 = sign(orient(q1, q2, p1));
    const int d2 = sign(orient(q1, q2, p2));
    const int d3 = sign(orient(p1, p2, q1));
    const int d4 = sign(orient(p1, p2, q2));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

// Adjacent edges share one vertex; they are only invalid when they fold back
// onto each other.
bool adjacent_edges_overlap(const LonLat& a, const LonLat& shared, const LonLat& c) noexcept {
    if (orient(a, shared, c) != 0.0) return false;
    const double dot =
        (a.lon - shared.lon) * (c.lon - shared.lon) + (a.lat - shared.lat) * (c.lat - shared.lat);
    return dot > 0.0;
}

double lonlat_signed_area(const Ring& ring) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        s += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
    }
    return 0.5 * s;
}

double normalize_dlon(double d) noexcept {
    if (d > 180.0) return d - 360.0;
    if (d < -180.0) return d + 360.0;
    return d;
}

LonLat vertex_mean(const Ring& ring) {
    const std::size_t n = ring.size() > 1 && ring.front() == ring.back() ? ring.size() - 1
                                                                          : ring.size();
    LonLat m{};
    if (n == 0) return m;
    for (std::size_t i = 0; i < n; ++i) {
        m.lon += ring[i].lon;
        m.lat += ring[i].lat;
    }
    m.lon /= static_cast<double>(n);
    m.lat /= static_cast<double>(n);
    return m;
}

double polygon_planar_area(const Polygon& p, const LocalPlane& plane) {
    double a = std::abs(planar_signed_area(plane.forward(p.outer)));
    for (const auto& h : p.holes) a -= std::abs(planar_signed_area(plane.forward(h)));
    return a;
}

double polygon_planar_perimeter(const Polygon& p, const LocalPlane& plane) {
    double len = planar_perimeter(plane.forward(p.outer));
    for (const auto& h : p.holes) len += planar_perimeter(plane.forward(h));
    return len;
}

double circularity_unchecked(const Polygon& p) {
    const LocalPlane plane(centroid(p));
    const double area = polygon_planar_area(p, plane);
    const double perim = polygon_planar_perimeter(p, plane);
    if (!(area > 0.0) || !(perim > 0.0)) throw DegenerateGeometry("zero-area polygon");
    return std::min(1.0, 4.0 * std::numbers::pi * area / (perim * perim));
}

}  // namespace

const char* to_string(GeometryKind kind) noexcept {
    switch (kind) {
        case GeometryKind::point: return "point";
        case GeometryKind::polygon: return "polygon";
        case GeometryKind::multipart: return "multipart";
    }
    return "unknown";
}

BBox bounding_box(const Ring& ring) {
    BBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : ring) {
        b.min_lon = std::min(b.min_lon, p.lon);
        b.min_lat = std::min(b.min_lat, p.lat);
        b.max_lon = std::max(b.max_lon, p.lon);
        b.max_lat = std::max(b.max_lat, p.lat);
    }
    return b;
}

BBox bounding_box(const Polygon& polygon) { return bounding_box(polygon.outer); }

// ---------------------------------------------------------------------------

LocalPlane::LocalPlane(LonLat centre)
    : centre_(centre), sin_lat0_(std::sin(centre.lat * kDeg)), cos_lat0_(std::cos(centre.lat * kDeg)) {}

Vec2 LocalPlane::forward(LonLat p) const noexcept {
    const double lat = p.lat * kDeg;
    const double dlon = normalize_dlon(p.lon - centre_.lon) * kDeg;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double cd = std::cos(dlon);
    const double denom = 1.0 + sin_lat0_ * sl + cos_lat0_ * cl * cd;
    const double k = std::sqrt(2.0 / denom);
    return {kEarthRadiusKm * k * cl * std::sin(dlon),
            kEarthRadiusKm * k * (cos_lat0_ * sl - sin_lat0_ * cl * cd)};
}

LonLat LocalPlane::inverse(Vec2 v) const noexcept {
    const double rho = std::hypot(v.x, v.y);
    if (rho == 0.0) return centre_;
    const double c = 2.0 * std::asin(std::min(1.0, rho / (2.0 * kEarthRadiusKm)));
    const double sc = std::sin(c), cc = std::cos(c);
    const double lat = std::asin(cc * sin_lat0_ + v.y * sc * cos_lat0_ / rho);
    const double lon =
        centre_.lon * kDeg + std::atan2(v.x * sc, rho * cos_lat0_ * cc - v.y * sin_lat0_ * sc);
    return {normalize_dlon(lon / kDeg), lat / kDeg};
}

std::vector<Vec2> LocalPlane::forward(const Ring& ring) const {
    std::vector<Vec2> out;
    out.reserve(ring.size());
    for (const auto& p : ring) out.push_back(forward(p));
    return out;
}

GnomonicPlane::GnomonicPlane(LonLat centre)
    : centre_(centre), sin_lat0_(std::sin(centre.lat * kDeg)), cos_lat0_(std::cos(centre.lat * kDeg)) {}

std::optional<Vec2> GnomonicPlane::forward(LonLat p) const noexcept {
    const double lat = p.lat * kDeg;
    const double dlon = normalize_dlon(p.lon - centre_.lon) * kDeg;
    const double sl = std::sin(lat), cl = std::cos(lat), cd = std::cos(dlon);
    const double cos_c = sin_lat0_ * sl + cos_lat0_ * cl * cd;
    if (cos_c <= 1e-12) return std::nullopt;
    return Vec2{kEarthRadiusKm * cl * std::sin(dlon) / cos_c,
                kEarthRadiusKm * (cos_lat0_ * sl - sin_lat0_ * cl * cd) / cos_c};
}

LonLat GnomonicPlane::inverse(Vec2 v) const noexcept {
    const double rho = std::hypot(v.x, v.y);
    if (rho == 0.0) return centre_;
    const double c = std::atan(rho / kEarthRadiusKm);
    const double sc = std::sin(c), cc = std::cos(c);
    const double lat = std::asin(cc * sin_lat0_ + v.y * sc * cos_lat0_ / rho);
    const double lon =
        centre_.lon * kDeg + std::atan2(v.x * sc, rho * cos_lat0_ * cc - v.y * sin_lat0_ * sc);
    return {normalize_dlon(lon / kDeg), lat / kDeg};
}

double planar_signed_area(std::span<const Vec2> ring) noexcept {
    if (ring.size() < 3) return 0.0;
    double s = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

double planar_perimeter(std::span<const Vec2> ring) noexcept {
    if (ring.size() < 2) return 0.0;
    double len = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % n];
        len += std::hypot(b.x - a.x, b.y - a.y);
    }
    return len;
}

double planar_circularity(std::span<const Vec2> ring) {
    const double area = std::abs(planar_signed_area(ring));
    const double perim = planar_perimeter(ring);
    if (!(area > 0.0) || !(perim > 0.0)) throw DegenerateGeometry("zero-area ring");
    return std::min(1.0, 4.0 * std::numbers::pi * area / (perim * perim));
}

// ---------------------------------------------------------------------------

void check_coordinates(const SiteGeometry& g, const std::string& site_id) {
    std::size_t index = 0;
    auto check = [&](const LonLat& p) {
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
            throw GeometryError(site_id, index,
                                fmt::format("site '{}': non-finite coordinate at vertex {}", site_id, index));
        }
        if (p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
            throw GeometryError(site_id, index,
                                fmt::format("site '{}': coordinate ({}, {}) out of range at vertex {}",
                                            site_id, p.lon, p.lat, index));
        }
        ++index;
    };
    if (g.point) check(*g.point);
    for (const auto& part : g.reported) {
        for (const auto& p : part.outer) check(p);
        for (const auto& h : part.holes)
            for (const auto& p : h) check(p);
    }
}

bool ring_is_valid(const Ring& ring) {
    if (ring.size() < 4) return false;
    if (!(ring.front() == ring.back())) return false;
    const std::size_t edges = ring.size() - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        if (ring[i] == ring[i + 1]) return false;
    }
    for (std::size_t i = 0; i < edges; ++i) {
        const LonLat& a1 = ring[i];
        const LonLat& a2 = ring[i + 1];
        const BBox ba{std::min(a1.lon, a2.lon), std::min(a1.lat, a2.lat), std::max(a1.lon, a2.lon),
                      std::max(a1.lat, a2.lat)};
        for (std::size_t j = i + 1; j < edges; ++j) {
            const LonLat& b1 = ring[j];
            const LonLat& b2 = ring[j + 1];
            const bool next = j == i + 1;
            const bool wrap = i == 0 && j == edges - 1;
            if (next) {
                if (adjacent_edges_overlap(a1, a2, b2)) return false;
                continue;
            }
            if (wrap) {
                if (edges > 2 && adjacent_edges_overlap(b1, b2, a2)) return false;
                continue;
            }
            const BBox bb{std::min(b1.lon, b2.lon), std::min(b1.lat, b2.lat),
                          std::max(b1.lon, b2.lon), std::max(b1.lat, b2.lat)};
            if (!ba.intersects(bb)) continue;
            if (segments_intersect(a1, a2, b1, b2)) return false;
        }
    }
    return lonlat_signed_area(ring) != 0.0;
}

bool polygon_is_valid(const Polygon& polygon) {
    if (!ring_is_valid(polygon.outer)) return false;
    return std::all_of(polygon.holes.begin(), polygon.holes.end(),
                       [](const Ring& h) { return ring_is_valid(h); });
}

GeometryQuality validate_geometry(const SiteGeometry& g, const std::string& site_id) {
    check_coordinates(g, site_id);
    GeometryQuality q;
    q.is_point_origin = g.is_point_origin || g.kind == GeometryKind::point;
    if (g.derived) {
        q.is_valid = polygon_is_valid(*g.derived);
    } else if (g.kind == GeometryKind::point || g.reported.empty()) {
        q.is_valid = false;
    } else {
        q.is_valid = std::all_of(g.reported.begin(), g.reported.end(),
                                 [](const Polygon& p) { return polygon_is_valid(p); });
    }
    return q;
}

double circularity(const Polygon& polygon) {
    if (!polygon_is_valid(polygon)) throw DegenerateGeometry("circularity of an invalid polygon");
    return circularity_unchecked(polygon);
}

GeometryQuality assess_geometry(const SiteGeometry& g, const std::string& site_id,
                                const GeometryOptions& opts) {
    GeometryQuality q = validate_geometry(g, site_id);
    const Polygon* poly = g.derived ? &*g.derived : (g.reported.size() == 1 ? &g.reported[0] : nullptr);
    if (poly == nullptr || poly->empty()) return q;
    q.area_km2 = spherical_area_km2(*poly);
    q.perimeter_km = perimeter_km(*poly);
    if (q.is_valid && q.area_km2 > 0.0) {
        try {
            q.circularity = circularity_unchecked(*poly);
            q.is_perfectly_circular = *q.circularity >= opts.circle_threshold;
        } catch (const DegenerateGeometry&) {
            q.circularity.reset();
        }
    }
    return q;
}

Polygon point_buffer(LonLat centre, double radius_m, int segments) {
    if (std::abs(centre.lat) > 89.9) {
        throw UnsupportedLatitude(fmt::format("point buffer at latitude {} is not supported", centre.lat));
    }
    if (segments < 3) throw DegenerateGeometry("point buffer needs at least 3 segments");
    Polygon p;
    p.outer.reserve(static_cast<std::size_t>(segments) + 1);
    const double dist_km = radius_m / 1000.0;
    // Counter-clockwise: decreasing bearing.
    for (int k = 0; k < segments; ++k) {
        const double bearing = -2.0 * std::numbers::pi * k / segments;
        p.outer.push_back(geodesic_destination(centre, bearing, dist_km));
    }
    p.outer.push_back(p.outer.front());
    return p;
}

std::vector<SiteGeometry> derive_geometry(const SiteGeometry& g, const GeometryOptions& opts) {
    std::vector<SiteGeometry> out;
    switch (g.kind) {
        case GeometryKind::point: {
            if (!g.point) throw DegenerateGeometry("point geometry without coordinates");
            if (std::abs(g.point->lat) > opts.max_abs_latitude) {
                throw UnsupportedLatitude(
                    fmt::format("point at latitude {} exceeds the supported range", g.point->lat));
            }
            SiteGeometry d = g;
            d.derived = point_buffer(*g.point, opts.point_buffer_m, opts.point_buffer_segments);
            d.is_point_origin = true;
            d.centroid = *g.point;
            out.push_back(std::move(d));
            break;
        }
        case GeometryKind::polygon: {
            SiteGeometry d = g;
            if (!d.derived) {
                if (g.reported.empty()) throw DegenerateGeometry("polygon geometry without rings");
                d.derived = g.reported.front();
            }
            d.centroid = centroid(*d.derived);
            out.push_back(std::move(d));
            break;
        }
        case GeometryKind::multipart: {
            for (const auto& part : g.reported) {
                SiteGeometry d;
                d.kind = GeometryKind::polygon;
                d.reported = {part};
                d.derived = part;
                d.centroid = centroid(part);
                d.is_point_origin = false;
                out.push_back(std::move(d));
            }
            break;
        }
    }
    return out;
}

Polygon outer_buffer_annulus(const Polygon& p, double distance_m, int segments) {
    if (distance_m < 0.0 || !std::isfinite(distance_m)) {
        throw AnnulusError(fmt::format("annulus distance must be non-negative, got {}", distance_m));
    }
    if (p.outer.size() < 4) throw AnnulusError("annulus of an empty polygon");
    if (distance_m == 0.0) return {};

    const LocalPlane plane(centroid(p));
    const bgx::PlanarPolygon planar = bgx::to_planar(p.outer, plane);
    bgx::PlanarMultiPolygon offset;
    namespace bs = boost::geometry::strategy::buffer;
    boost::geometry::buffer(planar, offset, bs::distance_symmetric<double>(distance_m / 1000.0),
                            bs::side_straight(), bs::join_round(static_cast<std::size_t>(segments)),
                            bs::end_round(static_cast<std::size_t>(segments)),
                            bs::point_circle(static_cast<std::size_t>(segments)));
    if (offset.size() != 1) {
        throw AnnulusError(fmt::format("outward offset of {} m produced {} parts (expected 1)",
                                       distance_m, offset.size()));
    }
    std::string reason;
    if (!boost::geometry::is_valid(offset.front(), reason)) {
        throw AnnulusError(fmt::format("outward offset of {} m is invalid: {}", distance_m, reason));
    }
    Polygon annulus;
    annulus.outer = bgx::from_planar(offset.front().outer(), plane);
    for (const auto& inner : offset.front().inners()) {
        annulus.holes.push_back(bgx::from_planar(inner, plane));
    }
    annulus.holes.push_back(p.outer);
    return annulus;
}

LonLat centroid(const Polygon& p) {
    const Ring& r = p.outer;
    if (r.size() < 4) return vertex_mean(r);
    // Shift to the first vertex for conditioning.
    const LonLat o = r.front();
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double x0 = r[i].lon - o.lon, y0 = r[i].lat - o.lat;
        const double x1 = r[i + 1].lon - o.lon, y1 = r[i + 1].lat - o.lat;
        const double cross = x0 * y1 - x1 * y0;
        a += cross;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
    }
    if (a == 0.0) return vertex_mean(r);
    return {o.lon + cx / (3.0 * a), o.lat + cy / (3.0 * a)};
}

double spherical_ring_area_km2(const Ring& ring) {
    if (ring.size() < 4) return 0.0;
    // Sum of signed excesses of the triangles (pole, v_i, v_i+1).
    double excess = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double dlon = normalize_dlon(ring[i + 1].lon - ring[i].lon) * kDeg;
        const double t1 = std::tan(ring[i].lat * kDeg / 2.0);
        const double t2 = std::tan(ring[i + 1].lat * kDeg / 2.0);
        excess += 2.0 * std::atan2(std::tan(dlon / 2.0) * (t1 + t2), 1.0 + t1 * t2);
    }
    return std::abs(excess) * kEarthRadiusKm * kEarthRadiusKm;
}

double spherical_area_km2(const Polygon& p) {
    double a = spherical_ring_area_km2(p.outer);
    for (const auto& h : p.holes) a -= spherical_ring_area_km2(h);
    return std::max(0.0, a);
}

double perimeter_km(const Polygon& p) {
    auto ring_len = [](const Ring& r) {
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) len += geodesic_distance_km(r[i], r[i + 1]);
        return len;
    };
    double len = ring_len(p.outer);
    for (const auto& h : p.holes) len += ring_len(h);
    return len;
}

double geodesic_distance_km(LonLat a, LonLat b) noexcept {
    const double p1 = a.lat * kDeg, p2 = b.lat * kDeg;
    const double dp = p2 - p1;
    const double dl = normalize_dlon(b.lon - a.lon) * kDeg;
    const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                     std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

LonLat geodesic_destination(LonLat start, double bearing_rad, double distance_km) noexcept {
    const double delta = distance_km / kEarthRadiusKm;
    const double p1 = start.lat * kDeg, l1 = start.lon * kDeg;
    const double p2 =
        std::asin(std::sin(p1) * std::cos(delta) + std::cos(p1) * std::sin(delta) * std::cos(bearing_rad));
    const double l2 = l1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(p1),
                                      std::cos(delta) - std::sin(p1) * std::sin(p2));
    return {normalize_dlon(l2 / kDeg), p2 / kDeg};
}

}  // namespace ldis
