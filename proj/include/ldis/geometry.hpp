#pragma once

// Site geometry primitives. Coordinates are WGS84 lon/lat degrees; planar
// computations happen on a Lambert azimuthal equal-area plane centred on the
// geometry, which is area-preserving and maps geodesic circles about the centre
// to planar circles.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldis {

/// Mean (authalic) Earth radius in kilometres.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
    friend bool operator==(const LonLat&, const LonLat&) = default;
};

/// Closed ring: front() == back().
using Ring = std::vector<LonLat>;

struct Polygon {
    Ring outer;
    std::vector<Ring> holes;

    bool empty() const noexcept { return outer.empty(); }
    friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct BBox {
    double min_lon = 0.0;
    double min_lat = 0.0;
    double max_lon = 0.0;
    double max_lat = 0.0;

    bool intersects(const BBox& o) const noexcept {
        return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
               o.min_lat <= max_lat;
    }
    bool contains(LonLat p) const noexcept {
        return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
    }
};

BBox bounding_box(const Ring& ring);
BBox bounding_box(const Polygon& polygon);

enum class GeometryKind { point, polygon, multipart };

const char* to_string(GeometryKind kind) noexcept;

struct SiteGeometry {
    GeometryKind kind = GeometryKind::polygon;
    /// Reported parts; empty for points.
    std::vector<Polygon> reported;
    std::optional<LonLat> point;
    /// Present for every site after derive_geometry.
    std::optional<Polygon> derived;
    LonLat centroid{};
    bool is_point_origin = false;
};

struct GeometryQuality {
    bool is_valid = false;
    std::optional<double> circularity;
    bool is_perfectly_circular = false;
    bool is_point_origin = false;
    double area_km2 = 0.0;
    double perimeter_km = 0.0;
};

struct GeometryOptions {
    double point_buffer_m = 100.0;
    int point_buffer_segments = 64;
    /// Preprocessing flag threshold; the scoring indicator has its own.
    double circle_threshold = 0.98;
    double max_abs_latitude = 89.9;
};

// ---------------------------------------------------------------------------
// Local equal-area plane

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Lambert azimuthal equal-area projection about `centre`, output in km.
class LocalPlane {
public:
    explicit LocalPlane(LonLat centre);

    Vec2 forward(LonLat p) const noexcept;
    LonLat inverse(Vec2 v) const noexcept;
    std::vector<Vec2> forward(const Ring& ring) const;

    LonLat centre() const noexcept { return centre_; }

private:
    LonLat centre_;
    double sin_lat0_;
    double cos_lat0_;
};

/// Gnomonic projection about `centre`; great circles map to straight lines.
class GnomonicPlane {
public:
    explicit GnomonicPlane(LonLat centre);

    /// Fails (nullopt) for points 90 degrees or more from the centre.
    std::optional<Vec2> forward(LonLat p) const noexcept;
    LonLat inverse(Vec2 v) const noexcept;

private:
    LonLat centre_;
    double sin_lat0_;
    double cos_lat0_;
};

/// Signed shoelace area of a planar ring (closing vertex may be repeated).
double planar_signed_area(std::span<const Vec2> ring) noexcept;
double planar_perimeter(std::span<const Vec2> ring) noexcept;

/// 4*pi*A/P^2 of a planar ring.
double planar_circularity(std::span<const Vec2> ring);

// ---------------------------------------------------------------------------
// Operations

/// Throws GeometryError on non-finite or out-of-range coordinates.
void check_coordinates(const SiteGeometry& g, const std::string& site_id);

/// Closed, at least 4 vertices, no self-intersection, non-zero area.
bool ring_is_valid(const Ring& ring);
bool polygon_is_valid(const Polygon& polygon);

/// Validity of the geometry as a polygon: the derived polygon when present,
/// otherwise the reported parts. A bare point is not a valid polygon.
GeometryQuality validate_geometry(const SiteGeometry& g, const std::string& site_id = {});

/// Isoperimetric quotient on the local plane. Throws DegenerateGeometry for
/// invalid or zero-area input.
double circularity(const Polygon& polygon);

/// Validity, circularity, area and perimeter in one pass.
GeometryQuality assess_geometry(const SiteGeometry& g, const std::string& site_id = {},
                                const GeometryOptions& opts = {});

/// Point: regular n-gon of geodesic radius `point_buffer_m`. Polygon: copy.
/// Multipart: one geometry per part.
std::vector<SiteGeometry> derive_geometry(const SiteGeometry& g, const GeometryOptions& opts = {});

Polygon point_buffer(LonLat centre, double radius_m, int segments);

/// Region between the outer boundary of `p` and its outward offset by
/// `distance_m`. The original outer ring is carried verbatim as a hole, so
/// pixel membership in the annulus and in `p` is mutually exclusive.
/// Returns an empty polygon for distance 0.
Polygon outer_buffer_annulus(const Polygon& p, double distance_m = 500.0, int segments = 64);

/// Area centroid computed on the lon/lat plane.
LonLat centroid(const Polygon& p);

double spherical_ring_area_km2(const Ring& ring);
/// Spherical-excess area on the authalic sphere; outer minus holes.
double spherical_area_km2(const Polygon& p);
double perimeter_km(const Polygon& p);

/// Great-circle distance.
double geodesic_distance_km(LonLat a, LonLat b) noexcept;
LonLat geodesic_destination(LonLat start, double bearing_rad, double distance_km) noexcept;

}  // namespace ldis
