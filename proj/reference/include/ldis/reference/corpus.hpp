#pragma once

// Seeded synthetic corpora for tests, acceptance checks and benchmarks.

#include "ldis/geometry.hpp"
#include "ldis/site.hpp"

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace ldis::corpus {

SiteRecord polygon_site(std::string id, Polygon polygon);
SiteRecord point_site(std::string id, LonLat point);

/// Closed counter-clockwise rectangle of `width_km` x `height_km` rotated by
/// `angle_rad` about `centre`, laid out on the local equal-area plane.
Polygon rectangle(LonLat centre, double width_km, double height_km, double angle_rad = 0.0);

/// Convex rectangles scattered over a small region, with injected
/// near-duplicates, nested copies and partial overlaps. Ids are zero-padded
/// and the records are returned in a seeded random order.
std::vector<SiteRecord> relation_corpus(std::size_t n, std::uint64_t seed);

/// `n_points` point-origin sites and `n_polygons` clean rectangles with
/// aspect ratio at least 2, all pairwise disjoint.
std::vector<SiteRecord> point_and_polygon_corpus(std::size_t n_points, std::size_t n_polygons, std::uint64_t seed);

/// GeoJSON FeatureCollection of `n` sites on a jittered lattice: mostly small
/// rectangles, some points, some overlapping neighbours.
nlohmann::json lattice_collection(std::size_t n, std::uint64_t seed);

}  // namespace ldis::corpus
