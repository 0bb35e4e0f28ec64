#pragma once

// Serial, deliberately simple reference implementations. They share no code
// with the optimised kernels beyond the public data types and are used by the
// tests and the benchmarks as ground truth.

#include "ldis/geometry.hpp"
#include "ldis/grid.hpp"
#include "ldis/overlay.hpp"
#include "ldis/relations.hpp"
#include "ldis/site.hpp"

#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace ldis::reference {

/// Even-odd test of one pixel centre against every ring edge.
bool centre_inside(const Polygon& zone, double px, double py);

/// Every pixel of the layer tested individually, row-major.
std::vector<std::pair<int, int>> pixels_in_zone(const GridLayer& layer, const Polygon& zone);

ZonalCount zonal_class_count(const GridLayer& layer, const Polygon& zone, const std::set<long>& classes);
std::optional<LossWindows> tree_loss_windows(const GridLayer& lossyear, const Polygon& zone, int planting_year);

/// Horn slope, one cell at a time, no threading.
GridLayer slope_degrees(const GridLayer& dem);
std::optional<TerrainStats> terrain_stats(const GridLayer& dem, const Polygon& zone);

/// Sutherland-Hodgman clip of `subject` by a convex `clip` polygon (both
/// counter-clockwise, open rings) and the shoelace area of the result.
double convex_intersection_area(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

/// All n(n-1)/2 pairs with exact convex intersection areas on the equal-area
/// plane at the pair's joint centroid. Sites must be convex polygons without
/// holes. Output has both orientations, sorted by (site_a, site_b).
std::vector<RelationRecord> all_pairs_relations(std::span<const SiteRecord> sites, double dup_threshold);

/// Index pairs (i < j) of overlapping or touching boxes, by exhaustive scan.
std::vector<std::pair<std::size_t, std::size_t>> box_overlap_pairs(std::span<const BBox> boxes);

}  // namespace ldis::reference
