#pragma once

// Duplicate / nesting / intersection detection among site polygons and
// resemblance to administrative units.

#include "ldis/geometry.hpp"
#include "ldis/site.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ldis {

enum class Relation { duplicate, a_nested_in_b, b_nested_in_a, intersecting, disjoint };

const char* to_string(Relation r) noexcept;
Relation mirrored(Relation r) noexcept;

struct RelationRecord {
    std::string site_a;
    std::string site_b;
    double ratio_a = 0.0;  // intersection area / area(a)
    double ratio_b = 0.0;  // intersection area / area(b)
    Relation relation = Relation::disjoint;

    friend bool operator==(const RelationRecord&, const RelationRecord&) = default;
};

struct RelationWarning {
    std::string site_id;
    std::string message;
};

struct RelationsResult {
    /// Both orientations of every non-disjoint pair, sorted by (site_a, site_b).
    std::vector<RelationRecord> records;
    std::vector<RelationWarning> warnings;
};

/// Read-only bounding-box tree (STR-packed R-tree) over polygons.
class SpatialIndex {
public:
    SpatialIndex();
    explicit SpatialIndex(std::span<const BBox> boxes);
    SpatialIndex(SpatialIndex&&) noexcept;
    SpatialIndex& operator=(SpatialIndex&&) noexcept;
    ~SpatialIndex();

    /// Positions of every box that intersects (or touches) `query`, ascending.
    std::vector<std::size_t> query(const BBox& query) const;
    std::size_t size() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Spatial index over site records; throws IngestError on duplicate ids.
struct SiteIndex {
    SpatialIndex tree;
    std::vector<BBox> boxes;
};

SiteIndex build_site_index(std::span<const SiteRecord> sites);

/// (intersection / area(a), intersection / area(b)) on the equal-area plane of
/// the pair's joint centroid. Throws DegenerateGeometry for zero-area input.
std::pair<double, double> pairwise_overlap_ratio(const Polygon& a, const Polygon& b);

/// Threshold rule shared by all relation outputs; comparisons are strict.
Relation classify_ratios(double ratio_a, double ratio_b, double dup_threshold) noexcept;

/// Evaluates each candidate pair once and mirrors it. Deterministic for any
/// number of OpenMP threads.
RelationsResult classify_relations(const SiteIndex& index, std::span<const SiteRecord> sites,
                                   double dup_threshold = 0.95);

struct AdminUnit {
    std::string admin_id;
    Polygon polygon;
};

class AdminLayer {
public:
    explicit AdminLayer(std::vector<AdminUnit> units);

    bool empty() const noexcept { return units_.empty(); }
    const std::vector<AdminUnit>& units() const noexcept { return units_; }
    std::vector<std::size_t> candidates(const BBox& box) const { return index_.query(box); }

private:
    std::vector<AdminUnit> units_;
    SpatialIndex index_;
};

struct AdminMatch {
    std::string site;
    std::string admin_unit;  // best-matching unit, empty when nothing overlaps
    bool mutual = false;
    double ratio_site = 0.0;
    double ratio_admin = 0.0;
};

/// nullopt when the admin layer is empty (indicator not evaluable).
std::optional<AdminMatch> admin_area_match(const std::string& site_id, const Polygon& site,
                                           const AdminLayer& admin, double threshold = 0.98);

}  // namespace ldis
