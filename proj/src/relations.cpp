#include "ldis/relations.hpp"

#include "boost_adapters.hpp"
#include "ldis/error.hpp"

#include <algorithm>
#include <boost/geometry/index/rtree.hpp>
#include <boost/iterator/function_output_iterator.hpp>
#include <fmt/format.h>
#include <map>

namespace ldis {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

const char* to_string(Relation r) noexcept {
    switch (r) {
        case Relation::duplicate: return "duplicate";
        case Relation::a_nested_in_b: return "a_nested_in_b";
        case Relation::b_nested_in_a: return "b_nested_in_a";
        case Relation::intersecting: return "intersecting";
        case Relation::disjoint: return "disjoint";
    }
    return "disjoint";
}

Relation mirrored(Relation r) noexcept {
    if (r == Relation::a_nested_in_b) return Relation::b_nested_in_a;
    if (r == Relation::b_nested_in_a) return Relation::a_nested_in_b;
    return r;
}

// ---------------------------------------------------------------------------

namespace {
using IndexPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using IndexBox = bg::model::box<IndexPoint>;
using IndexValue = std::pair<IndexBox, std::size_t>;
using RTree = bgi::rtree<IndexValue, bgi::rstar<16>>;

IndexBox to_index_box(const BBox& b) {
    return IndexBox(IndexPoint(b.min_lon, b.min_lat), IndexPoint(b.max_lon, b.max_lat));
}
}  // namespace

struct SpatialIndex::Impl {
    RTree tree;
};

SpatialIndex::SpatialIndex() : impl_(std::make_unique<Impl>()) {}

SpatialIndex::SpatialIndex(std::span<const BBox> boxes) : impl_(std::make_unique<Impl>()) {
    std::vector<IndexValue> values;
    values.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) values.emplace_back(to_index_box(boxes[i]), i);
    // Range construction uses the packing (bulk-load) algorithm.
    impl_->tree = RTree(values.begin(), values.end());
}

SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;
SpatialIndex::~SpatialIndex() = default;

std::vector<std::size_t> SpatialIndex::query(const BBox& q) const {
    std::vector<std::size_t> out;
    if (impl_->tree.empty()) return out;
    impl_->tree.query(bgi::intersects(to_index_box(q)),
                      boost::make_function_output_iterator(
                          [&out](const IndexValue& v) { out.push_back(v.second); }));
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t SpatialIndex::size() const noexcept { return impl_->tree.size(); }

// ---------------------------------------------------------------------------

SiteIndex build_site_index(std::span<const SiteRecord> sites) {
    std::map<std::string, std::size_t> seen;
    std::vector<std::string> collisions;
    SiteIndex index;
    index.boxes.reserve(sites.size());
    for (const auto& s : sites) {
        if (!seen.emplace(s.site_id, 0).second) collisions.push_back(s.site_id);
        if (!s.geometry.derived) {
            throw IngestError(fmt::format("site '{}' has no derived polygon", s.site_id));
        }
        index.boxes.push_back(bounding_box(*s.geometry.derived));
    }
    if (!collisions.empty()) {
        throw IngestError(fmt::format("duplicate site ids: {}", fmt::join(collisions, ", ")));
    }
    index.tree = SpatialIndex(index.boxes);
    return index;
}

std::pair<double, double> pairwise_overlap_ratio(const Polygon& a, const Polygon& b) {
    const LonLat ca = centroid(a), cb = centroid(b);
    const LocalPlane plane({0.5 * (ca.lon + cb.lon), 0.5 * (ca.lat + cb.lat)});
    const bgx::PlanarPolygon pa = bgx::to_planar(a, plane);
    const bgx::PlanarPolygon pb = bgx::to_planar(b, plane);
    const double area_a = bg::area(pa);
    const double area_b = bg::area(pb);
    if (!(area_a > 0.0) || !(area_b > 0.0)) throw DegenerateGeometry("zero-area polygon in overlap");
    if (!bg::intersects(bg::return_envelope<bg::model::box<bgx::PlanarPoint>>(pa),
                        bg::return_envelope<bg::model::box<bgx::PlanarPoint>>(pb))) {
        return {0.0, 0.0};
    }
    bgx::PlanarMultiPolygon inter;
    bg::intersection(pa, pb, inter);
    const double ia = std::max(0.0, bg::area(inter));
    return {std::min(1.0, ia / area_a), std::min(1.0, ia / area_b)};
}

Relation classify_ratios(double ratio_a, double ratio_b, double dup_threshold) noexcept {
    const bool high_a = ratio_a > dup_threshold;
    const bool high_b = ratio_b > dup_threshold;
    if (high_a && high_b) return Relation::duplicate;
    if (high_a) return Relation::a_nested_in_b;
    if (high_b) return Relation::b_nested_in_a;
    if (ratio_a > 0.0 && ratio_b > 0.0) return Relation::intersecting;
    return Relation::disjoint;
}

RelationsResult classify_relations(const SiteIndex& index, std::span<const SiteRecord> sites,
                                   double dup_threshold) {
    const std::size_t n = sites.size();
    std::vector<char> usable(n, 0);
    RelationsResult result;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = sites[i].geometry;
        usable[i] = g.derived && spherical_area_km2(*g.derived) > 0.0;
        if (!usable[i]) result.warnings.push_back({sites[i].site_id, "zero-area geometry skipped"});
    }

    std::vector<std::vector<RelationRecord>> per_site(n);
    std::vector<std::vector<RelationWarning>> per_site_warn(n);

#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (!usable[i]) continue;
        const SiteRecord& a = sites[i];
        for (std::size_t j : index.tree.query(index.boxes[i])) {
            if (j == i || !usable[j]) continue;
            const SiteRecord& b = sites[j];
            if (!(a.site_id < b.site_id)) continue;
            try {
                const auto [ra, rb] = pairwise_overlap_ratio(a.polygon(), b.polygon());
                const Relation rel = classify_ratios(ra, rb, dup_threshold);
                if (rel == Relation::disjoint) continue;
                per_site[i].push_back({a.site_id, b.site_id, ra, rb, rel});
            } catch (const std::exception& e) {
                per_site_warn[i].push_back(
                    {a.site_id, fmt::format("overlap with '{}' failed: {}", b.site_id, e.what())});
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (auto& r : per_site[i]) {
            result.records.push_back({r.site_b, r.site_a, r.ratio_b, r.ratio_a, mirrored(r.relation)});
            result.records.push_back(std::move(r));
        }
        for (auto& w : per_site_warn[i]) result.warnings.push_back(std::move(w));
    }
    std::sort(result.records.begin(), result.records.end(), [](const auto& x, const auto& y) {
        return std::tie(x.site_a, x.site_b) < std::tie(y.site_a, y.site_b);
    });
    return result;
}

// ---------------------------------------------------------------------------

namespace {
std::vector<BBox> unit_boxes(const std::vector<AdminUnit>& units) {
    std::vector<BBox> boxes;
    boxes.reserve(units.size());
    for (const auto& u : units) boxes.push_back(bounding_box(u.polygon));
    return boxes;
}
}  // namespace

AdminLayer::AdminLayer(std::vector<AdminUnit> units)
    : units_(std::move(units)), index_(unit_boxes(units_)) {}

std::optional<AdminMatch> admin_area_match(const std::string& site_id, const Polygon& site,
                                           const AdminLayer& admin, double threshold) {
    if (admin.empty()) return std::nullopt;
    AdminMatch best;
    best.site = site_id;
    double best_score = -1.0;
    for (std::size_t k : admin.candidates(bounding_box(site))) {
        const AdminUnit& unit = admin.units()[k];
        const auto [rs, ra] = pairwise_overlap_ratio(site, unit.polygon);
        if (rs <= 0.0 && ra <= 0.0) continue;
        const double score = std::min(rs, ra);
        if (score > best_score || (score == best_score && unit.admin_id < best.admin_unit)) {
            best_score = score;
            best.admin_unit = unit.admin_id;
            best.ratio_site = rs;
            best.ratio_admin = ra;
        }
    }
    best.mutual = best.ratio_site > threshold && best.ratio_admin > threshold;
    return best;
}

}  // namespace ldis
