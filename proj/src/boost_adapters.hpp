#pragma once

// Boost.Geometry models for planar (local-plane, km) computations.

#include "ldis/geometry.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace ldis::bgx {

using PlanarPoint = boost::geometry::model::d2::point_xy<double>;
using PlanarPolygon = boost::geometry::model::polygon<PlanarPoint>;
using PlanarMultiPolygon = boost::geometry::model::multi_polygon<PlanarPolygon>;
using PlanarLine = boost::geometry::model::linestring<PlanarPoint>;
using PlanarMultiLine = boost::geometry::model::multi_linestring<PlanarLine>;

inline PlanarPolygon to_planar(const Ring& outer, const LocalPlane& plane) {
    PlanarPolygon out;
    out.outer().reserve(outer.size());
    for (const auto& p : outer) {
        const Vec2 v = plane.forward(p);
        out.outer().emplace_back(v.x, v.y);
    }
    boost::geometry::correct(out);
    return out;
}

inline PlanarPolygon to_planar(const Polygon& poly, const LocalPlane& plane) {
    PlanarPolygon out = to_planar(poly.outer, plane);
    for (const auto& h : poly.holes) {
        auto& inner = out.inners().emplace_back();
        for (const auto& p : h) {
            const Vec2 v = plane.forward(p);
            inner.emplace_back(v.x, v.y);
        }
    }
    boost::geometry::correct(out);
    return out;
}

template <class PlanarRing>
Ring from_planar(const PlanarRing& ring, const LocalPlane& plane) {
    Ring out;
    out.reserve(ring.size());
    for (const auto& v : ring) out.push_back(plane.inverse({v.x(), v.y()}));
    if (!out.empty()) out.back() = out.front();
    return out;
}

}  // namespace ldis::bgx
