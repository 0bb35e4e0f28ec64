#include "ldis/error.hpp"
#include "ldis/geometry.hpp"
#include "ldis/reference/corpus.hpp"

#include <cmath>
#include <doctest.h>
#include <limits>
#include <numbers>
#include <random>

using namespace ldis;

namespace {

constexpr double pi = std::numbers::pi;

Ring lonlat_ring(std::initializer_list<LonLat> pts) { return Ring(pts); }

std::vector<Vec2> regular_ngon(int n, double r = 1.0) {
    std::vector<Vec2> v;
    for (int k = 0; k <= n; ++k) {
        const double a = 2.0 * pi * (k % n) / n;
        v.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return v;
}

// Independent oracle: proper or touching intersection of two segments,
// decided with exact orientation signs.
int orientation(LonLat a, LonLat b, LonLat c) {
    const double v = (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
    return (v > 0) - (v < 0);
}

bool segments_cross(LonLat p1, LonLat p2, LonLat q1, LonLat q2) {
    const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    auto within = [](LonLat a, LonLat b, LonLat p) {
        return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) && std::min(a.lat, b.lat) <= p.lat &&
               p.lat <= std::max(a.lat, b.lat);
    };
    return (o1 == 0 && within(p1, p2, q1)) || (o2 == 0 && within(p1, p2, q2)) || (o3 == 0 && within(q1, q2, p1)) ||
           (o4 == 0 && within(q1, q2, p2));
}

// Simple quadrilateral oracle: only the two pairs of opposite edges can cross.
bool quad_is_simple(const Ring& r) {
    return !segments_cross(r[0], r[1], r[2], r[3]) && !segments_cross(r[1], r[2], r[3], r[0]);
}

}  // namespace

TEST_SUITE("geometry-core") {
    TEST_CASE("validate: closed simple unit square is valid") {
        SiteGeometry g;
        g.reported.push_back({lonlat_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}), {}});
        CHECK(validate_geometry(g).is_valid);
    }

    TEST_CASE("validate: ring missing its closing vertex is invalid") {
        SiteGeometry g;
        g.reported.push_back({lonlat_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), {}});
        CHECK_FALSE(validate_geometry(g).is_valid);
    }

    TEST_CASE("validate: bow-tie quad is invalid and the oracle agrees") {
        const Ring bowtie = lonlat_ring({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}});
        CHECK_FALSE(quad_is_simple(bowtie));
        CHECK_FALSE(ring_is_valid(bowtie));
    }

    TEST_CASE("validate: random quads agree with the segment-intersection oracle") {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> coord(0, 6);
        int checked = 0;
        for (int trial = 0; trial < 3000; ++trial) {
            Ring r;
            for (int k = 0; k < 4; ++k) r.push_back({double(coord(rng)), double(coord(rng))});
            r.push_back(r.front());
            bool distinct = true;
            for (int a = 0; a < 4; ++a) {
                for (int b = a + 1; b < 4; ++b) distinct &= !(r[a] == r[b]);
            }
            if (!distinct) continue;
            double area2 = 0;
            for (int k = 0; k < 4; ++k) area2 += r[k].lon * r[k + 1].lat - r[k + 1].lon * r[k].lat;
            // Collinear consecutive vertices are a degenerate case the oracle
            // does not model; skip them.
            bool collinear = false;
            for (int k = 0; k < 4; ++k) collinear |= orientation(r[k], r[(k + 1) % 4], r[(k + 2) % 4]) == 0;
            if (collinear) continue;
            const bool expected = quad_is_simple(r) && area2 != 0.0;
            CHECK_MESSAGE(ring_is_valid(r) == expected, "trial " << trial);
            ++checked;
        }
        CHECK(checked > 1000);
    }

    TEST_CASE("validate: a bare point is not a valid polygon until derived") {
        SiteGeometry g;
        g.kind = GeometryKind::point;
        g.point = LonLat{36.8, -1.3};
        CHECK_FALSE(validate_geometry(g).is_valid);
        CHECK(validate_geometry(derive_geometry(g).front()).is_valid);
    }

    TEST_CASE("validate: non-finite coordinate names the site and vertex") {
        SiteGeometry g;
        g.reported.push_back(
            {lonlat_ring({{0, 0}, {1, 0}, {std::numeric_limits<double>::quiet_NaN(), 1}, {0, 1}, {0, 0}}), {}});
        try {
            check_coordinates(g, "site-7");
            FAIL("expected GeometryError");
        } catch (const GeometryError& e) {
            CHECK(e.site_id() == "site-7");
            CHECK(e.vertex() == 2);
        }
        SiteGeometry out_of_range;
        out_of_range.reported.push_back({lonlat_ring({{0, 0}, {181, 0}, {1, 1}, {0, 0}}), {}});
        CHECK_THROWS_AS(check_coordinates(out_of_range, "x"), GeometryError);
    }

    TEST_CASE("circularity: unit square is pi/4") {
        const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
        CHECK(planar_circularity(sq) == doctest::Approx(pi / 4).epsilon(1e-12));
        const Polygon km_square = corpus::rectangle({36.8, -1.3}, 1.0, 1.0);
        CHECK(circularity(km_square) == doctest::Approx(0.785398).epsilon(1e-6));
    }

    TEST_CASE("circularity: regular 1024-gon matches the closed form") {
        const int n = 1024;
        const double expected = pi / (n * std::tan(pi / n));
        const double c = planar_circularity(regular_ngon(n));
        CHECK(c >= 0.99999);
        CHECK(c == doctest::Approx(expected).epsilon(1e-9));
    }

    TEST_CASE("circularity: 10:1 rectangle") {
        const std::vector<Vec2> r{{0, 0}, {10, 0}, {10, 1}, {0, 1}, {0, 0}};
        const double expected = 4 * pi * 10 / (22.0 * 22.0);
        CHECK(planar_circularity(r) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected == doctest::Approx(0.2596).epsilon(1e-3));
    }

    TEST_CASE("circularity: zero-area or invalid polygons are degenerate") {
        Polygon sliver{lonlat_ring({{0, 0}, {1, 0}, {2, 0}, {0, 0}}), {}};
        CHECK_THROWS_AS(circularity(sliver), DegenerateGeometry);
        Polygon bowtie{lonlat_ring({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}), {}};
        CHECK_THROWS_AS(circularity(bowtie), DegenerateGeometry);
    }

    TEST_CASE("property: circularity is scale invariant") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.5, 2.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Vec2> ring;
            const int n = 5 + trial % 7;
            for (int k = 0; k < n; ++k) {
                const double a = 2 * pi * k / n, r = u(rng);
                ring.push_back({r * std::cos(a), r * std::sin(a)});
            }
            ring.push_back(ring.front());
            const double base = planar_circularity(ring);
            for (double k : {1e-3, 0.37, 12.0, 4.5e3}) {
                std::vector<Vec2> scaled = ring;
                for (auto& v : scaled) v = {v.x * k, v.y * k};
                CHECK(std::abs(planar_circularity(scaled) - base) / base < 1e-9);
            }
        }
    }

    TEST_CASE("property: regular n-gons follow pi/(n tan(pi/n)) and increase with n") {
        double previous = 0.0;
        for (int n = 3; n <= 2048; n += (n < 64 ? 1 : 37)) {
            const double c = planar_circularity(regular_ngon(n, 3.0));
            CHECK(c == doctest::Approx(pi / (n * std::tan(pi / n))).epsilon(1e-9));
            CHECK(c > previous);
            previous = c;
        }
    }

    TEST_CASE("derive: point becomes a 64-gon of radius 100 m") {
        SiteGeometry g;
        g.kind = GeometryKind::point;
        g.point = LonLat{36.8, -1.3};
        const auto parts = derive_geometry(g);
        REQUIRE(parts.size() == 1);
        const SiteGeometry& d = parts.front();
        CHECK(d.is_point_origin);
        REQUIRE(d.derived);
        CHECK(d.derived->outer.size() == 65);
        const double r = 0.1, n = 64;
        const double ngon_area = n / 2 * r * r * std::sin(2 * pi / n);
        const double area = spherical_area_km2(*d.derived);
        CHECK(area == doctest::Approx(ngon_area).epsilon(1e-4));
        CHECK(std::abs(area - pi * r * r) / (pi * r * r) < 0.005);
        for (std::size_t k = 0; k + 1 < d.derived->outer.size(); ++k) {
            CHECK(geodesic_distance_km(*g.point, d.derived->outer[k]) == doctest::Approx(0.1).epsilon(1e-9));
        }
        const BBox box = bounding_box(*d.derived);
        CHECK(box.contains(d.centroid));
    }

    TEST_CASE("derive: polygon passthrough and idempotence") {
        SiteGeometry g;
        g.reported.push_back(corpus::rectangle({10, 50}, 2, 1, 0.3));
        const auto once = derive_geometry(g);
        REQUIRE(once.size() == 1);
        CHECK_FALSE(once[0].is_point_origin);
        CHECK(*once[0].derived == g.reported[0]);
        const auto twice = derive_geometry(once[0]);
        REQUIRE(twice.size() == 1);
        CHECK(*twice[0].derived == *once[0].derived);
        CHECK(twice[0].centroid == once[0].centroid);
    }

    TEST_CASE("derive: multipolygon of 3 disjoint rings gives 3 geometries") {
        SiteGeometry g;
        g.kind = GeometryKind::multipart;
        for (int k = 0; k < 3; ++k) g.reported.push_back(corpus::rectangle({10.0 + 0.1 * k, 50}, 1, 1));
        const auto parts = derive_geometry(g);
        REQUIRE(parts.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(*parts[k].derived == g.reported[k]);
    }

    TEST_CASE("derive: points near the poles are rejected") {
        SiteGeometry g;
        g.kind = GeometryKind::point;
        g.point = LonLat{0, 89.95};
        CHECK_THROWS_AS(derive_geometry(g), UnsupportedLatitude);
    }

    TEST_CASE("annulus: 1 km square with d = 500 m") {
        const Polygon sq = corpus::rectangle({36.8, -1.3}, 1.0, 1.0);
        const Polygon ann = outer_buffer_annulus(sq, 500.0);
        const double offset_area = spherical_area_km2(Polygon{ann.outer, {}});
        const double square_area = spherical_area_km2(sq);
        // Rounded-rectangle offset: 1 + 4 * (1 * 0.5) + pi * 0.5^2.
        const double offset_expected = 1.0 + 4 * 0.5 + pi * 0.25;
        CHECK(offset_area == doctest::Approx(offset_expected).epsilon(0.01));
        CHECK(spherical_area_km2(ann) == doctest::Approx(offset_expected - 1.0).epsilon(0.01));
        CHECK(std::abs(spherical_area_km2(ann) + square_area - offset_area) / offset_area < 1e-9);
    }

    TEST_CASE("annulus: d = 0 is empty and negative distances are rejected") {
        const Polygon sq = corpus::rectangle({0, 0}, 1.0, 1.0);
        const Polygon ann = outer_buffer_annulus(sq, 0.0);
        CHECK(ann.empty());
        CHECK(spherical_area_km2(ann) == 0.0);
        CHECK_THROWS_AS(outer_buffer_annulus(sq, -1.0), AnnulusError);
    }

    TEST_CASE("annulus: disjoint from the interior of the polygon") {
        const Polygon sq = corpus::rectangle({0, 0}, 1.0, 1.0);
        const Polygon ann = outer_buffer_annulus(sq, 500.0);
        REQUIRE_FALSE(ann.holes.empty());
        CHECK(ann.holes.back() == sq.outer);
    }

    TEST_CASE("property: annulus + original = offset for assorted shapes") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.2, 3.0);
        for (int trial = 0; trial < 20; ++trial) {
            const Polygon p = corpus::rectangle({-60.0 + trial, 10.0 - trial}, u(rng), u(rng), u(rng));
            const Polygon ann = outer_buffer_annulus(p, 100.0 + 50 * trial);
            const double off = spherical_area_km2(Polygon{ann.outer, {}});
            CHECK(std::abs(spherical_area_km2(ann) + spherical_area_km2(p) - off) / off < 1e-9);
        }
    }

    TEST_CASE("spherical area: 1 x 1 degree box at the equator") {
        const Polygon box{lonlat_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}), {}};
        const double d = pi / 180;
        const double expected = kEarthRadiusKm * kEarthRadiusKm * d * (std::sin(d) - std::sin(0.0));
        CHECK(expected == doctest::Approx(12364).epsilon(1e-3));
        // Edges are great-circle arcs while the formula bounds the box by a
        // parallel, so agreement is only to the stated tolerance.
        CHECK(spherical_area_km2(box) == doctest::Approx(expected).epsilon(1e-3));
    }

    TEST_CASE("spherical area: octant triangle is an eighth of the sphere") {
        const Polygon octant{lonlat_ring({{0, 0}, {90, 0}, {0, 90}, {0, 0}}), {}};
        const double expected = 4 * pi * kEarthRadiusKm * kEarthRadiusKm / 8;
        CHECK(spherical_area_km2(octant) == doctest::Approx(expected).epsilon(1e-12));
    }

    TEST_CASE("spherical area: zero-width sliver is zero") {
        const Polygon sliver{lonlat_ring({{0, 0}, {1, 0}, {1, 0}, {0, 0}}), {}};
        CHECK(spherical_area_km2(sliver) == doctest::Approx(0.0).epsilon(1e-12));
        const Polygon vertical{lonlat_ring({{5, 0}, {5, 1}, {5, 2}, {5, 0}}), {}};
        CHECK(std::abs(spherical_area_km2(vertical)) < 1e-9);
    }

    TEST_CASE("spherical area: orientation and rotation invariance, repeatable bits") {
        Polygon p = corpus::rectangle({120, -33}, 3.1, 0.7, 0.4);
        const double a = spherical_area_km2(p);
        Polygon rev = p;
        std::reverse(rev.outer.begin(), rev.outer.end());
        CHECK(spherical_area_km2(rev) == doctest::Approx(a).epsilon(1e-12));
        for (std::size_t k = 1; k + 1 < p.outer.size(); ++k) {
            Ring rot(p.outer.begin() + static_cast<long>(k), p.outer.end() - 1);
            rot.insert(rot.end(), p.outer.begin(), p.outer.begin() + static_cast<long>(k));
            rot.push_back(rot.front());
            CHECK(spherical_area_km2(Polygon{rot, {}}) == doctest::Approx(a).epsilon(1e-12));
        }
        CHECK(spherical_area_km2(p) == a);
    }

    TEST_CASE("assess: point-origin buffer is flagged perfectly circular") {
        SiteGeometry g;
        g.kind = GeometryKind::point;
        g.point = LonLat{36.8, -1.3};
        const SiteGeometry d = derive_geometry(g).front();
        const GeometryQuality q = assess_geometry(d);
        CHECK(q.is_valid);
        CHECK(q.is_point_origin);
        REQUIRE(q.circularity);
        const double n = 64;
        CHECK(*q.circularity == doctest::Approx(pi / (n * std::tan(pi / n))).epsilon(1e-6));
        CHECK(q.is_perfectly_circular);
        CHECK(q.area_km2 > 0);
    }
}
