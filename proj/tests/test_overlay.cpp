#include "ldis/overlay.hpp"
#include "ldis/reference/oracles.hpp"

#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

using namespace ldis;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

Polygon box_polygon(double lon0, double lat0, double lon1, double lat1) {
    return {{{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}}, {}};
}

// Star-shaped random polygon around (cx, cy) with radii in [r0, r1] degrees.
Polygon random_star(std::mt19937_64& rng, double cx, double cy, double r0, double r1, int n) {
    std::uniform_real_distribution<double> u(r0, r1);
    Polygon p;
    for (int k = 0; k < n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        const double r = u(rng);
        p.outer.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    p.outer.push_back(p.outer.front());
    return p;
}

LonLat slerp(LonLat a, LonLat b, double t) {
    auto vec = [](LonLat p) {
        return std::array<double, 3>{std::cos(p.lat * deg) * std::cos(p.lon * deg),
                                     std::cos(p.lat * deg) * std::sin(p.lon * deg), std::sin(p.lat * deg)};
    };
    const auto va = vec(a), vb = vec(b);
    const double omega = std::acos(std::clamp(va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2], -1.0, 1.0));
    const double sa = std::sin((1 - t) * omega) / std::sin(omega), sb = std::sin(t * omega) / std::sin(omega);
    const double x = sa * va[0] + sb * vb[0], y = sa * va[1] + sb * vb[1], z = sa * va[2] + sb * vb[2];
    return {std::atan2(y, x) / deg, std::atan2(z, std::hypot(x, y)) / deg};
}

// Dense sampling oracle: walk each road at roughly 1 m steps and count the
// step midpoints inside the zone (even-odd on lon/lat edges).
double sampled_length_km(const std::vector<Polyline>& roads, const Polygon& zone) {
    double total = 0.0;
    for (const auto& road : roads) {
        for (std::size_t i = 0; i + 1 < road.size(); ++i) {
            const double len = geodesic_distance_km(road[i], road[i + 1]);
            const auto steps = static_cast<long>(std::ceil(len * 1000.0));
            for (long s = 0; s < steps; ++s) {
                const LonLat m = slerp(road[i], road[i + 1], (s + 0.5) / static_cast<double>(steps));
                if (reference::centre_inside(zone, m.lon, m.lat)) total += len / static_cast<double>(steps);
            }
        }
    }
    return total;
}

GridLayer pad(const GridLayer& g, int k) {
    GridLayer out = make_grid(g.origin_lon - k * g.pixel_dx, g.origin_lat + k * g.pixel_dy, g.pixel_dx, g.pixel_dy,
                              g.width + 2 * k, g.height + 2 * k, g.nodata, g.semantics);
    out.nodata = g.nodata;
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) out.at(r + k, c + k) = g.at(r, c);
    }
    return out;
}

}  // namespace

TEST_SUITE("overlay-augment") {
    TEST_CASE("zonal fraction: uniform class layer") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 50, 50, 5.0, LayerSemantics::class_coded);
        CHECK(zonal_class_fraction(g, box_polygon(0.1, 0.6, 0.3, 0.9), {5}) == 1.0);
        CHECK(zonal_class_fraction(g, box_polygon(0.1, 0.6, 0.3, 0.9), {4}) == 0.0);
    }

    TEST_CASE("zonal fraction: checkerboard over a 10 x 10 pixel zone") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 30, 30, 0.0, LayerSemantics::class_coded);
        for (int r = 0; r < g.height; ++r) {
            for (int c = 0; c < g.width; ++c) g.at(r, c) = (r + c) % 2;
        }
        // Pixel edges of columns 5..14 and rows 5..14.
        const Polygon zone = box_polygon(0.05, 0.85, 0.15, 0.95);
        const ZonalCount n = zonal_class_count(g, zone, {1});
        const ZonalCount ref = reference::zonal_class_count(g, zone, {1});
        CHECK(n.valid == 100);
        CHECK(n.in_class == ref.in_class);
        CHECK(n.valid == ref.valid);
        CHECK(zonal_class_fraction(g, zone, {1}) == 0.5);
    }

    TEST_CASE("zonal fraction: zone outside the raster or without pixel centres") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 10, 10, 1.0, LayerSemantics::class_coded);
        CHECK_FALSE(zonal_class_fraction(g, box_polygon(5, 5, 6, 6), {1}).has_value());
        CHECK_FALSE(zonal_class_fraction(g, box_polygon(0.0001, 0.9901, 0.0002, 0.9902), {1}).has_value());
    }

    TEST_CASE("zonal fraction: nodata is excluded from both counts") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 10, 10, 1.0, LayerSemantics::class_coded);
        for (int c = 0; c < 10; ++c) g.at(0, c) = g.nodata;
        for (int c = 0; c < 10; ++c) g.at(1, c) = 2.0;
        const auto f = zonal_class_fraction(g, box_polygon(0, 0.9, 0.1, 1.0), {1});
        REQUIRE(f);
        CHECK(*f == doctest::Approx(80.0 / 90.0).epsilon(1e-15));
    }

    TEST_CASE("zonal fraction: matches brute force on random stars and holes, padding invariant") {
        std::mt19937_64 rng(17);
        std::uniform_int_distribution<int> cls(0, 4);
        const double dx = 1.0 / 512;
        GridLayer g = make_grid(10, 20, dx, dx, 200, 160, 0.0, LayerSemantics::class_coded);
        for (auto& v : g.values) v = cls(rng) == 4 ? g.nodata : cls(rng);
        for (int trial = 0; trial < 20; ++trial) {
            Polygon zone = random_star(rng, 10.2, 19.85, 0.03, 0.15, 7 + trial);
            if (trial % 2) zone.holes.push_back(random_star(rng, 10.2, 19.85, 0.005, 0.02, 6).outer);
            const ZonalCount a = zonal_class_count(g, zone, {1, 3});
            const ZonalCount b = reference::zonal_class_count(g, zone, {1, 3});
            CHECK(a.in_class == b.in_class);
            CHECK(a.valid == b.valid);
            const GridLayer padded = pad(g, 7);
            const ZonalCount c = zonal_class_count(padded, zone, {1, 3});
            CHECK(c.in_class == a.in_class);
            CHECK(c.valid == a.valid);
        }
    }

    TEST_CASE("road density: 2 km of road inside a 1 km^2 square") {
        const LocalPlane plane({36.8, -1.3});
        auto at = [&](double x, double y) { return plane.inverse({x, y}); };
        const Polygon zone{{at(0, 0), at(1, 0), at(1, 1), at(0, 1), at(0, 0)}, {}};
        // 0.8 + 0.8 + 0.4 km: a 2 km straight segment cannot fit in a 1 km square.
        const std::vector<Polyline> roads{{at(0.1, 0.1), at(0.9, 0.1), at(0.9, 0.9), at(0.5, 0.9)}};
        const auto d = road_density(roads, zone);
        REQUIRE(d);
        CHECK(*d == doctest::Approx(2.0).epsilon(1e-6));
    }

    TEST_CASE("road density: present layer without intersecting roads is 0, empty layer is not evaluable") {
        const Polygon zone = box_polygon(0, 0, 0.01, 0.01);
        const std::vector<Polyline> far{{{1, 1}, {1.1, 1.1}}};
        CHECK(road_density(far, zone) == 0.0);
        CHECK_FALSE(road_density({}, zone).has_value());
    }

    TEST_CASE("road density: crossing segment agrees with the 1 m sampling oracle") {
        const LocalPlane plane({-60.0, 5.0});
        auto at = [&](double x, double y) { return plane.inverse({x, y}); };
        const Polygon zone{{at(0, 0), at(1, 0), at(1, 1), at(0, 1), at(0, 0)}, {}};
        // 40% of a 2.5 km segment lies inside.
        const std::vector<Polyline> roads{{at(-0.9, 0.37), at(1.6, 0.37)}};
        const double got = clipped_length_km(roads, zone);
        const double oracle = sampled_length_km(roads, zone);
        CHECK(got == doctest::Approx(oracle).epsilon(2e-3));
        CHECK(got == doctest::Approx(0.4 * geodesic_distance_km(roads[0][0], roads[0][1])).epsilon(2e-3));

        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-0.5, 1.5);
        for (int trial = 0; trial < 10; ++trial) {
            Polyline road;
            for (int k = 0; k < 4; ++k) road.push_back(at(u(rng), u(rng)));
            const std::vector<Polyline> rs{road};
            const double oracle_len = sampled_length_km(rs, zone);
            CHECK(std::abs(clipped_length_km(rs, zone) - oracle_len) < 5e-3);
        }
    }

    TEST_CASE("property: road density is additive under splitting") {
        const LocalPlane plane({100.0, 15.0});
        auto at = [&](double x, double y) { return plane.inverse({x, y}); };
        const Polygon zone{{at(0, 0), at(2, 0), at(2, 1), at(1, 1.5), at(0, 1), at(0, 0)}, {}};
        const Polyline road{at(-1, 0.2), at(1.5, 1.4), at(2.5, -0.3)};
        const double whole = clipped_length_km(std::vector<Polyline>{road}, zone);
        REQUIRE(whole > 0);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Polyline> parts;
            for (std::size_t i = 0; i + 1 < road.size(); ++i) {
                const LonLat cut = slerp(road[i], road[i + 1], u(rng));
                parts.push_back({road[i], cut});
                parts.push_back({cut, road[i + 1]});
            }
            CHECK(std::abs(clipped_length_km(parts, zone) - whole) / whole < 1e-9);
        }
    }

    TEST_CASE("road area fraction: buffered road covering the zone") {
        const LocalPlane plane({0.0, 0.0});
        auto at = [&](double x, double y) { return plane.inverse({x, y}); };
        const Polygon zone{{at(0, 0), at(1, 0), at(1, 1), at(0, 1), at(0, 0)}, {}};
        const std::vector<Polyline> road{{at(-1, 0.5), at(2, 0.5)}};
        const auto f = road_area_fraction(road, zone, 50.0);
        REQUIRE(f);
        CHECK(*f == doctest::Approx(0.1).epsilon(1e-6));
        CHECK_FALSE(road_area_fraction({}, zone, 50.0).has_value());
    }

    TEST_CASE("loss windows: none, all at y-1, mixed 2015 fixture") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 10, 10, 0.0, LayerSemantics::loss_year);
        const Polygon zone = box_polygon(-0.001, 0.899, 0.101, 1.001);
        auto w = tree_loss_windows(g, zone, 2015);
        REQUIRE(w);
        CHECK(w->pre5 == 0.0);
        CHECK(w->pre1 == 0.0);
        CHECK(w->post5 == 0.0);

        for (auto& v : g.values) v = 14;
        w = tree_loss_windows(g, zone, 2015);
        CHECK(w->pre5 == 1.0);
        CHECK(w->pre1 == 1.0);
        CHECK(w->post5 == 0.0);

        for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = i < 30 ? 12 : (i < 40 ? 18 : 0);
        w = tree_loss_windows(g, zone, 2015);
        const auto ref = reference::tree_loss_windows(g, zone, 2015);
        REQUIRE(ref);
        CHECK(w->pre5 == ref->pre5);
        CHECK(w->pre1 == ref->pre1);
        CHECK(w->post5 == ref->post5);
        CHECK(w->pre5 == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(w->pre1 == 0.0);
        CHECK(w->post5 == doctest::Approx(0.1).epsilon(1e-15));
        CHECK_FALSE(w->pre5_partial);
        CHECK_FALSE(w->post5_partial);
    }

    TEST_CASE("loss windows: range clipping and out-of-range years") {
        GridLayer g = make_grid(0, 1, 0.01, 0.01, 10, 10, 1.0, LayerSemantics::loss_year);
        const Polygon zone = box_polygon(-0.001, 0.899, 0.101, 1.001);
        CHECK_FALSE(tree_loss_windows(g, zone, 1999).has_value());
        CHECK_FALSE(tree_loss_windows(g, zone, 2024).has_value());
        const auto early = tree_loss_windows(g, zone, 2003);
        REQUIRE(early);
        CHECK(early->pre5_partial);
        CHECK_FALSE(early->pre1_partial);
        CHECK(early->pre5 == 1.0);
        const auto late = tree_loss_windows(g, zone, 2020);
        REQUIRE(late);
        CHECK(late->post5_partial);
    }

    TEST_CASE("property: each pixel lands in pre5 iff its year is in [y-5, y-1]") {
        for (int y = 2000; y <= 2023; ++y) {
            for (int k = 0; k <= 23; ++k) {
                GridLayer g = make_grid(0, 1, 0.01, 0.01, 1, 1, k, LayerSemantics::loss_year);
                const auto w = tree_loss_windows(g, box_polygon(-0.001, 0.98, 0.011, 1.001), y);
                REQUIRE(w);
                const int year = 2000 + k;
                CHECK((w->pre5 == 1.0) == (k > 0 && year >= y - 5 && year <= y - 1));
                CHECK((w->pre1 == 1.0) == (k > 0 && year == y - 1));
                CHECK((w->post5 == 1.0) == (k > 0 && year >= y + 1 && year <= y + 5));
            }
        }
    }

    TEST_CASE("terrain: flat DEM") {
        GridLayer dem = make_grid(30, 0.1, 0.001, 0.001, 40, 40, 100.0);
        const auto t = terrain_stats(dem, box_polygon(30.01, 0.07, 30.03, 0.09));
        REQUIRE(t);
        CHECK(t->mean_elevation_m == 100.0);
        REQUIRE(t->mean_slope_deg);
        CHECK(*t->mean_slope_deg == 0.0);
    }

    TEST_CASE("terrain: inclined plane with gradient 0.1 in x") {
        GridLayer dem = make_grid(30, 0.1, 0.001, 0.001, 40, 40, 0.0);
        const double m_per_deg = kEarthRadiusKm * 1000.0 * deg;
        for (int r = 0; r < dem.height; ++r) {
            const double dx_m = dem.pixel_dx * m_per_deg * std::cos(dem.center_lat(r) * deg);
            for (int c = 0; c < dem.width; ++c) dem.at(r, c) = 500.0 + 0.1 * dx_m * c;
        }
        const auto t = terrain_stats(dem, box_polygon(30.01, 0.07, 30.03, 0.09));
        REQUIRE(t);
        REQUIRE(t->mean_slope_deg);
        CHECK(std::abs(*t->mean_slope_deg - std::atan(0.1) / deg) < 0.05);
        CHECK(std::atan(0.1) / deg == doctest::Approx(5.711).epsilon(1e-4));
    }

    TEST_CASE("terrain: nodata holes are excluded") {
        GridLayer dem = make_grid(30, 0.1, 0.001, 0.001, 20, 20, 10.0);
        dem.at(5, 5) = dem.nodata;
        dem.at(6, 6) = 40.0;
        const Polygon zone = box_polygon(30.0, 0.08, 30.01, 0.1);  // columns 0-9, rows 0-19
        const auto t = terrain_stats(dem, zone);
        const auto ref = reference::terrain_stats(dem, zone);
        REQUIRE(t);
        REQUIRE(ref);
        CHECK(t->elevation_count == ref->elevation_count);
        CHECK(t->mean_elevation_m == ref->mean_elevation_m);
        CHECK(t->slope_count == ref->slope_count);
        CHECK(*t->mean_slope_deg == *ref->mean_slope_deg);
        CHECK(t->elevation_count == 10 * 20 - 1);
        CHECK(t->mean_elevation_m == doctest::Approx((10.0 * 198 + 40.0) / 199).epsilon(1e-15));
        CHECK_FALSE(terrain_stats(dem, box_polygon(50, 50, 51, 51)).has_value());
    }

    TEST_CASE("terrain: parallel slope equals the serial reference bit for bit") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> n(0.0, 30.0);
        GridLayer dem = make_grid(-70, -10, 1.0 / 1200, 1.0 / 1200, 300, 257, 0.0);
        for (auto& v : dem.values) v = 800 + n(rng);
        for (int k = 0; k < 200; ++k) dem.values[rng() % dem.values.size()] = dem.nodata;
        const GridLayer a = slope_degrees(dem);
        const GridLayer b = reference::slope_degrees(dem);
        CHECK(a.values == b.values);
    }

    TEST_CASE("climate: constant, monthly mean and boundary tie") {
        MonthlyLayers constant;
        for (int m = 0; m < 12; ++m) constant.by_year[2010].push_back(make_grid(0, 10, 0.5, 0.5, 4, 4, 50.0));
        CHECK(sample_year_mean(constant, 2010, {1.1, 9.1}) == 50.0);
        CHECK_FALSE(sample_year_mean(constant, 2011, {1.1, 9.1}).has_value());

        MonthlyLayers months;
        for (int m = 1; m <= 12; ++m) months.by_year[2010].push_back(make_grid(0, 10, 0.5, 0.5, 4, 4, m));
        CHECK(sample_year_mean(months, 2010, {1.1, 9.1}) == 6.5);

        // On the boundary between columns 0/1 and rows 1/2 the lower indices win.
        GridLayer g = make_grid(0, 10, 0.5, 0.5, 4, 4, 0.0);
        const auto cell = nearest_cell(g, {0.5, 9.0});
        REQUIRE(cell);
        CHECK(cell->first == 1);
        CHECK(cell->second == 0);
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) g.at(r, c) = 10 * r + c;
        }
        MonthlyLayers tie;
        for (int m = 0; m < 12; ++m) tie.by_year[2012].push_back(g);
        CHECK(sample_year_mean(tie, 2012, {0.5, 9.0}) == 10.0);
        CHECK_FALSE(nearest_cell(g, {-0.1, 9.0}).has_value());
    }

    TEST_CASE("climate: offsets 0, 1, 2, 5 with missing years not evaluable") {
        MonthlyLayers precip;
        for (int y : {2010, 2011, 2015}) {
            for (int m = 0; m < 12; ++m) precip.by_year[y].push_back(make_grid(0, 10, 0.5, 0.5, 4, 4, y - 2000.0));
        }
        const auto s = sample_climate_at_centroid({&precip, nullptr, nullptr}, {1.0, 9.0}, 2010);
        CHECK(s.values[0][0] == 10.0);
        CHECK(s.values[0][1] == 11.0);
        CHECK_FALSE(s.values[0][2].has_value());
        CHECK(s.values[0][3] == 15.0);
        CHECK_FALSE(s.values[1][0].has_value());
    }
}
