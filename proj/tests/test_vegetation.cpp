#include "ldis/error.hpp"
#include "ldis/reference/corpus.hpp"
#include "ldis/reference/oracles.hpp"
#include "ldis/vegetation.hpp"

#include <algorithm>
#include <doctest.h>
#include <random>
#include <set>

using namespace ldis;

namespace {

const LonLat kCentre{30.0, 0.0};

GridLayer base_grid(double fill) { return make_grid(29.985, 0.015, 0.0005, 0.0005, 60, 60, fill); }

BandStack uniform_stack(int year, int month, double nir, double red, double rededge = 0.1, double cloud = 0.0) {
    BandStack s;
    s.year = year;
    s.month = month;
    s.bands.emplace("nir", base_grid(nir));
    s.bands.emplace("red", base_grid(red));
    s.bands.emplace("rededge", base_grid(rededge));
    s.bands.emplace("qa_cloud", base_grid(cloud));
    return s;
}

// Red reflectance giving the requested NDVI for nir = 0.5.
double red_for(double ndvi_value) { return 0.5 * (1 - ndvi_value) / (1 + ndvi_value); }

Polygon site_polygon() { return corpus::rectangle(kCentre, 1.0, 1.0); }

}  // namespace

TEST_SUITE("vegetation") {
    TEST_CASE("index formulas") {
        CHECK(ndvi(0.8, 0.2) == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(ndre(0.8, 0.4) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(savi(0.8, 0.2) == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(savi(0.3, 0.1) == doctest::Approx(0.2 / 0.9 * 1.5).epsilon(1e-15));
    }

    TEST_CASE("compute_index: zero denominator and nodata become nodata") {
        BandStack s = uniform_stack(2020, 1, 0.5, 0.2);
        s.bands.at("nir").at(0, 0) = 0.0;
        s.bands.at("red").at(0, 0) = 0.0;
        s.bands.at("red").at(0, 1) = s.bands.at("red").nodata;
        const GridLayer g = compute_index(s, VegIndex::ndvi);
        CHECK(g.is_nodata(g.at(0, 0)));
        CHECK(g.is_nodata(g.at(0, 1)));
        CHECK(g.at(0, 2) == ndvi(0.5, 0.2));
        // SAVI's denominator includes L, so 0/0.5 is defined.
        CHECK(compute_index(s, VegIndex::savi).at(0, 0) == 0.0);
    }

    TEST_CASE("compute_index: missing band names the band") {
        BandStack s = uniform_stack(2020, 1, 0.5, 0.2);
        s.bands.erase("rededge");
        try {
            compute_index(s, VegIndex::ndre);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("rededge") != std::string::npos);
        }
    }

    TEST_CASE("property: index ranges and per-pixel hand computation") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        BandStack s = uniform_stack(2020, 1, 0, 0);
        for (auto* name : {"nir", "red", "rededge"}) {
            for (auto& v : s.bands.at(name).values) v = u(rng);
        }
        const GridLayer n = compute_index(s, VegIndex::ndvi);
        const GridLayer e = compute_index(s, VegIndex::ndre);
        const GridLayer a = compute_index(s, VegIndex::savi);
        const auto& nir = s.bands.at("nir").values;
        const auto& red = s.bands.at("red").values;
        const auto& re = s.bands.at("rededge").values;
        for (std::size_t k = 0; k < nir.size(); ++k) {
            CHECK(std::abs(n.values[k] - (nir[k] - red[k]) / (nir[k] + red[k])) <= 1e-12);
            CHECK(std::abs(e.values[k] - (nir[k] - re[k]) / (nir[k] + re[k])) <= 1e-12);
            CHECK(std::abs(a.values[k] - (nir[k] - red[k]) / (nir[k] + red[k] + 0.5) * 1.5) <= 1e-12);
            CHECK(std::abs(n.values[k]) <= 1.0);
            CHECK(std::abs(e.values[k]) <= 1.0);
            CHECK(std::abs(a.values[k]) <= 1.5);
        }
    }

    TEST_CASE("property: zone mean of the index equals the mean of per-pixel values") {
        std::mt19937_64 rng(22);
        std::uniform_real_distribution<double> u(0.01, 1.0);
        BandStack s = uniform_stack(2020, 1, 0, 0);
        for (auto* name : {"nir", "red"}) {
            for (auto& v : s.bands.at(name).values) v = u(rng);
        }
        const Polygon zone = corpus::rectangle(kCentre, 1.3, 0.7, 0.4);
        const auto m = zone_mean(compute_index(s, VegIndex::ndvi), zone);
        REQUIRE(m);
        double sum = 0.0;
        long long count = 0;
        for (const auto& [r, c] : reference::pixels_in_zone(s.bands.at("nir"), zone)) {
            sum += ndvi(s.bands.at("nir").at(r, c), s.bands.at("red").at(r, c));
            ++count;
        }
        CHECK(m->count == count);
        CHECK(m->mean == sum / static_cast<double>(count));
    }

    TEST_CASE("cloud screen: 10% keep, 25% reject, exactly 20% reject") {
        // The zone covers a 10 x 10 block of pixel centres.
        const Polygon zone{{{29.99, 0.0}, {29.995, 0.0}, {29.995, 0.005}, {29.99, 0.005}, {29.99, 0.0}}, {}};
        auto with_cloudy = [&](int cloudy) {
            BandStack s = uniform_stack(2020, 1, 0.5, 0.2);
            auto& qa = s.bands.at("qa_cloud");
            int placed = 0;
            for (const auto& [r, c] : reference::pixels_in_zone(qa, zone)) {
                if (placed++ < cloudy) qa.at(r, c) = 1.0;
            }
            return s;
        };
        CHECK(reference::pixels_in_zone(base_grid(0), zone).size() == 100);
        CHECK(cloud_fraction_screen(with_cloudy(10), zone).keep);
        CHECK_FALSE(cloud_fraction_screen(with_cloudy(25), zone).keep);
        const CloudScreen at20 = cloud_fraction_screen(with_cloudy(20), zone);
        CHECK_FALSE(at20.keep);
        REQUIRE(at20.cloud_fraction);
        CHECK(*at20.cloud_fraction == 0.2);
        CHECK(cloud_fraction_screen(with_cloudy(19), zone).keep);
    }

    TEST_CASE("cloud screen: zone without valid pixels is rejected as not evaluable") {
        const BandStack s = uniform_stack(2020, 1, 0.5, 0.2);
        const Polygon far{{{50, 50}, {50.1, 50}, {50.1, 50.1}, {50, 50.1}, {50, 50}}, {}};
        const CloudScreen c = cloud_fraction_screen(s, far);
        CHECK_FALSE(c.keep);
        CHECK_FALSE(c.cloud_fraction.has_value());
        CHECK_FALSE(c.reason.empty());
    }

    TEST_CASE("greenest months") {
        MonthlyMeans summer{};
        for (int m = 0; m < 12; ++m) summer[m] = 0.3;
        summer[5] = 0.6;
        summer[6] = 0.7;
        summer[7] = 0.65;
        CHECK(top_green_months(summer) == std::array<int, 3>{6, 7, 8});

        MonthlyMeans africa{};
        const double v[12] = {0.62, 0.40, 0.45, 0.60, 0.58, 0.30, 0.25, 0.20, 0.22, 0.35, 0.50, 0.55};
        for (int m = 0; m < 12; ++m) africa[m] = v[m];
        CHECK(top_green_months(africa) == std::array<int, 3>{1, 4, 5});
        CHECK(continent_green_months("Africa") == std::array<int, 3>{1, 4, 5});
        CHECK(continent_green_months("South America") == std::array<int, 3>{2, 3, 10});
        CHECK_FALSE(continent_green_months("Oceania").has_value());

        // Mar and Nov tie below the Jul peak; Dec ties too but loses to both.
        MonthlyMeans tie{};
        for (int m = 0; m < 12; ++m) tie[m] = 0.1;
        tie[2] = 0.5;
        tie[10] = 0.5;
        tie[11] = 0.5;
        tie[6] = 0.8;
        CHECK(top_green_months(tie) == std::array<int, 3>{3, 7, 11});

        MonthlyMeans sparse{};
        sparse[0] = 0.2;
        sparse[4] = 0.3;
        CHECK_FALSE(top_green_months(sparse).has_value());
        CHECK_FALSE(top_green_months(MonthlyMeans{}).has_value());
    }

    TEST_CASE("greenest months: agrees with a stable-sort oracle") {
        std::mt19937_64 rng(2);
        std::uniform_int_distribution<int> level(0, 5);
        for (int trial = 0; trial < 500; ++trial) {
            MonthlyMeans means{};
            std::vector<std::pair<double, int>> present;
            for (int m = 0; m < 12; ++m) {
                if (level(rng) == 0) continue;
                means[m] = 0.1 * level(rng);
                present.emplace_back(*means[m], m + 1);
            }
            std::stable_sort(present.begin(), present.end(), [](auto a, auto b) { return a.first > b.first; });
            const auto got = top_green_months(means);
            if (present.size() < 3) {
                CHECK_FALSE(got.has_value());
                continue;
            }
            std::array<int, 3> want{present[0].second, present[1].second, present[2].second};
            std::sort(want.begin(), want.end());
            CHECK(got == want);
        }
    }

    TEST_CASE("median composite: odd and even counts, nodata skipped") {
        BandStack a = uniform_stack(2020, 1, 0.1, 0.1), b = uniform_stack(2020, 2, 0.3, 0.1),
                  c = uniform_stack(2020, 3, 0.9, 0.1);
        c.bands.at("nir").at(0, 0) = c.bands.at("nir").nodata;
        const std::vector<const BandStack*> three{&a, &b, &c};
        const BandStack m3 = median_composite(three);
        CHECK(m3.bands.at("nir").at(1, 1) == 0.3);
        CHECK(m3.bands.at("nir").at(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
        const std::vector<const BandStack*> none{};
        CHECK_THROWS(median_composite(none));
    }

    TEST_CASE("zone series: constant 0.5 over both zones") {
        const Polygon site = site_polygon();
        const Polygon ann = outer_buffer_annulus(site, 500.0);
        std::vector<BandStack> stacks;
        for (int y = 2014; y <= 2020; ++y) stacks.push_back(uniform_stack(y, 6, 0.5, red_for(0.5)));
        VegetationOptions opts;
        opts.months_override = std::array<int, 3>{5, 6, 7};
        const auto series = zone_index_series(stacks, "s1", 2015, site, ann, opts);
        REQUIRE(series.size() == 30);
        for (const auto& r : series) {
            if (r.index != VegIndex::ndvi) continue;
            CHECK(r.evaluable);
            CHECK(r.mean_value == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(r.pixel_count > 0);
        }
        CHECK(series.front().zone == Zone::site);
        CHECK(series.back().zone == Zone::annulus);
    }

    TEST_CASE("zone series: inside 0.6, outside 0.3") {
        const Polygon site = site_polygon();
        const Polygon ann = outer_buffer_annulus(site, 500.0);
        BandStack s = uniform_stack(2015, 6, 0.5, red_for(0.3));
        auto& red = s.bands.at("red");
        for (const auto& [r, c] : reference::pixels_in_zone(red, site)) red.at(r, c) = red_for(0.6);
        VegetationOptions opts;
        opts.months_override = std::array<int, 3>{5, 6, 7};
        const auto series = zone_index_series(std::vector<BandStack>{s}, "s1", 2015, site, ann, opts);
        for (const auto& r : series) {
            if (r.index != VegIndex::ndvi) continue;
            if (r.period != 0) {
                CHECK_FALSE(r.evaluable);
                continue;
            }
            CHECK(r.evaluable);
            CHECK(r.mean_value == doctest::Approx(r.zone == Zone::site ? 0.6 : 0.3).epsilon(1e-12));
        }
    }

    TEST_CASE("zone series: growth sequence is strictly increasing, order invariant") {
        const Polygon site = site_polygon();
        const Polygon ann = outer_buffer_annulus(site, 500.0);
        const std::map<int, double> level{{-1, 0.37}, {0, 0.39}, {1, 0.41}, {2, 0.43}, {5, 0.47}};
        std::vector<BandStack> stacks;
        for (const auto& [p, v] : level) {
            for (int m : {1, 4, 5, 8}) {
                // Off-season months are browner and must not enter the composite.
                stacks.push_back(uniform_stack(2016 + p, m, 0.5, red_for(m == 8 ? v - 0.2 : v)));
            }
        }
        for (int m = 1; m <= 12; ++m) {
            const double v = (m == 1 || m == 4 || m == 5) ? 0.7 : 0.2;
            stacks.push_back(uniform_stack(2023, m, 0.5, red_for(v)));
        }
        const auto series = zone_index_series(stacks, "g", 2016, site, ann);
        std::vector<double> site_ndvi;
        for (const auto& r : series) {
            if (r.zone == Zone::site && r.index == VegIndex::ndvi) {
                CHECK(r.evaluable);
                CHECK(r.mean_value == doctest::Approx(level.at(r.period)).epsilon(1e-12));
                site_ndvi.push_back(r.mean_value);
            }
        }
        REQUIRE(site_ndvi.size() == 5);
        for (std::size_t k = 1; k < site_ndvi.size(); ++k) CHECK(site_ndvi[k] > site_ndvi[k - 1]);

        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 3; ++trial) {
            std::shuffle(stacks.begin(), stacks.end(), rng);
            const auto again = zone_index_series(stacks, "g", 2016, site, ann);
            REQUIRE(again.size() == series.size());
            for (std::size_t k = 0; k < series.size(); ++k) {
                CHECK(again[k].mean_value == series[k].mean_value);
                CHECK(again[k].pixel_count == series[k].pixel_count);
                CHECK(again[k].evaluable == series[k].evaluable);
            }
        }
    }

    TEST_CASE("zone series: cloudy stacks are dropped, leaving the period not evaluable") {
        const Polygon site = site_polygon();
        const Polygon ann = outer_buffer_annulus(site, 500.0);
        std::vector<BandStack> stacks{uniform_stack(2015, 6, 0.5, 0.2, 0.1, 1.0), uniform_stack(2016, 6, 0.5, 0.2)};
        VegetationOptions opts;
        opts.months_override = std::array<int, 3>{6, 7, 8};
        const auto series = zone_index_series(stacks, "c", 2015, site, ann, opts);
        for (const auto& r : series) CHECK(r.evaluable == (r.period == 1));
    }

    TEST_CASE("property: site and annulus pixel sets are disjoint") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(0.3, 1.5), a(0, 3.0);
        const GridLayer g = base_grid(0.0);
        for (int trial = 0; trial < 20; ++trial) {
            const Polygon site = corpus::rectangle(kCentre, u(rng), u(rng), a(rng));
            const Polygon ann = outer_buffer_annulus(site, 100.0 + 25 * trial);
            std::set<std::pair<int, int>> inside;
            ZoneScanner(site).for_each(g, [&](int r, int c) { inside.emplace(r, c); });
            long long shared = 0, ring = 0;
            ZoneScanner(ann).for_each(g, [&](int r, int c) {
                ++ring;
                shared += inside.count({r, c});
            });
            CHECK(ring > 0);
            CHECK(shared == 0);
        }
    }
}
