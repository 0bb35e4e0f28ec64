#include "ldis/catalog.hpp"
#include "ldis/config.hpp"
#include "ldis/csv.hpp"
#include "ldis/error.hpp"

#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

using namespace ldis;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json square(double lon, double lat, double d = 0.01) {
    return {{"type", "Polygon"},
            {"coordinates", {{{lon, lat}, {lon + d, lat}, {lon + d, lat + d}, {lon, lat + d}, {lon, lat}}}}};
}

json feature(json props, json geometry) {
    return {{"type", "Feature"}, {"properties", std::move(props)}, {"geometry", std::move(geometry)}};
}

json collection(std::vector<json> features) { return {{"type", "FeatureCollection"}, {"features", features}}; }

fs::path temp_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("ldis_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_SUITE("pipeline-cli") {
    TEST_CASE("ingest: two features, sorted, with harmonised fields") {
        const auto res = ingest_features(
            collection({feature({{"site_id", "b"}, {"area", "250 ha"}, {"country", "KEN"}, {"iso3", "ken"}},
                                square(36.8, -1.3)),
                        feature({{"siteId", "a"}, {"area_km2", 1.5}, {"planting_date", "2015-03-01"}},
                                square(36.9, -1.3))}),
            "test");
        REQUIRE(res.sites.size() == 2);
        CHECK(res.sites[0].site_id == "a");
        CHECK(res.sites[1].site_id == "b");
        CHECK(res.sites[1].area_km2_reported == doctest::Approx(2.5));
        CHECK(res.sites[1].iso3 == "KEN");
        CHECK(res.sites[0].area_km2_reported == 1.5);
        CHECK(res.sites[0].planting_year() == 2015);
        CHECK(res.sites[0].planting_date_type == PlantingDateType::planting);
        CHECK(res.sites[0].area_km2 > 1.0);
        // Reported properties are kept verbatim.
        CHECK(res.sites[1].reported.at("area") == "250 ha");
        CHECK(res.sites[1].reported.at("country") == "KEN");
    }

    TEST_CASE("ingest: area units") {
        CHECK(parse_area_km2("250 ha") == doctest::Approx(2.5));
        CHECK(parse_area_km2("250") == doctest::Approx(2.5));
        CHECK(parse_area_km2("3 km2") == doctest::Approx(3.0));
        CHECK(parse_area_km2("3 km²") == doctest::Approx(3.0));
        CHECK(parse_area_km2("1,000,000 m2") == doctest::Approx(1.0));
        CHECK(parse_area_km2("100 acres") == doctest::Approx(0.40468564224));
        CHECK_FALSE(parse_area_km2("large").has_value());
    }

    TEST_CASE("ingest: multipolygon of three rings gives suffixed ids") {
        json mp = {{"type", "MultiPolygon"},
                   {"coordinates",
                    {square(10, 10)["coordinates"], square(10.1, 10)["coordinates"], square(10.2, 10)["coordinates"]}}};
        const auto res = ingest_features(collection({feature({{"site_id", "m"}}, mp)}), "test");
        REQUIRE(res.sites.size() == 3);
        CHECK(res.sites[0].site_id == "m#1");
        CHECK(res.sites[2].site_id == "m#3");
        for (const auto& s : res.sites) CHECK(s.parent_id == "m");
    }

    TEST_CASE("ingest: points become derived buffers") {
        const auto res = ingest_features(
            collection({feature({{"site_id", "p"}}, {{"type", "Point"}, {"coordinates", {36.8, -1.3}}})}), "test");
        REQUIRE(res.sites.size() == 1);
        CHECK(res.sites[0].geometry.is_point_origin);
        CHECK(res.sites[0].area_km2 == doctest::Approx(0.0314).epsilon(0.01));
    }

    TEST_CASE("ingest: duplicate ids list every collision") {
        try {
            ingest_features(collection({feature({{"site_id", "x"}}, square(0, 0)), feature({{"site_id", "x"}}, square(1, 0)),
                                        feature({{"site_id", "y"}}, square(2, 0)), feature({{"site_id", "y"}}, square(3, 0))}),
                            "test");
            FAIL("expected IngestError");
        } catch (const IngestError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("x") != std::string::npos);
            CHECK(msg.find("y") != std::string::npos);
        }
    }

    TEST_CASE("ingest: dates, precedence and unparseable values") {
        const auto res = ingest_features(
            collection({feature({{"site_id", "a"}, {"registration_date", "2011"}, {"crediting_start", "2012-01"}}, square(0, 0)),
                        feature({{"site_id", "b"}, {"registration_date", "2011"}}, square(1, 0)),
                        feature({{"site_id", "c"}, {"planting_date", "sometime"}}, square(2, 0)),
                        feature({{"site_id", "d"}, {"planting_date", "15/06/2018"}, {"intervention_year", "2016"}},
                                square(3, 0))}),
            "test");
        REQUIRE(res.sites.size() == 4);
        CHECK(res.sites[0].planting_date_type == PlantingDateType::crediting_start);
        CHECK(res.sites[0].planting_date->iso() == "2012-01");
        CHECK(res.sites[1].planting_date_type == PlantingDateType::registration);
        CHECK(res.sites[2].planting_date_type == PlantingDateType::unknown);
        CHECK_FALSE(res.sites[2].planting_date.has_value());
        CHECK(res.sites[3].planting_date->iso() == "2018-06-15");
        CHECK(res.warnings.size() == 1);
    }

    TEST_CASE("dates: accepted forms and rejected ones") {
        CHECK(parse_date("2019")->iso() == "2019");
        CHECK(parse_date("2019-02-28T00:00:00Z")->iso() == "2019-02-28");
        CHECK(parse_date("29.02.2020")->iso() == "2020-02-29");
        CHECK(parse_date("2017.0")->iso() == "2017");
        CHECK_FALSE(parse_date("2019-02-29").has_value());
        CHECK_FALSE(parse_date("13/13/2019").has_value());
        CHECK_FALSE(parse_date("").has_value());
    }

    TEST_CASE("ingest: bad coordinates name the site") {
        json bad = square(0, 0);
        bad["coordinates"][0][2] = {200.0, 0.0};
        try {
            ingest_features(collection({feature({{"site_id", "bad"}}, bad)}), "test");
            FAIL("expected GeometryError");
        } catch (const GeometryError& e) {
            CHECK(e.site_id() == "bad");
            CHECK(e.vertex() == 2);
        }
    }

    TEST_CASE("ingest: metadata CSV fills missing properties only") {
        const fs::path dir = temp_dir("meta");
        std::ofstream(dir / "cat.geojson")
            << collection({feature({{"site_id", "a"}, {"project_name", "Own name"}}, square(0, 0))}).dump();
        std::ofstream(dir / "meta.csv") << "site_id,project_name,trees_planted\na,Other name,1200\n";
        const std::vector<fs::path> paths{dir / "cat.geojson"};
        const auto res = ingest_catalog(paths, dir / "meta.csv");
        REQUIRE(res.sites.size() == 1);
        CHECK(res.sites[0].project_name == "Own name");
        CHECK(res.sites[0].trees_planted == 1200.0);
    }

    TEST_CASE("filter: keyword, drop, classification precedence") {
        auto k = filter_afforestation("Community reforestation, Kenya", "", "");
        CHECK(k.keep);
        CHECK(k.rule == "keyword");
        auto d = filter_afforestation("Improved cookstoves phase 2", "", "");
        CHECK_FALSE(d.keep);
        CHECK(d.rule == "none");
        CHECK_FALSE(d.reason.empty());
        auto c = filter_afforestation("Household energy", "", "ARR");
        CHECK(c.keep);
        CHECK(c.rule == "classification");
        CHECK(filter_afforestation("", "Large-scale TREE PLANTING effort", "").keep);
    }

    TEST_CASE("config: relative paths, defaults and missing files") {
        const fs::path dir = temp_dir("cfg");
        std::ofstream(dir / "cat.geojson") << collection({}).dump();
        const json doc = {{"catalog", "cat.geojson"}, {"seed", 7}, {"scoring", {{"circle_threshold", 0.9}}}};
        const RunConfig cfg = parse_config(doc, dir);
        REQUIRE(cfg.catalog.size() == 1);
        CHECK(cfg.catalog[0] == (dir / "cat.geojson").lexically_normal());
        CHECK(cfg.seed == 7);
        CHECK(cfg.scoring.circle_threshold == 0.9);
        CHECK(cfg.scoring.infra_threshold == 0.10);
        CHECK_FALSE(cfg.roads.has_value());

        try {
            parse_config({{"layers", {{"roads", "missing.geojson"}}}}, dir);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("layers.roads") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_config({{"scoring", {{"dup_threshold", 1.5}}}}, dir), ConfigError);
        CHECK_THROWS_AS(parse_config({{"workers", -1}}, dir), ConfigError);
    }

    TEST_CASE("config: load keeps the raw text") {
        const fs::path dir = temp_dir("cfgraw");
        const std::string text = "{\n  \"seed\": 3\n}\n";
        std::ofstream(dir / "run.json") << text;
        const RunConfig cfg = load_config(dir / "run.json");
        CHECK(cfg.raw_text == text);
        CHECK(cfg.seed == 3);
        std::ofstream(dir / "broken.json") << "{ not json";
        CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
    }

    TEST_CASE("csv: quoting round trip") {
        const std::vector<std::string> row{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
        const auto t = csv::parse("h1,h2,h3,h4,h5\n" + csv::join_row(row) + "\n");
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0] == row);
        CHECK(csv::number(0.1) == "0.1");
        CHECK(std::stod(csv::number(1.0 / 3.0)) == 1.0 / 3.0);
    }
}
