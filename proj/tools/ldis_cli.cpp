// Command-line front end for the LDIS pipeline and the validation statistics.

#include "ldis/csv.hpp"
#include "ldis/error.hpp"
#include "ldis/pipeline.hpp"
#include "ldis/stats.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <spdlog/spdlog.h>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
    std::string config;
    std::string out;
    int workers = 0;
    std::optional<std::uint64_t> seed;
};

ldis::RunConfig load(const Globals& g) {
    if (g.config.empty()) throw ldis::ConfigError("--config is required for this command");
    ldis::RunConfig cfg = ldis::load_config(g.config);
    if (!g.out.empty()) cfg.output_dir = g.out;
    if (g.workers > 0) cfg.workers = g.workers;
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

void emit(const json& doc, const Globals& g, const std::string& name) {
    const std::string text = doc.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / name, std::ios::binary) << text;
}

int run_stages(const Globals& g, const ldis::StageSet& stages) {
    ldis::Pipeline p(load(g));
    const int code = p.run(stages);
    spdlog::info("outputs in {}", p.config().output_dir.string());
    return code;
}

ldis::DiDPanel read_panel(const std::string& path) {
    const auto t = ldis::csv::read(path);
    const auto cu = t.column("unit_id"), cg = t.column("g"), ct = t.column("t"), cy = t.column("y");
    ldis::DiDPanel panel;
    for (const auto& r : t.rows) panel.push_back({r[cu], std::stoi(r[cg]), std::stoi(r[ct]), std::stod(r[cy])});
    return panel;
}

std::optional<ldis::VegIndex> index_from(const std::string& name) {
    for (auto idx : ldis::kVegIndices) {
        if (name == ldis::to_string(idx)) return idx;
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    ldis::init_logging();
    CLI::App app{"Location data integrity scoring for planting-site catalogs"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--out", g.out, "Output directory (overrides the config)");
    app.add_option("--workers", g.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", g.seed, "Random seed (overrides the config)");

    std::function<int()> action;

    auto* ingest = app.add_subcommand("ingest", "Harmonise and filter the catalog; write sites.csv");
    ingest->callback([&] { action = [&] { return run_stages(g, {}); }; });

    auto* relate = app.add_subcommand("relate", "Duplicate, nesting, intersection and admin-area checks");
    relate->callback([&] { action = [&] { return run_stages(g, {.relate = true}); }; });

    auto* augment = app.add_subcommand("augment", "Raster and road overlays per site");
    augment->callback([&] { action = [&] { return run_stages(g, {.augment = true}); }; });

    auto* veg = app.add_subcommand("veg", "Site and annulus vegetation-index series");
    veg->callback([&] { action = [&] { return run_stages(g, {.veg = true}); }; });

    auto* score = app.add_subcommand("score", "Evaluate the ten indicators; write ldis_scores.csv");
    score->callback([&] { action = [&] { return run_stages(g, {.relate = true, .augment = true, .score = true}); }; });

    auto* run = app.add_subcommand("run", "Full pipeline with reports");
    run->callback([&] { action = [&] { return run_stages(g, ldis::StageSet::all()); }; });

    int reps = 1000;
    double level = 0.95;
    auto* report = app.add_subcommand("report", "Rebuild summary.json from an output directory");
    report->add_option("--reps", reps, "Bootstrap replicates")->check(CLI::PositiveNumber);
    report->add_option("--level", level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    report->callback([&] {
        action = [&] {
            fs::path dir = g.out;
            if (dir.empty() && !g.config.empty()) dir = load(g).output_dir;
            if (dir.empty()) throw ldis::ConfigError("report needs --out or --config");
            const json s = ldis::summary_from_outputs(dir, g.seed.value_or(0), reps, level);
            std::ofstream(dir / "summary.json", std::ios::binary) << s.dump(2) << "\n";
            return ldis::kExitOk;
        };
    });

    std::string panel_csv, veg_csv, index_name = "ndvi";
    int horizon = 1;
    auto* did = app.add_subcommand("did", "Difference-in-differences fit");
    auto* panel_opt = did->add_option("--panel", panel_csv, "Panel CSV with unit_id,g,t,y");
    auto* veg_opt = did->add_option("--veg", veg_csv, "veg_series.csv from a pipeline run")->excludes(panel_opt);
    did->add_option("--horizon", horizon, "Years after planting (-1: one year before)")->needs(veg_opt);
    did->add_option("--index", index_name, "ndvi, ndre or savi")->needs(veg_opt);
    did->callback([&] {
        action = [&] {
            ldis::DiDPanel panel;
            if (!panel_csv.empty()) {
                panel = read_panel(panel_csv);
            } else if (!veg_csv.empty()) {
                const auto idx = index_from(index_name);
                if (!idx) throw ldis::ConfigError(fmt::format("unknown index '{}'", index_name));
                panel = ldis::did_panel_from_series(ldis::read_veg_series(veg_csv), horizon, *idx);
            } else {
                throw ldis::ConfigError("did needs --panel or --veg");
            }
            emit(ldis::did_to_json(ldis::did_fit(panel)), g, "did.json");
            return ldis::kExitOk;
        };
    });

    std::string controls_csv, site_csv;
    int buckets = 10;
    auto* synth = app.add_subcommand("synth", "Synthetic-control series");
    synth->add_option("--controls", controls_csv, "CSV: at_planting followed by one column per period")->required();
    synth->add_option("--site-ndvi", site_csv, "CSV with an ndvi column (site values at planting)")->required();
    synth->add_option("--buckets", buckets, "Equal-width NDVI buckets")->check(CLI::PositiveNumber);
    synth->callback([&] {
        action = [&] {
            const auto ct = ldis::csv::read(controls_csv);
            const std::size_t c0 = ct.column("at_planting");
            std::vector<ldis::ControlPoint> controls;
            for (const auto& r : ct.rows) {
                ldis::ControlPoint p;
                p.at_planting = std::stod(r[c0]);
                for (std::size_t c = c0 + 1; c < r.size(); ++c) p.series.push_back(std::stod(r[c]));
                controls.push_back(std::move(p));
            }
            const auto st = ldis::csv::read(site_csv);
            const std::size_t cn = st.column("ndvi");
            std::vector<double> site;
            for (const auto& r : st.rows) site.push_back(std::stod(r[cn]));

            const auto sc = ldis::synthetic_control_series(controls, site, buckets);
            json periods = json::array();
            for (std::size_t c = c0 + 1; c < ct.header.size(); ++c) periods.push_back(ct.header[c]);
            json series = json::array();
            for (const auto& v : sc.series) series.push_back(v ? json(*v) : json(nullptr));
            emit({{"periods", periods},
                  {"series", series},
                  {"bin_weights", sc.bin_weights},
                  {"controls_per_bin", sc.controls_per_bin},
                  {"controls_outside_range", sc.controls_outside_range},
                  {"warnings", sc.warnings}},
                 g, "synthetic_control.json");
            for (const auto& w : sc.warnings) spdlog::warn("{}", w);
            return ldis::kExitOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        return action();
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        std::cerr << "ldis: " << e.what() << "\n";
        return ldis::kExitFatal;
    }
}
