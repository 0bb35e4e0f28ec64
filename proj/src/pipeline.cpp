#include "ldis/pipeline.hpp"

#include "ldis/csv.hpp"
#include "ldis/error.hpp"
#include "ldis/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <omp.h>
#include <set>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace ldis {

using nlohmann::json;

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? csv::number(*v) : std::string(); }
std::string flag(bool b) { return b ? "true" : "false"; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::string text = csv::join_row(header) + "\n";
    for (const auto& r : rows) text += csv::join_row(r) + "\n";
    write_text(path, text);
}

json ring_json(const Ring& ring) {
    json out = json::array();
    for (const LonLat& p : ring) out.push_back({p.lon, p.lat});
    return out;
}

json polygon_json(const Polygon& p) {
    json rings = json::array({ring_json(p.outer)});
    for (const Ring& h : p.holes) rings.push_back(ring_json(h));
    return rings;
}

std::string reported_geojson(const SiteGeometry& g) {
    if (g.point) return json{{"type", "Point"}, {"coordinates", {g.point->lon, g.point->lat}}}.dump();
    if (g.reported.size() == 1) return json{{"type", "Polygon"}, {"coordinates", polygon_json(g.reported[0])}}.dump();
    json parts = json::array();
    for (const Polygon& p : g.reported) parts.push_back(polygon_json(p));
    return json{{"type", "MultiPolygon"}, {"coordinates", parts}}.dump();
}

std::size_t site_position(const std::vector<SiteRecord>& sites, const std::string& id) {
    auto it = std::lower_bound(sites.begin(), sites.end(), id,
                               [](const SiteRecord& s, const std::string& v) { return s.site_id < v; });
    if (it == sites.end() || it->site_id != id) throw Error(fmt::format("unknown site id '{}'", id));
    return static_cast<std::size_t>(it - sites.begin());
}

// Inputs of summary.json, shared by the pipeline and the report rebuild.
struct SummaryInputs {
    std::vector<ScoredSite> scored;
    std::vector<std::string> planting_years;  // "unknown" when absent
    std::vector<std::string> date_types;
    std::vector<ZoneIndexSeries> veg;
    std::uint64_t seed = 0;
    int reps = 1000;
    double level = 0.95;
};

json build_summary(const SummaryInputs& in) {
    const CompletenessReport rep = completeness_report(in.scored);
    json s;
    s["site_count"] = rep.site_count;
    s["perfect_count"] = rep.perfect_count;
    s["perfect_fraction"] = rep.site_count ? static_cast<double>(rep.perfect_count) / rep.site_count : 0.0;
    long long point_sites = 0, point_perfect = 0;
    for (const ScoredSite& site : in.scored) {
        if (!site.point_origin) continue;
        ++point_sites;
        if (site.score.perfect) ++point_perfect;
    }
    s["point_origin_count"] = point_sites;
    s["point_origin_perfect_count"] = point_perfect;

    json completeness = json::object();
    for (std::size_t k = 0; k < kIndicatorCount; ++k) {
        completeness[to_string(kIndicators[k])] = rep.site_count ? json(rep.completeness[k]) : json(nullptr);
    }
    s["completeness"] = completeness;

    auto hist = [&](const auto& h) {
        json a = json::array();
        if (rep.site_count) {
            for (long long c : h) a.push_back(c);
        }
        return a;
    };
    s["score_histogram"] = {{"all", hist(rep.histogram)},
                            {"point_origin", hist(rep.histogram_point_origin)},
                            {"polygon", hist(rep.histogram_polygon)}};

    json bins = json::array();
    for (const SizeBinRow& row : rep.size_table) {
        bins.push_back({{"bin_km2", row.label},
                        {"count", row.count},
                        {"count_pct", row.count_pct},
                        {"total_area_km2", row.total_area_km2},
                        {"total_area_pct", row.total_pct},
                        {"nested_area_km2", row.nested_area_km2},
                        {"nested_area_pct", row.nested_pct}});
    }
    s["size_bins"] = bins;

    std::map<std::string, long long> years, types;
    for (const auto& y : in.planting_years) ++years[y];
    for (const auto& t : in.date_types) ++types[t];
    s["planting_year_counts"] = years;
    s["planting_date_type_counts"] = types;

    if (!in.veg.empty()) {
        // Corpus mean NDVI per zone and period with percentile bootstrap CIs.
        json series = json::object();
        std::uint64_t task = 0;
        for (Zone zone : {Zone::site, Zone::annulus}) {
            json rows = json::array();
            for (int period : kVegPeriods) {
                std::vector<double> values;
                for (const auto& r : in.veg) {
                    if (r.evaluable && r.zone == zone && r.period == period && r.index == VegIndex::ndvi) {
                        values.push_back(r.mean_value);
                    }
                }
                std::sort(values.begin(), values.end());
                json row{{"period", period}, {"n", values.size()}};
                row["mean"] = values.empty() ? json(nullptr) : json(stable_mean(values));
                if (values.size() >= 2) {
                    const auto [lo, hi] = bootstrap_mean_ci(values, in.level, in.reps, derive_seed(in.seed, task));
                    row["ci_lo"] = lo;
                    row["ci_hi"] = hi;
                } else {
                    row["ci_lo"] = nullptr;
                    row["ci_hi"] = nullptr;
                }
                ++task;
                rows.push_back(row);
            }
            series[to_string(zone)] = rows;
        }
        s["ndvi_series"] = {{"level", in.level}, {"reps", in.reps}, {"zones", series}};
    }
    return s;
}

GridLayer load_grid(const fs::path& p, LayerSemantics sem, const char* stage) {
    try {
        return read_ascii_grid(p, sem);
    } catch (const Error& e) {
        throw Error(fmt::format("{} stage: {}", stage, e.what()));
    }
}

MonthlyLayers load_monthly(const std::map<int, std::vector<fs::path>>& files) {
    MonthlyLayers out;
    for (const auto& [year, paths] : files) {
        auto& list = out.by_year[year];
        for (const auto& p : paths) list.push_back(load_grid(p, LayerSemantics::monthly_band, "augment"));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.scoring.validate();
    if (cfg_.workers > 0) omp_set_num_threads(cfg_.workers);
}

void Pipeline::ingest() {
    if (cfg_.catalog.empty()) throw ConfigError("ingest stage: no catalog files configured");
    spdlog::info("ingest: {} catalog file(s)", cfg_.catalog.size());
    IngestResult r = ingest_catalog(cfg_.catalog, cfg_.metadata_csv, cfg_.geometry);
    state_.warnings = std::move(r.warnings);

    state_.sites.clear();
    state_.filter_log.clear();
    for (SiteRecord& s : r.sites) {
        FilterDecision d = filter_afforestation(s.project_name, s.description, s.classification, cfg_.filter);
        if (!cfg_.filter_enabled) {
            d.reason = fmt::format("filter disabled (would {}: {})", d.keep ? "keep" : "drop", d.reason);
            d.keep = true;
        }
        state_.filter_log.push_back({s.site_id, d});
        if (d.keep) state_.sites.push_back(std::move(s));
    }
    spdlog::info("ingest: {} site(s) retained of {}", state_.sites.size(), state_.filter_log.size());

    const auto n = static_cast<std::ptrdiff_t>(state_.sites.size());
    state_.quality.assign(state_.sites.size(), {});
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const SiteRecord& s = state_.sites[static_cast<std::size_t>(i)];
        state_.quality[static_cast<std::size_t>(i)] = assess_geometry(s.geometry, s.site_id, cfg_.geometry);
    }
}

void Pipeline::relate() {
    spdlog::info("relate: indexing {} site(s)", state_.sites.size());
    const SiteIndex index = build_site_index(state_.sites);
    RelationsResult rr = classify_relations(index, state_.sites, cfg_.scoring.dup_threshold);

    state_.site_relations.assign(state_.sites.size(), SiteRelations{});
    for (const RelationRecord& rec : rr.records) {
        SiteRelations& sr = *state_.site_relations[site_position(state_.sites, rec.site_a)];
        switch (rec.relation) {
            case Relation::duplicate:
            case Relation::a_nested_in_b: sr.nested = true; break;
            case Relation::b_nested_in_a: sr.superset = true; break;
            case Relation::intersecting: sr.intersecting = true; break;
            case Relation::disjoint: break;
        }
    }
    for (const RelationWarning& w : rr.warnings) {
        state_.warnings.push_back(fmt::format("relations: site '{}': {}", w.site_id, w.message));
        if (!w.site_id.empty()) state_.site_relations[site_position(state_.sites, w.site_id)].reset();
    }
    spdlog::info("relate: {} relation record(s)", rr.records.size());
    state_.relations = std::move(rr);

    state_.admin.clear();
    if (cfg_.admin) {
        const AdminLayer layer(read_admin_layer(*cfg_.admin));
        spdlog::info("relate: matching against {} admin unit(s)", layer.units().size());
        const auto n = static_cast<std::ptrdiff_t>(state_.sites.size());
        state_.admin.assign(state_.sites.size(), std::nullopt);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const SiteRecord& s = state_.sites[static_cast<std::size_t>(i)];
            state_.admin[static_cast<std::size_t>(i)] =
                admin_area_match(s.site_id, s.polygon(), layer, cfg_.scoring.admin_threshold);
        }
    }
}

void Pipeline::augment() {
    spdlog::info("augment: loading layers");
    std::optional<GridLayer> built, landcover, treecover, lossyear, dem, slope;
    std::map<int, GridLayer> treecover_by_year;
    if (cfg_.built) built = load_grid(cfg_.built->path, LayerSemantics::class_coded, "augment");
    if (cfg_.landcover) landcover = load_grid(cfg_.landcover->path, LayerSemantics::class_coded, "augment");
    if (cfg_.treecover) {
        if (cfg_.treecover->path) treecover = load_grid(*cfg_.treecover->path, LayerSemantics::class_coded, "augment");
        for (const auto& [year, p] : cfg_.treecover->by_year) {
            treecover_by_year.emplace(year, load_grid(p, LayerSemantics::class_coded, "augment"));
        }
    }
    if (cfg_.lossyear) lossyear = load_grid(*cfg_.lossyear, LayerSemantics::loss_year, "augment");
    if (cfg_.dem) {
        dem = load_grid(*cfg_.dem, LayerSemantics::continuous, "augment");
        slope = slope_degrees(*dem);
    }
    MonthlyLayers precip, tmin, tmax;
    if (cfg_.climate) {
        precip = load_monthly(cfg_.climate->precip);
        tmin = load_monthly(cfg_.climate->tmin);
        tmax = load_monthly(cfg_.climate->tmax);
    }
    std::vector<Polyline> roads;
    if (cfg_.roads) roads = read_roads(*cfg_.roads);
    std::vector<BBox> road_boxes;
    road_boxes.reserve(roads.size());
    for (const Polyline& r : roads) {
        if (r.empty()) throw ConfigError("augment stage: road polyline without vertices");
        road_boxes.push_back(bounding_box(r));
    }
    const SpatialIndex road_index(road_boxes);

    const auto n = static_cast<std::ptrdiff_t>(state_.sites.size());
    state_.augment.assign(state_.sites.size(), {});
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const SiteRecord& s = state_.sites[static_cast<std::size_t>(i)];
        const Polygon& zone = s.polygon();
        const std::optional<int> year = s.planting_year();
        AugmentationRecord a;
        a.site_id = s.site_id;

        if (built) a.built_fraction = zonal_class_fraction(*built, zone, cfg_.built->classes);
        if (landcover) {
            const LandcoverConfig& lc = *cfg_.landcover;
            auto frac = [&](const std::set<long>& classes) -> std::optional<double> {
                if (classes.empty()) return std::nullopt;
                return zonal_class_fraction(*landcover, zone, classes);
            };
            a.water_fraction = frac(lc.water);
            a.other_landcover_fraction = frac(lc.other);
            a.stable_cropland_fraction = frac(lc.stable_cropland);
            a.cropland_from_tree_fraction = frac(lc.cropland_from_tree);
            a.cropland_to_tree_fraction = frac(lc.cropland_to_tree);
            a.short_veg_after_loss_fraction = frac(lc.short_veg_after_loss);
        }
        if (cfg_.treecover) {
            const GridLayer* layer = treecover ? &*treecover : nullptr;
            if (year) {
                if (auto it = treecover_by_year.find(*year); it != treecover_by_year.end()) layer = &it->second;
            }
            if (!treecover_by_year.empty() && !treecover && !year) layer = nullptr;
            if (layer) a.treecover_at_planting_fraction = zonal_class_fraction(*layer, zone, cfg_.treecover->classes);
        }
        if (!roads.empty()) {
            std::vector<Polyline> nearby;
            for (std::size_t k : road_index.query(bounding_box(zone))) nearby.push_back(roads[k]);
            if (nearby.empty()) {
                a.road_km_per_km2 = 0.0;
                if (cfg_.scoring.road_buffer_m > 0.0) a.road_area_fraction = 0.0;
            } else {
                a.road_km_per_km2 = road_density(nearby, zone);
                if (cfg_.scoring.road_buffer_m > 0.0) {
                    a.road_area_fraction = road_area_fraction(nearby, zone, cfg_.scoring.road_buffer_m);
                }
            }
        }
        if (lossyear && year) a.loss = tree_loss_windows(*lossyear, zone, *year);
        if (dem) a.terrain = terrain_stats(*dem, *slope, zone);
        if (cfg_.climate && year) a.climate = sample_climate_at_centroid({&precip, &tmin, &tmax}, s.geometry.centroid, *year);
        state_.augment[static_cast<std::size_t>(i)] = std::move(a);
    }
    spdlog::info("augment: {} site(s) processed", state_.augment.size());
}

void Pipeline::vegetation() {
    state_.veg.clear();
    if (!cfg_.vegetation || cfg_.vegetation->stacks.empty()) return;
    const VegetationConfig& vc = *cfg_.vegetation;
    spdlog::info("veg: loading {} band stack(s)", vc.stacks.size());

    std::vector<BandStack> stacks;
    stacks.reserve(vc.stacks.size());
    for (const StackEntry& e : vc.stacks) {
        BandStack b;
        b.tile = e.tile;
        b.year = e.year;
        b.month = e.month;
        for (const auto& [name, p] : e.bands) b.bands.emplace(name, load_grid(p, LayerSemantics::monthly_band, "veg"));
        stacks.push_back(std::move(b));
    }

    const auto n = static_cast<std::ptrdiff_t>(state_.sites.size());
    std::vector<std::vector<ZoneIndexSeries>> per_site(state_.sites.size());
    std::vector<std::vector<std::string>> warnings(state_.sites.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const SiteRecord& s = state_.sites[ui];
        const BBox box = bounding_box(s.polygon());

        std::vector<const BandStack*> mine;
        for (const BandStack& b : stacks) {
            const bool named = !b.tile.empty() && (b.tile == s.site_id || b.tile == s.parent_id);
            const bool covering = b.tile.empty() && !b.bands.empty() && b.bands.begin()->second.extent().intersects(box);
            if (named || covering) mine.push_back(&b);
        }

        Polygon annulus;
        try {
            annulus = outer_buffer_annulus(s.polygon(), vc.annulus_m);
        } catch (const Error& e) {
            warnings[ui].push_back(fmt::format("veg: site '{}': annulus not built: {}", s.site_id, e.what()));
        }

        VegetationOptions opts;
        opts.reference_year = vc.reference_year;
        opts.max_cloud_fraction = vc.max_cloud_fraction;
        if (auto it = vc.green_months.find(s.iso3); it != vc.green_months.end()) {
            opts.months_override = it->second;
        } else if (auto all = vc.green_months.find("*"); all != vc.green_months.end()) {
            opts.months_override = all->second;
        }

        if (!s.planting_year()) {
            for (Zone z : {Zone::site, Zone::annulus}) {
                for (int p : kVegPeriods) {
                    for (VegIndex idx : kVegIndices) per_site[ui].push_back({s.site_id, z, p, idx, 0.0, 0, false});
                }
            }
            warnings[ui].push_back(fmt::format("veg: site '{}' has no planting year", s.site_id));
            continue;
        }
        try {
            per_site[ui] = zone_index_series(std::span<const BandStack* const>(mine), s.site_id, *s.planting_year(),
                                             s.polygon(), annulus, opts);
        } catch (const Error& e) {
            warnings[ui].push_back(fmt::format("veg: site '{}': {}", s.site_id, e.what()));
        }
    }
    for (std::size_t i = 0; i < per_site.size(); ++i) {
        state_.veg.insert(state_.veg.end(), per_site[i].begin(), per_site[i].end());
        state_.warnings.insert(state_.warnings.end(), warnings[i].begin(), warnings[i].end());
    }
    spdlog::info("veg: {} series record(s)", state_.veg.size());
}

void Pipeline::score() {
    const bool relations_ran = !state_.site_relations.empty() || (state_.relations && state_.sites.empty());
    state_.scores.assign(state_.sites.size(), {});
    const auto n = static_cast<std::ptrdiff_t>(state_.sites.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const SiteRecord& s = state_.sites[ui];
        IndicatorInputs in;
        in.quality = state_.quality[ui];
        if (relations_ran) in.relations = state_.site_relations[ui];
        if (!state_.admin.empty()) in.admin = state_.admin[ui];
        if (!state_.augment.empty()) in.augment = state_.augment[ui];

        ScoredSite& out = state_.scores[ui];
        out.indicators = evaluate_indicators(in, cfg_.scoring);
        out.score = ldis_score(out.indicators, s.site_id);
        out.area_km2 = s.area_km2;
        out.nested = in.relations && in.relations->nested;
        out.point_origin = s.geometry.is_point_origin;
    }
}

int Pipeline::run(const StageSet& stages) {
    ingest();
    if (stages.relate || stages.score) relate();
    if (stages.augment || stages.score) augment();
    if (stages.veg) vegetation();
    if (stages.score) score();
    write_outputs(stages);
    for (const auto& w : state_.warnings) spdlog::warn("{}", w);

    if (!stages.score) return kExitOk;
    const bool partial = std::any_of(state_.scores.begin(), state_.scores.end(), [](const ScoredSite& s) {
        return s.score.evaluated < static_cast<int>(kIndicatorCount);
    });
    return partial ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// Reports

json Pipeline::summary() const {
    SummaryInputs in;
    in.scored = state_.scores;
    for (const SiteRecord& s : state_.sites) {
        in.planting_years.push_back(s.planting_year() ? std::to_string(*s.planting_year()) : "unknown");
        in.date_types.push_back(to_string(s.planting_date_type));
    }
    in.veg = state_.veg;
    in.seed = cfg_.seed;
    if (cfg_.vegetation) {
        in.reps = cfg_.vegetation->bootstrap_reps;
        in.level = cfg_.vegetation->bootstrap_level;
    }
    json s = build_summary(in);
    s["filtered_out"] = std::count_if(state_.filter_log.begin(), state_.filter_log.end(),
                                      [](const FilterLogEntry& e) { return !e.decision.keep; });
    s["warning_count"] = state_.warnings.size();
    if (state_.relations) {
        std::map<std::string, long long> counts;
        for (const auto& r : state_.relations->records) ++counts[to_string(r.relation)];
        s["relation_counts"] = counts;
    }
    return s;
}

DiDPanel did_panel_from_series(std::span<const ZoneIndexSeries> series, int horizon, VegIndex index) {
    const int pre = horizon < 0 ? horizon : 0;
    const int post = horizon < 0 ? 0 : horizon;
    // site -> [zone][pre/post]
    std::map<std::string, std::array<std::array<std::optional<double>, 2>, 2>> cells;
    for (const auto& r : series) {
        if (!r.evaluable || r.index != index || (r.period != pre && r.period != post)) continue;
        auto& c = cells[r.site_id];
        c[r.zone == Zone::site ? 1 : 0][r.period == post ? 1 : 0] = r.mean_value;
    }
    DiDPanel panel;
    for (const auto& [site, c] : cells) {
        if (!c[0][0] || !c[0][1] || !c[1][0] || !c[1][1]) continue;
        for (int g = 0; g < 2; ++g) {
            for (int t = 0; t < 2; ++t) {
                panel.push_back({site + (g ? ":site" : ":annulus"), g, t, *c[static_cast<std::size_t>(g)][static_cast<std::size_t>(t)]});
            }
        }
    }
    return panel;
}

json did_to_json(const DiDResult& r) {
    json coefs = json::array();
    for (const Coefficient& c : r.coef) {
        coefs.push_back({{"name", c.name},
                         {"estimate", c.estimate},
                         {"se", c.se},
                         {"t", c.t_value},
                         {"p", c.p_value},
                         {"stars", c.stars()}});
    }
    return {{"coefficients", coefs}, {"n_obs", r.n_obs},    {"r2", r.r2},
            {"adj_r2", r.adj_r2},    {"f_stat", r.f_stat},   {"residual_se", r.residual_se}};
}

json Pipeline::did_report() const {
    json out = json::object();
    for (int h : {-1, 1, 2, 5}) {
        const DiDPanel panel = did_panel_from_series(state_.veg, h);
        json entry;
        try {
            entry = did_to_json(did_fit(panel));
        } catch (const Error& e) {
            entry = {{"error", e.what()}, {"n_obs", panel.size()}};
        }
        entry["pre_period"] = h < 0 ? h : 0;
        entry["post_period"] = h < 0 ? 0 : h;
        out[fmt::format("{:+d}", h)] = entry;
    }
    return out;
}

void Pipeline::write_outputs(const StageSet& stages) const {
    const fs::path dir = cfg_.output_dir;
    fs::create_directories(dir);

    write_text(dir / "config.json", cfg_.raw_text.empty() ? cfg_.document.dump(2) + "\n" : cfg_.raw_text);

    // sites.csv: derived columns, then every reported property verbatim.
    std::set<std::string> keys;
    for (const SiteRecord& s : state_.sites) {
        for (const auto& [k, v] : s.reported) keys.insert(k);
    }
    std::vector<std::string> header{"site_id",
                                    "parent_id",
                                    "project_id",
                                    "host_name",
                                    "url",
                                    "iso3",
                                    "geometry_kind",
                                    "is_point_origin",
                                    "geometry_reported",
                                    "centroid_lon_derived",
                                    "centroid_lat_derived",
                                    "area_km2_derived",
                                    "area_km2_harmonised",
                                    "perimeter_km_derived",
                                    "circularity_derived",
                                    "is_valid_derived",
                                    "is_perfectly_circular_derived",
                                    "planting_date_derived",
                                    "planting_date_type",
                                    "trees_planted",
                                    "survival_rate"};
    for (const auto& k : keys) header.push_back(k + "_reported");
    std::vector<std::vector<std::string>> rows;
    rows.reserve(state_.sites.size());
    for (std::size_t i = 0; i < state_.sites.size(); ++i) {
        const SiteRecord& s = state_.sites[i];
        const GeometryQuality& q = state_.quality[i];
        std::vector<std::string> r{s.site_id,
                                   s.parent_id,
                                   s.project_id,
                                   s.host_name,
                                   s.url,
                                   s.iso3,
                                   to_string(s.geometry.kind),
                                   flag(s.geometry.is_point_origin),
                                   reported_geojson(s.geometry),
                                   csv::number(s.geometry.centroid.lon),
                                   csv::number(s.geometry.centroid.lat),
                                   csv::number(s.area_km2),
                                   opt_number(s.area_km2_reported),
                                   csv::number(q.perimeter_km),
                                   opt_number(q.circularity),
                                   flag(q.is_valid),
                                   flag(q.is_perfectly_circular),
                                   s.planting_date ? s.planting_date->iso() : "",
                                   to_string(s.planting_date_type),
                                   opt_number(s.trees_planted),
                                   opt_number(s.survival_rate)};
        for (const auto& k : keys) {
            auto it = s.reported.find(k);
            r.push_back(it == s.reported.end() ? "" : it->second);
        }
        rows.push_back(std::move(r));
    }
    write_csv(dir / "sites.csv", header, rows);

    rows.clear();
    for (const FilterLogEntry& e : state_.filter_log) {
        rows.push_back({e.site_id, flag(e.decision.keep), e.decision.rule, e.decision.reason});
    }
    write_csv(dir / "filtered.csv", {"site_id", "keep", "rule", "reason"}, rows);

    if (state_.relations && (stages.relate || stages.score)) {
        rows.clear();
        for (const RelationRecord& r : state_.relations->records) {
            rows.push_back({r.site_a, r.site_b, csv::number(r.ratio_a), csv::number(r.ratio_b), to_string(r.relation)});
        }
        write_csv(dir / "relations.csv", {"site_a", "site_b", "ratio_a", "ratio_b", "relation"}, rows);
        if (!state_.admin.empty()) {
            rows.clear();
            for (std::size_t i = 0; i < state_.sites.size(); ++i) {
                const auto& m = state_.admin[i];
                if (!m) continue;
                rows.push_back({m->site, m->admin_unit, flag(m->mutual), csv::number(m->ratio_site),
                                csv::number(m->ratio_admin)});
            }
            write_csv(dir / "admin.csv", {"site_id", "admin_unit", "mutual", "ratio_site", "ratio_admin"}, rows);
        }
    }

    if (!state_.augment.empty()) {
        std::vector<std::string> h{"site_id",
                                   "built_fraction",
                                   "water_fraction",
                                   "other_landcover_fraction",
                                   "stable_cropland_fraction",
                                   "treecover_at_planting_fraction",
                                   "cropland_from_tree_fraction",
                                   "cropland_to_tree_fraction",
                                   "short_veg_after_loss_fraction",
                                   "road_km_per_km2",
                                   "road_area_fraction",
                                   "loss_pre5",
                                   "loss_pre1",
                                   "loss_post5",
                                   "loss_pre5_partial",
                                   "loss_pre1_partial",
                                   "loss_post5_partial",
                                   "mean_elevation_m",
                                   "mean_slope_deg"};
        for (auto v : {ClimateVariable::precip, ClimateVariable::tmin, ClimateVariable::tmax}) {
            for (int off : kClimateOffsets) h.push_back(fmt::format("{}_y{}", to_string(v), off));
        }
        rows.clear();
        for (const AugmentationRecord& a : state_.augment) {
            std::vector<std::string> r{a.site_id,
                                       opt_number(a.built_fraction),
                                       opt_number(a.water_fraction),
                                       opt_number(a.other_landcover_fraction),
                                       opt_number(a.stable_cropland_fraction),
                                       opt_number(a.treecover_at_planting_fraction),
                                       opt_number(a.cropland_from_tree_fraction),
                                       opt_number(a.cropland_to_tree_fraction),
                                       opt_number(a.short_veg_after_loss_fraction),
                                       opt_number(a.road_km_per_km2),
                                       opt_number(a.road_area_fraction)};
            if (a.loss) {
                for (double v : {a.loss->pre5, a.loss->pre1, a.loss->post5}) r.push_back(csv::number(v));
                for (bool b : {a.loss->pre5_partial, a.loss->pre1_partial, a.loss->post5_partial}) r.push_back(flag(b));
            } else {
                r.insert(r.end(), 6, "");
            }
            r.push_back(a.terrain ? csv::number(a.terrain->mean_elevation_m) : "");
            r.push_back(a.terrain ? opt_number(a.terrain->mean_slope_deg) : "");
            for (const auto& var : a.climate.values) {
                for (const auto& v : var) r.push_back(opt_number(v));
            }
            rows.push_back(std::move(r));
        }
        write_csv(dir / "augment.csv", h, rows);
    }

    if (!state_.veg.empty()) {
        rows.clear();
        for (const ZoneIndexSeries& v : state_.veg) {
            rows.push_back({v.site_id, to_string(v.zone), std::to_string(v.period), to_string(v.index),
                            v.evaluable ? csv::number(v.mean_value) : "", std::to_string(v.pixel_count),
                            flag(v.evaluable)});
        }
        write_csv(dir / "veg_series.csv", {"site_id", "zone", "period", "index", "mean", "pixel_count", "evaluable"},
                  rows);
    }

    if (stages.score) {
        std::vector<std::string> h{"site_id"};
        for (Indicator ind : kIndicators) h.push_back(to_string(ind));
        h.insert(h.end(), {"passed", "evaluated", "perfect", "contains_small_polygon"});
        rows.clear();
        for (std::size_t i = 0; i < state_.scores.size(); ++i) {
            const ScoredSite& s = state_.scores[i];
            std::vector<std::string> r{s.score.site_id};
            for (IndicatorState st : s.indicators.states) r.push_back(to_string(st));
            const auto& rel = state_.site_relations.empty() ? std::nullopt : state_.site_relations[i];
            r.insert(r.end(), {std::to_string(s.score.passed), std::to_string(s.score.evaluated), flag(s.score.perfect),
                               rel ? flag(rel->superset) : ""});
            rows.push_back(std::move(r));
        }
        write_csv(dir / "ldis_scores.csv", h, rows);
    }

    if (stages.report && stages.score) {
        write_text(dir / "summary.json", summary().dump(2) + "\n");
        if (!state_.veg.empty()) write_text(dir / "did.json", did_report().dump(2) + "\n");
    }
}

// ---------------------------------------------------------------------------

std::vector<ZoneIndexSeries> read_veg_series(const fs::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_site = t.column("site_id"), c_zone = t.column("zone"), c_period = t.column("period"),
                      c_index = t.column("index"), c_mean = t.column("mean"), c_count = t.column("pixel_count"),
                      c_eval = t.column("evaluable");
    std::vector<ZoneIndexSeries> out;
    for (const auto& row : t.rows) {
        ZoneIndexSeries r;
        r.site_id = row[c_site];
        if (row[c_zone] == "site") {
            r.zone = Zone::site;
        } else if (row[c_zone] == "annulus") {
            r.zone = Zone::annulus;
        } else {
            throw IngestError(fmt::format("veg series: unknown zone '{}'", row[c_zone]));
        }
        r.period = std::stoi(row[c_period]);
        bool found = false;
        for (VegIndex idx : kVegIndices) {
            if (row[c_index] == to_string(idx)) {
                r.index = idx;
                found = true;
            }
        }
        if (!found) throw IngestError(fmt::format("veg series: unknown index '{}'", row[c_index]));
        r.evaluable = row[c_eval] == "true";
        if (r.evaluable) r.mean_value = std::stod(row[c_mean]);
        r.pixel_count = row[c_count].empty() ? 0 : std::stoll(row[c_count]);
        out.push_back(std::move(r));
    }
    return out;
}

json summary_from_outputs(const fs::path& out_dir, std::uint64_t seed, int bootstrap_reps, double bootstrap_level) {
    const csv::Table sites = csv::read(out_dir / "sites.csv");
    const csv::Table scores = csv::read(out_dir / "ldis_scores.csv");
    std::map<std::string, std::size_t> site_row;
    const std::size_t c_id = sites.column("site_id");
    for (std::size_t i = 0; i < sites.rows.size(); ++i) site_row[sites.rows[i][c_id]] = i;

    SummaryInputs in;
    in.seed = seed;
    in.reps = bootstrap_reps;
    in.level = bootstrap_level;
    const std::size_t c_area = sites.column("area_km2_derived"), c_point = sites.column("is_point_origin"),
                      c_date = sites.column("planting_date_derived"), c_type = sites.column("planting_date_type");
    const std::size_t s_id = scores.column("site_id");
    std::array<std::size_t, kIndicatorCount> c_ind{};
    for (std::size_t k = 0; k < kIndicatorCount; ++k) c_ind[k] = scores.column(to_string(kIndicators[k]));

    for (const auto& row : scores.rows) {
        auto it = site_row.find(row[s_id]);
        if (it == site_row.end()) throw IngestError(fmt::format("report: site '{}' missing from sites.csv", row[s_id]));
        const auto& srow = sites.rows[it->second];
        ScoredSite s;
        for (std::size_t k = 0; k < kIndicatorCount; ++k) {
            const std::string& v = row[c_ind[k]];
            s.indicators.states[k] = v == "pass"   ? IndicatorState::pass
                                     : v == "fail" ? IndicatorState::fail
                                                   : IndicatorState::not_evaluable;
        }
        s.score = ldis_score(s.indicators, row[s_id]);
        s.area_km2 = std::stod(srow[c_area]);
        s.point_origin = srow[c_point] == "true";
        s.nested = s.indicators[Indicator::nesting_polygon] == IndicatorState::fail;
        in.scored.push_back(std::move(s));
        const std::string& date = srow[c_date];
        in.planting_years.push_back(date.size() >= 4 ? date.substr(0, 4) : "unknown");
        in.date_types.push_back(srow[c_type]);
    }
    if (fs::exists(out_dir / "veg_series.csv")) in.veg = read_veg_series(out_dir / "veg_series.csv");
    return build_summary(in);
}

void init_logging() {
    if (!spdlog::get("ldis")) spdlog::set_default_logger(spdlog::stderr_color_mt("ldis"));
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("LDIS_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept "off" when asked for.
        if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
    }
}

}  // namespace ldis
