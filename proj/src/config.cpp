#include "ldis/config.hpp"

#include "ldis/error.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace ldis {

using nlohmann::json;

namespace {

class Reader {
public:
    Reader(const fs::path& base, bool check) : base_(base), check_(check) {}

    fs::path path(const json& v, const std::string& key) const {
        if (!v.is_string()) throw ConfigError(fmt::format("'{}' must be a path string", key));
        fs::path p = v.get<std::string>();
        if (p.is_relative()) p = base_ / p;
        p = p.lexically_normal();
        if (check_ && !fs::exists(p)) throw ConfigError(fmt::format("'{}': path '{}' does not exist", key, p.string()));
        return p;
    }

    std::optional<fs::path> optional_path(const json& obj, const std::string& key, const std::string& where) const {
        if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
        return path(obj[key], where + key);
    }

private:
    fs::path base_;
    bool check_;
};

template <class T>
T get(const json& obj, const std::string& key, T fallback, const std::string& where) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    try {
        return obj[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("'{}{}' has the wrong type", where, key));
    }
}

std::set<long> classes(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || obj[key].is_null()) return {};
    const json& v = obj[key];
    std::set<long> out;
    if (v.is_number_integer()) {
        out.insert(v.get<long>());
        return out;
    }
    if (!v.is_array()) throw ConfigError(fmt::format("'{}{}' must be a list of class codes", where, key));
    for (const auto& c : v) {
        if (!c.is_number_integer()) throw ConfigError(fmt::format("'{}{}' must hold integers", where, key));
        out.insert(c.get<long>());
    }
    return out;
}

std::map<int, std::vector<fs::path>> monthly(const json& v, const Reader& r, const std::string& where) {
    std::map<int, std::vector<fs::path>> out;
    if (!v.is_object()) throw ConfigError(fmt::format("'{}' must map years to 12 paths", where));
    for (const auto& [year, files] : v.items()) {
        int y = 0;
        try {
            y = std::stoi(year);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("'{}': '{}' is not a year", where, year));
        }
        if (!files.is_array() || files.size() != 12) {
            throw ConfigError(fmt::format("'{}.{}' must list 12 monthly grids", where, year));
        }
        auto& list = out[y];
        for (const auto& f : files) list.push_back(r.path(f, fmt::format("{}.{}", where, year)));
    }
    return out;
}

std::array<int, 3> months(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(fmt::format("'{}' must list three months", where));
    std::array<int, 3> m{};
    for (std::size_t i = 0; i < 3; ++i) {
        m[i] = v[i].get<int>();
        if (m[i] < 1 || m[i] > 12) throw ConfigError(fmt::format("'{}': month {} out of range", where, m[i]));
    }
    std::sort(m.begin(), m.end());
    return m;
}

}  // namespace

RunConfig parse_config(const json& doc, const fs::path& base_dir, bool check_paths) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    const Reader r(base_dir, check_paths);
    RunConfig cfg;
    cfg.document = doc;

    if (doc.contains("catalog")) {
        const json& c = doc["catalog"];
        if (c.is_string()) {
            cfg.catalog.push_back(r.path(c, "catalog"));
        } else if (c.is_array()) {
            for (const auto& p : c) cfg.catalog.push_back(r.path(p, "catalog"));
        } else {
            throw ConfigError("'catalog' must be a path or a list of paths");
        }
    }
    cfg.metadata_csv = r.optional_path(doc, "metadata_csv", "");
    if (doc.contains("output_dir")) {
        fs::path out = get<std::string>(doc, "output_dir", "", "");
        cfg.output_dir = out.is_relative() ? (base_dir / out).lexically_normal() : out;
    }
    cfg.seed = get<std::uint64_t>(doc, "seed", 0, "");
    cfg.workers = get<int>(doc, "workers", 0, "");
    if (cfg.workers < 0) throw ConfigError("'workers' must be >= 0");

    if (doc.contains("filter")) {
        const json& f = doc["filter"];
        cfg.filter_enabled = get<bool>(f, "enabled", false, "filter.");
        if (f.contains("classifications")) {
            cfg.filter.classifications = f["classifications"].get<std::set<std::string>>();
        }
        if (f.contains("keywords")) cfg.filter.keywords = f["keywords"].get<std::vector<std::string>>();
    }

    if (doc.contains("scoring")) {
        const json& s = doc["scoring"];
        ScoringConfig& sc = cfg.scoring;
        sc.infra_threshold = get(s, "infra_threshold", sc.infra_threshold, "scoring.");
        sc.landcover_threshold = get(s, "landcover_threshold", sc.landcover_threshold, "scoring.");
        sc.forest_at_planting_threshold =
            get(s, "forest_at_planting_threshold", sc.forest_at_planting_threshold, "scoring.");
        sc.stable_cropland_threshold = get(s, "stable_cropland_threshold", sc.stable_cropland_threshold, "scoring.");
        sc.circle_threshold = get(s, "circle_threshold", sc.circle_threshold, "scoring.");
        sc.admin_threshold = get(s, "admin_threshold", sc.admin_threshold, "scoring.");
        sc.dup_threshold = get(s, "dup_threshold", sc.dup_threshold, "scoring.");
        sc.road_buffer_m = get(s, "road_buffer_m", sc.road_buffer_m, "scoring.");
        if (sc.road_buffer_m < 0) throw ConfigError("'scoring.road_buffer_m' must be >= 0");
    }
    cfg.scoring.validate();

    if (doc.contains("geometry")) {
        const json& g = doc["geometry"];
        GeometryOptions& go = cfg.geometry;
        go.point_buffer_m = get(g, "point_buffer_m", go.point_buffer_m, "geometry.");
        go.point_buffer_segments = get(g, "point_buffer_segments", go.point_buffer_segments, "geometry.");
        go.circle_threshold = get(g, "circle_threshold", go.circle_threshold, "geometry.");
        if (go.point_buffer_m <= 0 || go.point_buffer_segments < 3) {
            throw ConfigError("'geometry' point buffer needs a positive radius and at least 3 segments");
        }
    }

    if (doc.contains("layers")) {
        const json& l = doc["layers"];
        cfg.admin = r.optional_path(l, "admin", "layers.");
        cfg.roads = r.optional_path(l, "roads", "layers.");
        cfg.lossyear = r.optional_path(l, "lossyear", "layers.");
        cfg.dem = r.optional_path(l, "dem", "layers.");
        if (l.contains("built")) {
            const json& b = l["built"];
            cfg.built = ClassLayerConfig{r.path(b.at("path"), "layers.built.path"), classes(b, "classes", "layers.built.")};
            if (cfg.built->classes.empty()) throw ConfigError("'layers.built.classes' is required");
        }
        if (l.contains("landcover")) {
            const json& lc = l["landcover"];
            LandcoverConfig c;
            c.path = r.path(lc.at("path"), "layers.landcover.path");
            const json cls = lc.value("classes", json::object());
            const std::string w = "layers.landcover.classes.";
            c.water = classes(cls, "water", w);
            c.other = classes(cls, "other", w);
            c.stable_cropland = classes(cls, "stable_cropland", w);
            c.cropland_from_tree = classes(cls, "cropland_from_tree", w);
            c.cropland_to_tree = classes(cls, "cropland_to_tree", w);
            c.short_veg_after_loss = classes(cls, "short_veg_after_loss", w);
            cfg.landcover = std::move(c);
        }
        if (l.contains("treecover")) {
            const json& t = l["treecover"];
            TreecoverConfig c;
            c.path = r.optional_path(t, "path", "layers.treecover.");
            if (t.contains("by_year")) {
                for (const auto& [year, p] : t["by_year"].items()) {
                    c.by_year[std::stoi(year)] = r.path(p, "layers.treecover.by_year." + year);
                }
            }
            c.classes = classes(t, "classes", "layers.treecover.");
            if (!c.path && c.by_year.empty()) throw ConfigError("'layers.treecover' needs 'path' or 'by_year'");
            if (c.classes.empty()) throw ConfigError("'layers.treecover.classes' is required");
            cfg.treecover = std::move(c);
        }
        if (l.contains("climate")) {
            const json& c = l["climate"];
            ClimateConfig cc;
            if (c.contains("precip")) cc.precip = monthly(c["precip"], r, "layers.climate.precip");
            if (c.contains("tmin")) cc.tmin = monthly(c["tmin"], r, "layers.climate.tmin");
            if (c.contains("tmax")) cc.tmax = monthly(c["tmax"], r, "layers.climate.tmax");
            cfg.climate = std::move(cc);
        }
    }

    if (doc.contains("vegetation")) {
        const json& v = doc["vegetation"];
        VegetationConfig vc;
        vc.reference_year = get(v, "reference_year", vc.reference_year, "vegetation.");
        vc.annulus_m = get(v, "annulus_m", vc.annulus_m, "vegetation.");
        vc.max_cloud_fraction = get(v, "max_cloud_fraction", vc.max_cloud_fraction, "vegetation.");
        vc.bootstrap_reps = get(v, "bootstrap_reps", vc.bootstrap_reps, "vegetation.");
        vc.bootstrap_level = get(v, "bootstrap_level", vc.bootstrap_level, "vegetation.");
        if (vc.annulus_m < 0) throw ConfigError("'vegetation.annulus_m' must be >= 0");
        if (v.contains("green_months")) {
            for (const auto& [key, m] : v["green_months"].items()) {
                vc.green_months[key] = months(m, "vegetation.green_months." + key);
            }
        }
        const json stacks = v.value("stacks", json::array());
        for (std::size_t i = 0; i < stacks.size(); ++i) {
            const json& s = stacks[i];
            const std::string where = fmt::format("vegetation.stacks[{}].", i);
            StackEntry e;
            e.tile = get<std::string>(s, "tile", "", where);
            e.year = get<int>(s, "year", 0, where);
            e.month = get<int>(s, "month", 0, where);
            if (e.month < 1 || e.month > 12) throw ConfigError(fmt::format("'{}month' out of range", where));
            for (const auto& [band, p] : s.at("bands").items()) e.bands[band] = r.path(p, where + "bands." + band);
            vc.stacks.push_back(std::move(e));
        }
        cfg.vegetation = std::move(vc);
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    RunConfig cfg;
    try {
        cfg = parse_config(doc, fs::absolute(path).parent_path());
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    cfg.source = path;
    cfg.raw_text = ss.str();
    return cfg;
}

}  // namespace ldis
