#include "ldis/grid.hpp"

#include "ldis/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

namespace ldis {

void GridLayer::check() const {
    if (!(pixel_dx > 0.0) || !(pixel_dy > 0.0)) throw Error("grid pixel size must be positive");
    if (width < 0 || height < 0) throw Error("grid dimensions must be non-negative");
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(fmt::format("grid has {} values for {}x{} cells", values.size(), width, height));
    }
}

GridLayer make_grid(double origin_lon, double origin_lat, double dx, double dy, int width,
                    int height, double fill, LayerSemantics semantics) {
    GridLayer g;
    g.origin_lon = origin_lon;
    g.origin_lat = origin_lat;
    g.pixel_dx = dx;
    g.pixel_dy = dy;
    g.width = width;
    g.height = height;
    g.values.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    g.semantics = semantics;
    g.check();
    return g;
}

GridLayer read_ascii_grid(const std::filesystem::path& path, LayerSemantics semantics) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open grid '{}'", path.string()));

    std::map<std::string, double> header;
    std::string line;
    std::streampos data_start = in.tellg();
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) {
            data_start = in.tellg();
            continue;
        }
        if (!std::isalpha(static_cast<unsigned char>(key[0]))) break;
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        double v = 0.0;
        if (!(ls >> v)) throw ConfigError(fmt::format("grid '{}': bad header line '{}'", path.string(), line));
        header[key] = v;
        data_start = in.tellg();
    }
    auto need = [&](const char* key) {
        auto it = header.find(key);
        if (it == header.end()) throw ConfigError(fmt::format("grid '{}': missing '{}'", path.string(), key));
        return it->second;
    };

    GridLayer g;
    g.semantics = semantics;
    g.width = static_cast<int>(need("ncols"));
    g.height = static_cast<int>(need("nrows"));
    if (header.count("cellsize")) {
        g.pixel_dx = g.pixel_dy = header["cellsize"];
    } else {
        g.pixel_dx = need("dx");
        g.pixel_dy = need("dy");
    }
    double xll = 0.0, yll = 0.0;
    if (header.count("xllcenter")) {
        xll = header["xllcenter"] - 0.5 * g.pixel_dx;
    } else {
        xll = need("xllcorner");
    }
    if (header.count("yllcenter")) {
        yll = header["yllcenter"] - 0.5 * g.pixel_dy;
    } else {
        yll = need("yllcorner");
    }
    g.origin_lon = xll;
    g.origin_lat = yll + g.height * g.pixel_dy;
    if (header.count("nodata_value")) g.nodata = header["nodata_value"];

    in.clear();
    in.seekg(data_start);
    const std::size_t n = static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height);
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(in >> g.values[i])) {
            throw ConfigError(fmt::format("grid '{}': expected {} values, read {}", path.string(), n, i));
        }
    }
    g.check();
    return g;
}

void write_ascii_grid(const std::filesystem::path& path, const GridLayer& layer) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write grid '{}'", path.string()));
    out << fmt::format("ncols {}\nnrows {}\nxllcorner {:.17g}\nyllcorner {:.17g}\n", layer.width,
                       layer.height, layer.origin_lon, layer.origin_lat - layer.height * layer.pixel_dy);
    if (layer.pixel_dx == layer.pixel_dy) {
        out << fmt::format("cellsize {:.17g}\n", layer.pixel_dx);
    } else {
        out << fmt::format("dx {:.17g}\ndy {:.17g}\n", layer.pixel_dx, layer.pixel_dy);
    }
    out << fmt::format("NODATA_value {:.17g}\n", layer.nodata);
    for (int r = 0; r < layer.height; ++r) {
        for (int c = 0; c < layer.width; ++c) {
            out << (c ? " " : "") << fmt::format("{:.17g}", layer.at(r, c));
        }
        out << '\n';
    }
}

PixelWindow window_for(const GridLayer& layer, const BBox& box) noexcept {
    PixelWindow w;
    const auto clamp = [](double v, int lo, int hi) {
        if (!(v > lo)) return lo;
        if (!(v < hi)) return hi;
        return static_cast<int>(v);
    };
    // One pixel of slack each side; membership itself is decided exactly.
    w.row0 = clamp(std::floor((layer.origin_lat - box.max_lat) / layer.pixel_dy - 0.5) - 1, 0, layer.height);
    w.row1 = clamp(std::ceil((layer.origin_lat - box.min_lat) / layer.pixel_dy - 0.5) + 2, 0, layer.height);
    w.col0 = clamp(std::floor((box.min_lon - layer.origin_lon) / layer.pixel_dx - 0.5) - 1, 0, layer.width);
    w.col1 = clamp(std::ceil((box.max_lon - layer.origin_lon) / layer.pixel_dx - 0.5) + 2, 0, layer.width);
    return w;
}

ZoneScanner::ZoneScanner(const Polygon& zone) : box_(bounding_box(zone)) {
    auto add_ring = [this](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            edges_.push_back({ring[i].lon, ring[i].lat, ring[i + 1].lon, ring[i + 1].lat});
        }
    };
    add_ring(zone.outer);
    for (const auto& h : zone.holes) add_ring(h);
}

void ZoneScanner::crossings(double py, std::vector<double>& xs) const {
    xs.clear();
    for (const Edge& e : edges_) {
        if ((e.y1 > py) != (e.y2 > py)) {
            xs.push_back(e.x1 + (py - e.y1) * (e.x2 - e.x1) / (e.y2 - e.y1));
        }
    }
    std::sort(xs.begin(), xs.end());
}

int ZoneScanner::first_col_at_or_after(const GridLayer& layer, double x, int col0) noexcept {
    const double est = std::ceil((x - layer.origin_lon) / layer.pixel_dx - 0.5);
    int c = est < col0 ? col0 : (est > layer.width ? layer.width : static_cast<int>(est));
    while (c > col0 && layer.center_lon(c - 1) >= x) --c;
    while (c < layer.width && layer.center_lon(c) < x) ++c;
    return c;
}

}  // namespace ldis
