#pragma once

// Single-band north-up grids in WGS84 and the pixel-centre zone scanner.

#include "ldis/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ldis {

enum class LayerSemantics { class_coded, continuous, loss_year, monthly_band };

struct GridLayer {
    double origin_lon = 0.0;  // upper-left corner
    double origin_lat = 0.0;
    double pixel_dx = 1.0;  // degrees, > 0
    double pixel_dy = 1.0;  // degrees, > 0, rows run southwards
    int width = 0;
    int height = 0;
    double nodata = -9999.0;
    std::vector<double> values;  // row-major
    LayerSemantics semantics = LayerSemantics::continuous;

    double at(int row, int col) const noexcept {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    double& at(int row, int col) noexcept {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    bool is_nodata(double v) const noexcept { return v == nodata || v != v; }

    double center_lon(int col) const noexcept { return origin_lon + (col + 0.5) * pixel_dx; }
    double center_lat(int row) const noexcept { return origin_lat - (row + 0.5) * pixel_dy; }
    BBox extent() const noexcept {
        return {origin_lon, origin_lat - height * pixel_dy, origin_lon + width * pixel_dx, origin_lat};
    }
    bool same_grid(const GridLayer& o) const noexcept {
        return width == o.width && height == o.height && origin_lon == o.origin_lon &&
               origin_lat == o.origin_lat && pixel_dx == o.pixel_dx && pixel_dy == o.pixel_dy;
    }

    /// Throws Error when the shape is inconsistent.
    void check() const;
};

GridLayer make_grid(double origin_lon, double origin_lat, double dx, double dy, int width,
                    int height, double fill = 0.0, LayerSemantics semantics = LayerSemantics::continuous);

/// ESRI ASCII grid (AAIGrid). Header keys: ncols, nrows, xllcorner|xllcenter,
/// yllcorner|yllcenter, cellsize or dx/dy, NODATA_value (optional).
GridLayer read_ascii_grid(const std::filesystem::path& path,
                          LayerSemantics semantics = LayerSemantics::continuous);
void write_ascii_grid(const std::filesystem::path& path, const GridLayer& layer);

/// Row/column window of pixels whose centres may fall in `box`; empty when
/// the box misses the layer.
struct PixelWindow {
    int row0 = 0, row1 = 0;  // [row0, row1)
    int col0 = 0, col1 = 0;  // [col0, col1)
    bool empty() const noexcept { return row0 >= row1 || col0 >= col1; }
};

PixelWindow window_for(const GridLayer& layer, const BBox& box) noexcept;

/// Pixel-centre membership for a zone under the even-odd rule over all rings.
/// A centre (px, py) is inside when an odd number of ring edges satisfy
/// (y1 > py) != (y2 > py) and x1 + (py - y1) * (x2 - x1) / (y2 - y1) > px.
class ZoneScanner {
public:
    explicit ZoneScanner(const Polygon& zone);

    /// Calls f(row, col) for every pixel whose centre is in the zone, in
    /// row-major order.
    template <class F>
    void for_each(const GridLayer& layer, F&& f) const {
        const PixelWindow w = window_for(layer, box_);
        std::vector<double> xs;
        for (int r = w.row0; r < w.row1; ++r) {
            crossings(layer.center_lat(r), xs);
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                int c = first_col_at_or_after(layer, xs[k], w.col0);
                for (; c < w.col1 && layer.center_lon(c) < xs[k + 1]; ++c) f(r, c);
            }
        }
    }

    const BBox& box() const noexcept { return box_; }

private:
    struct Edge {
        double x1, y1, x2, y2;
    };

    void crossings(double py, std::vector<double>& xs) const;
    static int first_col_at_or_after(const GridLayer& layer, double x, int col0) noexcept;

    std::vector<Edge> edges_;
    BBox box_;
};

}  // namespace ldis
