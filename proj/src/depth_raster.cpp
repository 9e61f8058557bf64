#include "bovigeom/depth_raster.hpp"

#include "bovigeom/error.hpp"

#include <cmath>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace bovigeom {

void CameraConfig::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw ConfigError("camera: fx and fy must be > 0");
    if (!(ground_distance_mm > 0.0))
        throw ConfigError("camera: ground_distance_mm must be > 0");
    if (!(height_max_mm > 0.0))
        throw ConfigError("camera: height_max_mm must be > 0");
    if (!std::isfinite(cx) || !std::isfinite(cy))
        throw ConfigError("camera: cx and cy must be finite");
}

namespace {

// Trims ASCII whitespace; depth CSVs in the wild carry stray spaces and \r.
std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

DepthRaster parse_depth_raster(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && trimmed(lines.back()).empty()) lines.pop_back();

    DepthRaster r;
    int row = 0;
    for (const std::string& raw : lines) {
        std::string_view rest = raw;
        int col = 0;
        while (true) {
            const std::size_t comma = rest.find(',');
            const std::string_view cell = trimmed(rest.substr(0, comma));
            float depth = 0.0f;
            bool cell_valid = false;
            if (!cell.empty()) {
                double value = 0.0;
                const auto* end = cell.data() + cell.size();
                const auto res = std::from_chars(cell.data(), end, value);
                if (res.ec != std::errc{} || res.ptr != end)
                    throw DataError("depth csv: non-numeric cell at row " + std::to_string(row) +
                                    ", col " + std::to_string(col) + ": '" + std::string(cell) + "'");
                if (std::isfinite(value) && value > 0.0) {
                    depth = static_cast<float>(value);
                    cell_valid = true;
                }
            }
            r.depth_mm.push_back(depth);
            r.valid.push_back(cell_valid ? 1 : 0);
            ++col;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row == 0) {
            r.width = col;
        } else if (col != r.width) {
            throw DataError("depth csv: ragged row " + std::to_string(row) + " has " +
                            std::to_string(col) + " cells, expected " + std::to_string(r.width));
        }
        ++row;
    }
    r.height = row;
    if (r.width == 0 || r.height == 0)
        throw DataError("depth csv: empty input");
    return r;
}

DepthRaster parse_depth_raster(const std::string& text) {
    std::istringstream in(text);
    return parse_depth_raster(in);
}

void write_depth_csv(const DepthRaster& r, std::ostream& out) {
    char buf[32];
    for (int v = 0; v < r.height; ++v) {
        for (int u = 0; u < r.width; ++u) {
            if (u) out.put(',');
            if (r.is_valid(u, v)) {
                std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(r.at(u, v)));
                out << buf;
            }
        }
        out.put('\n');
    }
}

bool HeightField::sample(double u, double v, double& out) const {
    const int u0 = static_cast<int>(std::floor(u));
    const int v0 = static_cast<int>(std::floor(v));
    const double du = u - u0;
    const double dv = v - v0;

    double weight_sum = 0.0;
    double value_sum = 0.0;
    const int us[2] = {u0, u0 + 1};
    const int vs[2] = {v0, v0 + 1};
    const double wu[2] = {1.0 - du, du};
    const double wv[2] = {1.0 - dv, dv};
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const double w = wu[i] * wv[j];
            if (w == 0.0) continue;
            if (!cell_valid(us[i], vs[j])) continue;
            weight_sum += w;
            value_sum += w * cell_height(us[i], vs[j]);
        }
    }
    if (weight_sum <= 0.0) return false;
    out = value_sum / weight_sum;
    return true;
}

} // namespace bovigeom
