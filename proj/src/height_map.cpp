#include "bovigeom/height_map.hpp"

#include "bovigeom/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace bovigeom {

HeightMap raster_to_heightmap(const DepthRaster& r, const CameraConfig& cam) {
    cam.validate();
    HeightMap h;
    h.width = r.width;
    h.height = r.height;
    h.scale_mm_per_level = cam.height_max_mm / 255.0;
    h.gray.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r.valid[i]) continue;
        const double height_mm = std::max(cam.ground_distance_mm - static_cast<double>(r.depth_mm[i]), 0.0);
        const double clipped = std::min(height_mm, cam.height_max_mm);
        h.gray[i] = static_cast<std::uint8_t>(std::lround(255.0 * clipped / cam.height_max_mm));
    }
    return h;
}

PaddedHeightMap pad_center(const HeightMap& h, int target_w, int target_h, std::uint8_t fill) {
    if (target_w < h.width || target_h < h.height)
        throw ConfigError("pad_center: target " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                          " smaller than source " + std::to_string(h.width) + "x" + std::to_string(h.height));
    PaddedHeightMap out;
    out.offset_x = (target_w - h.width) / 2;
    out.offset_y = (target_h - h.height) / 2;
    out.map.width = target_w;
    out.map.height = target_h;
    out.map.scale_mm_per_level = h.scale_mm_per_level;
    out.map.gray.assign(static_cast<std::size_t>(target_w) * target_h, fill);
    for (int v = 0; v < h.height; ++v) {
        const auto* src = &h.gray[static_cast<std::size_t>(v) * h.width];
        auto* dst = &out.map.gray[static_cast<std::size_t>(v + out.offset_y) * target_w + out.offset_x];
        std::copy(src, src + h.width, dst);
    }
    return out;
}

void write_pgm(const HeightMap& h, std::ostream& out) {
    char header[96];
    std::snprintf(header, sizeof header, "P5\n# mm_per_level=%.9g\n%d %d\n255\n",
                  h.scale_mm_per_level, h.width, h.height);
    out << header;
    out.write(reinterpret_cast<const char*>(h.gray.data()), static_cast<std::streamsize>(h.gray.size()));
}

namespace {

// Next whitespace-delimited token, skipping '#' comment lines but capturing
// the mm_per_level comment when seen.
std::string next_pgm_token(std::istream& in, double* scale) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            std::string comment;
            while ((c = in.get()) != EOF && c != '\n') comment.push_back(static_cast<char>(c));
            const std::string key = " mm_per_level=";
            if (scale && comment.compare(0, key.size(), key) == 0)
                *scale = std::stod(comment.substr(key.size()));
            c = in.get();
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            c = in.get();
            continue;
        }
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

} // namespace

HeightMap read_pgm(std::istream& in) {
    HeightMap h;
    double scale = 0.0;
    if (next_pgm_token(in, nullptr) != "P5")
        throw DataError("pgm: not a binary P5 file");
    const std::string w = next_pgm_token(in, &scale);
    const std::string ht = next_pgm_token(in, &scale);
    const std::string maxval = next_pgm_token(in, &scale);
    try {
        h.width = std::stoi(w);
        h.height = std::stoi(ht);
    } catch (const std::exception&) {
        throw DataError("pgm: bad dimensions '" + w + " " + ht + "'");
    }
    if (h.width <= 0 || h.height <= 0) throw DataError("pgm: non-positive dimensions");
    if (maxval != "255") throw DataError("pgm: expected maxval 255, got '" + maxval + "'");
    h.scale_mm_per_level = scale;
    h.gray.resize(static_cast<std::size_t>(h.width) * h.height);
    in.read(reinterpret_cast<char*>(h.gray.data()), static_cast<std::streamsize>(h.gray.size()));
    if (in.gcount() != static_cast<std::streamsize>(h.gray.size()))
        throw DataError("pgm: truncated pixel data");
    return h;
}

} // namespace bovigeom
