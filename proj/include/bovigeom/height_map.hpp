#pragma once

#include "bovigeom/depth_raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace bovigeom {

/// 8-bit height-above-ground image. gray * scale_mm_per_level reconstructs
/// height in millimeters to within one quantization step; invalid source
/// cells are 0.
struct HeightMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> gray; // row-major
    double scale_mm_per_level = 0.0;

    std::uint8_t at(int u, int v) const { return gray[static_cast<std::size_t>(v) * width + u]; }
};

/// Linear 8-bit quantization of height above ground over [0, height_max_mm].
/// Heights clamp to 0 below ground and to height_max_mm above full scale.
HeightMap raster_to_heightmap(const DepthRaster& r, const CameraConfig& cam);

struct PaddedHeightMap {
    HeightMap map;
    int offset_x = 0; // where the source's (0,0) landed, for landmark remapping
    int offset_y = 0;
};

/// Center the image inside a target_w x target_h canvas filled with `fill`.
PaddedHeightMap pad_center(const HeightMap& h, int target_w, int target_h, std::uint8_t fill);

/// Binary PGM (P5) with a "# mm_per_level=<float>" comment carrying the scale.
void write_pgm(const HeightMap& h, std::ostream& out);
HeightMap read_pgm(std::istream& in);

} // namespace bovigeom
