#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bovigeom {

/// Row-major grid of camera-to-surface depth samples in millimeters.
/// Cells whose source field was empty, non-numeric-but-blank, zero, negative
/// or non-finite carry valid == false and must not be interpreted.
struct DepthRaster {
    int width = 0;
    int height = 0;
    std::vector<float> depth_mm;     // width * height, row-major
    std::vector<std::uint8_t> valid; // same layout, 0 = missing/invalid

    float at(int u, int v) const { return depth_mm[static_cast<std::size_t>(v) * width + u]; }
    bool is_valid(int u, int v) const { return valid[static_cast<std::size_t>(v) * width + u] != 0; }
    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
    std::size_t size() const { return depth_mm.size(); }
};

/// Pinhole intrinsics plus the fixed camera-to-ground distance of the rig.
struct CameraConfig {
    double ground_distance_mm = 2515.0;
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double height_max_mm = 2515.0; // full-scale value of the 8-bit height map

    void validate() const; // throws ConfigError
};

/// Parse a comma-separated depth raster. Rows must all have the same cell
/// count; a non-numeric non-empty cell is a parse error. Empty, zero,
/// negative and non-finite cells become invalid samples.
DepthRaster parse_depth_raster(std::istream& in);
DepthRaster parse_depth_raster(const std::string& text);

/// Serialize a raster back to CSV (invalid cells written as empty fields).
void write_depth_csv(const DepthRaster& r, std::ostream& out);

/// View of a raster as height above ground (ground_distance - depth, mm).
/// Gives bilinear interpolation at fractional pixel positions using
/// valid-neighbor renormalized weights.
class HeightField {
public:
    HeightField(const DepthRaster& raster, const CameraConfig& cam)
        : raster_(raster), ground_(cam.ground_distance_mm) {}

    int width() const { return raster_.width; }
    int height() const { return raster_.height; }
    bool cell_valid(int u, int v) const { return raster_.in_bounds(u, v) && raster_.is_valid(u, v); }
    double cell_height(int u, int v) const { return ground_ - raster_.at(u, v); }

    /// Bilinear sample at (u, v); returns false when all contributing
    /// neighbors are invalid or out of bounds.
    bool sample(double u, double v, double& out) const;

private:
    const DepthRaster& raster_;
    double ground_;
};

} // namespace bovigeom
