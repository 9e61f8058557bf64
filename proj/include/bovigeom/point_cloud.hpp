#pragma once

#include "bovigeom/depth_raster.hpp"
#include "bovigeom/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bovigeom {

/// Camera-frame cloud in millimeters: x right, y down, z depth along the
/// optical axis (the camera looks straight down at the ground).
struct PointCloud {
    struct SourcePixel {
        int u = 0;
        int v = 0;
    };
    struct NormTransform {
        Vec3 centroid;
        double scale = 1.0;
    };

    std::vector<Vec3> points;
    std::vector<SourcePixel> source_pixel; // empty, or one entry per point
    bool normalized = false;
    std::optional<NormTransform> norm_transform;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct VoxelGridSpec {
    double voxel_size_mm = 0.0;
    Vec3 origin;

    void validate() const; // throws ConfigError
};

/// Back-project every valid pixel strictly above the ground plane
/// (depth < ground_distance_mm) through the pinhole model.
PointCloud backproject(const DepthRaster& r, const CameraConfig& cam);

/// One point per occupied voxel, at the member centroid; output ordered by
/// ascending (ix, iy, iz) voxel index.
PointCloud voxel_downsample(const PointCloud& c, const VoxelGridSpec& g);

/// Shift to the centroid and divide by the max point norm. Coincident
/// clouds map to all-zeros with scale recorded as 1. The inverse transform
/// is stored on the result.
PointCloud normalize_unit_sphere(const PointCloud& c);

/// Invert normalize_unit_sphere using the stored transform.
PointCloud denormalize(const PointCloud& c);

/// Uniform sample of exactly n points: without replacement when the cloud
/// is large enough, otherwise all points plus uniform redraws.
PointCloud subsample(const PointCloud& c, std::size_t n, std::uint64_t seed);

/// Vertical axis for the rotation: the optical axis (z) for top-view rigs,
/// y for side-view data.
enum class RotationAxis { z, y };

/// Rotation about the vertical axis by U(-yaw_range, yaw_range), isotropic
/// scale by U(scale_min, scale_max), then per-coordinate Gaussian jitter.
PointCloud augment(const PointCloud& c, double yaw_range, double scale_min, double scale_max,
                   double jitter_sigma, std::uint64_t seed, RotationAxis axis = RotationAxis::z);

} // namespace bovigeom
