#include "bovigeom/point_cloud.hpp"

#include "bovigeom/error.hpp"
#include "bovigeom/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace bovigeom {

void VoxelGridSpec::validate() const {
    if (!(voxel_size_mm > 0.0))
        throw ConfigError("voxel grid: voxel_size_mm must be > 0");
}

PointCloud backproject(const DepthRaster& r, const CameraConfig& cam) {
    cam.validate();
    PointCloud c;
    for (int v = 0; v < r.height; ++v) {
        for (int u = 0; u < r.width; ++u) {
            if (!r.is_valid(u, v)) continue;
            const double d = static_cast<double>(r.at(u, v));
            if (!(d < cam.ground_distance_mm)) continue; // on/below ground
            c.points.push_back({(u - cam.cx) * d / cam.fx, (v - cam.cy) * d / cam.fy, d});
            c.source_pixel.push_back({u, v});
        }
    }
    return c;
}

PointCloud voxel_downsample(const PointCloud& c, const VoxelGridSpec& g) {
    g.validate();
    struct Bucket {
        std::int64_t ix, iy, iz;
        Vec3 sum;
        std::size_t count;
    };
    std::vector<Bucket> buckets;
    buckets.reserve(c.size());
    for (const Vec3& p : c.points) {
        const auto idx = [&](double value, double origin) {
            return static_cast<std::int64_t>(std::floor((value - origin) / g.voxel_size_mm));
        };
        buckets.push_back({idx(p.x, g.origin.x), idx(p.y, g.origin.y), idx(p.z, g.origin.z), p, 1});
    }
    std::sort(buckets.begin(), buckets.end(), [](const Bucket& a, const Bucket& b) {
        return std::tie(a.ix, a.iy, a.iz) < std::tie(b.ix, b.iy, b.iz);
    });

    PointCloud out;
    std::size_t i = 0;
    while (i < buckets.size()) {
        Vec3 sum = buckets[i].sum;
        std::size_t count = 1;
        std::size_t j = i + 1;
        while (j < buckets.size() && buckets[j].ix == buckets[i].ix && buckets[j].iy == buckets[i].iy &&
               buckets[j].iz == buckets[i].iz) {
            sum = sum + buckets[j].sum;
            ++count;
            ++j;
        }
        out.points.push_back((1.0 / static_cast<double>(count)) * sum);
        i = j;
    }
    return out;
}

PointCloud normalize_unit_sphere(const PointCloud& c) {
    if (c.empty())
        throw ConfigError("normalize_unit_sphere: empty cloud");
    Vec3 centroid;
    for (const Vec3& p : c.points) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(c.size())) * centroid;

    double max_norm = 0.0;
    for (const Vec3& p : c.points) max_norm = std::max(max_norm, norm(p - centroid));
    const double scale = max_norm > 0.0 ? max_norm : 1.0;

    PointCloud out;
    out.points.reserve(c.size());
    for (const Vec3& p : c.points) out.points.push_back((1.0 / scale) * (p - centroid));
    out.source_pixel = c.source_pixel;
    out.normalized = true;
    out.norm_transform = PointCloud::NormTransform{centroid, scale};
    return out;
}

PointCloud denormalize(const PointCloud& c) {
    if (!c.norm_transform)
        throw ConfigError("denormalize: cloud has no stored norm_transform");
    PointCloud out;
    out.points.reserve(c.size());
    for (const Vec3& p : c.points) out.points.push_back(c.norm_transform->scale * p + c.norm_transform->centroid);
    out.source_pixel = c.source_pixel;
    return out;
}

PointCloud subsample(const PointCloud& c, std::size_t n, std::uint64_t seed) {
    if (c.empty())
        throw ConfigError("subsample: empty cloud");
    if (n == 0)
        throw ConfigError("subsample: n must be > 0");
    Rng rng(seed);
    std::vector<std::size_t> picks;
    picks.reserve(n);
    if (c.size() >= n) {
        // Partial Fisher-Yates: first n entries of a seeded shuffle.
        std::vector<std::size_t> order(c.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.next_below(order.size() - i);
            std::swap(order[i], order[j]);
            picks.push_back(order[i]);
        }
    } else {
        for (std::size_t i = 0; i < c.size(); ++i) picks.push_back(i);
        for (std::size_t i = c.size(); i < n; ++i) picks.push_back(rng.next_below(c.size()));
    }

    PointCloud out;
    out.points.reserve(n);
    const bool has_src = !c.source_pixel.empty();
    if (has_src) out.source_pixel.reserve(n);
    for (const std::size_t idx : picks) {
        out.points.push_back(c.points[idx]);
        if (has_src) out.source_pixel.push_back(c.source_pixel[idx]);
    }
    return out;
}

PointCloud augment(const PointCloud& c, double yaw_range, double scale_min, double scale_max,
                   double jitter_sigma, std::uint64_t seed, RotationAxis axis) {
    if (!(scale_min > 0.0) || !(scale_max > 0.0) || scale_min > scale_max)
        throw ConfigError("augment: scale range must satisfy 0 < min <= max");
    if (jitter_sigma < 0.0)
        throw ConfigError("augment: jitter_sigma must be >= 0");

    Rng rng(seed);
    const double yaw = yaw_range > 0.0 ? rng.uniform(-yaw_range, yaw_range) : 0.0;
    const double s = scale_max > scale_min ? rng.uniform(scale_min, scale_max) : scale_min;
    const double cos_yaw = std::cos(yaw);
    const double sin_yaw = std::sin(yaw);

    PointCloud out;
    out.points.reserve(c.size());
    out.source_pixel = c.source_pixel;
    for (const Vec3& p : c.points) {
        Vec3 q = axis == RotationAxis::z
                     ? Vec3{cos_yaw * p.x - sin_yaw * p.y, sin_yaw * p.x + cos_yaw * p.y, p.z}
                     : Vec3{cos_yaw * p.x + sin_yaw * p.z, p.y, -sin_yaw * p.x + cos_yaw * p.z};
        q = s * q;
        if (jitter_sigma > 0.0) {
            q.x += jitter_sigma * rng.gaussian();
            q.y += jitter_sigma * rng.gaussian();
            q.z += jitter_sigma * rng.gaussian();
        }
        out.points.push_back(q);
    }
    return out;
}

} // namespace bovigeom
