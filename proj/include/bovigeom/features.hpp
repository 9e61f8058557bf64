#pragma once

#include "bovigeom/depth_raster.hpp"
#include "bovigeom/geometry.hpp"
#include "bovigeom/landmarks.hpp"
#include "bovigeom/point_cloud.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bovigeom {

enum class FeatureVariant { depth_image, point_cloud };

const std::string& feature_variant_str(FeatureVariant v);
std::optional<FeatureVariant> feature_variant_from_str(const std::string& s);

/// The ten landmark pairs whose connecting lines carry the max-distance and
/// area features, in fixed L1..L10 order.
struct LineSpec {
    int id; // 1-based
    LandmarkName a;
    LandmarkName b;
};
const std::array<LineSpec, 10>& line_specs();

/// The four landmark triples bounding the volume regions, V1..V4.
struct TriangleSpec {
    int id; // 1-based
    LandmarkName a;
    LandmarkName b;
    LandmarkName c;
};
const std::array<TriangleSpec, 4>& triangle_specs();

/// z = a*x + b*y + c through three points with non-collinear (x, y).
struct PlaneCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double height_at(double x, double y) const { return a * x + b * y + c; }
};
PlaneCoeffs fit_plane(const Vec3& p1, const Vec3& p2, const Vec3& p3);

/// Height lookup over some surface representation at a planar position.
class SurfaceSampler {
public:
    virtual ~SurfaceSampler() = default;
    /// false = no data at (x, y).
    virtual bool sample(double x, double y, double& height) const = 0;
    /// Native lateral resolution (1 px for rasters, median neighbor spacing
    /// for clouds); drives profile density and volume raster pitch.
    virtual double native_spacing() const = 0;
};

/// Bilinear raster heights; positions in pixels, heights in millimeters.
class RasterSurface final : public SurfaceSampler {
public:
    RasterSurface(const DepthRaster& raster, const CameraConfig& cam) : field_(raster, cam) {}
    bool sample(double x, double y, double& height) const override { return field_.sample(x, y, height); }
    double native_spacing() const override { return 1.0; }

private:
    HeightField field_;
};

/// Highest cloud point within a query radius of the planar position;
/// positions and heights in millimeters. The radius defaults to
/// 1.5x the median nearest-neighbor xy spacing of the cloud.
class CloudSurface final : public SurfaceSampler {
public:
    CloudSurface(const PointCloud& cloud, double ground_distance_mm, double r_query_scale = 1.5);
    bool sample(double x, double y, double& height) const override;
    double native_spacing() const override { return median_nn_spacing_; }
    double r_query() const { return r_query_; }

private:
    struct Pt {
        double x, y, h;
    };
    std::vector<Pt> pts_;
    std::vector<std::vector<std::uint32_t>> grid_;
    int grid_w_ = 0, grid_h_ = 0;
    double cell_ = 0.0, min_x_ = 0.0, min_y_ = 0.0;
    double median_nn_spacing_ = 0.0;
    double r_query_ = 0.0;
};

struct ProfileSample {
    double t;       // position along the chord in [0, 1]
    double surface; // surface height at the sample
    double chord;   // straight-line height between the endpoint heights
};
using Profile = std::vector<ProfileSample>;

/// Evenly spaced samples of surface height against the endpoint chord.
Profile line_profile(const SurfaceSampler& s, Vec2 p0, Vec2 p1, int n_samples);

/// Largest signed protrusion of the surface above the chord.
double max_distance(const Profile& profile);

/// Trapezoidal integral of the signed deviation over [0, chord_length].
double area(const Profile& profile, double chord_length);

/// Signed volume between the vertex plane and the surface over the grid
/// cells inside the xy triangle (cell centers at multiples of `pitch`;
/// boundary resolved by the top-left fill rule).
double triangle_volume(const SurfaceSampler& s, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                       double pitch);

struct FeatureParams {
    int min_profile_samples = 64;
    double samples_per_spacing = 2.0; // profile samples per native spacing unit
    double r_query_scale = 1.5;       // cloud query radius, in median NN spacings
    double volume_pitch_scale = 1.0;  // volume raster pitch, in native spacings
    bool clamp_negative = false;      // clamp deviations at zero before aggregating
    bool chord_length_3d = false;     // use the 3D chord length instead of its xy projection
};

constexpr int kNumFeatures = 24;

struct FeatureVector {
    FeatureVariant variant = FeatureVariant::depth_image;
    std::array<double, kNumFeatures> values{};

    static const std::array<std::string, kNumFeatures>& names();
    static int index_of(const std::string& name); // -1 when unknown
    double max_dist(int line_id) const { return values[line_id - 1]; }
    double line_area(int line_id) const { return values[10 + line_id - 1]; }
    double volume(int tri_id) const { return values[20 + tri_id - 1]; }
};

/// Depth-image variant: pixel-grid positions, bilinear heights.
FeatureVector extract_features(const DepthRaster& r, const CameraConfig& cam, const LandmarkSet& l,
                               const FeatureParams& params = {});

/// Point-cloud variant: metric xy positions, highest-point-in-radius heights.
/// Landmarks must carry xyz_mm (see landmarks_to_3d).
FeatureVector extract_features_cloud(const PointCloud& c, double ground_distance_mm,
                                     const LandmarkSet& l, const FeatureParams& params = {});

/// One row of the feature CSV (label optional for unlabeled inference input).
struct FeatureRecord {
    std::string cow_id;
    std::string image_id;
    FeatureVariant variant = FeatureVariant::depth_image;
    std::array<double, kNumFeatures> values{};
    std::optional<double> label;
};

void write_feature_csv(const std::vector<FeatureRecord>& rows, std::ostream& out);
std::vector<FeatureRecord> read_feature_csv(std::istream& in);

} // namespace bovigeom
