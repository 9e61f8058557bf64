#pragma once

#include "bovigeom/depth_raster.hpp"
#include "bovigeom/features.hpp"
#include "bovigeom/forest.hpp"
#include "bovigeom/geometry.hpp"
#include "bovigeom/landmarks.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bovigeom {

/// Closed-form synthetic back surface: a flat plateau with smoothstep
/// roll-off at the body boundary, sin^2-profile ridges along the feature
/// lines, and Gaussian prominences at the hook/pin landmarks.
struct SurfaceDescriptor {
    struct Ridge {
        Vec2 p0;
        Vec2 p1;
        double amplitude_mm = 0.0;
        double width_px = 6.0;
    };
    struct Bump {
        Vec2 center;
        double amplitude_mm = 0.0;
        double width_px = 4.0;
    };

    double base_height_mm = 0.0;
    double body_u0 = 0.0, body_v0 = 0.0, body_u1 = 0.0, body_v1 = 0.0;
    double edge_band_px = 0.0;
    std::vector<Ridge> ridges;
    std::vector<Bump> bumps;

    double height_at(double u, double v) const;
    /// Bound on base-surface deviation from flat inside the landmark region
    /// (zero when the layout stays on the plateau).
    double base_flat_tolerance_mm() const { return 1e-9; }
};

/// Monotone map from mean bulge amplitude to a BCS label: label[i] applies
/// below upper_bounds[i], the last label above all bounds.
struct BcsMap {
    std::vector<double> upper_bounds; // ascending
    std::vector<BcsLabel> labels;     // upper_bounds.size() + 1 entries, non-decreasing

    BcsLabel label_for(double mean_amplitude) const;
    void validate() const;
};

BcsMap make_linear_bcs_map(double amp_base, double amp_step, int n_classes, int first_class_index);

struct SyntheticCowParams {
    int raster_width = 160;
    int raster_height = 220;
    double body_margin_px = 12.0;
    double edge_band_px = 14.0;
    /// Detected-landmark offsets from the raster center, in pixels. The
    /// defaults are slightly asymmetric so no triangle edge is axis-aligned.
    std::array<Vec2, kNumDetectedLandmarks> landmark_offsets = {{
        {-38.0, -52.6}, // left_short_rib
        {37.4, -54.1},  // right_short_rib
        {-42.3, -1.8},  // left_hook
        {41.6, 1.3},    // right_hook
        {-21.7, 53.2},  // left_pin
        {22.4, 51.9},   // right_pin
    }};
    double layout_jitter_px = 0.0; // uniform per-landmark offset jitter (seeded)
    std::array<double, 10> bulge_amplitude_mm{};
    double bulge_width_px = 6.0;
    double landmark_bump_mm = 0.0; // hook/pin prominence height
    double landmark_bump_width_px = 4.0;
    double base_height_mm = 20.0;
    double noise_sigma_mm = 0.0;
    double keypoint_jitter_px = 0.0; // detector error injected into emitted keypoints
    std::uint64_t seed = 0;
    BcsMap bcs_map = make_linear_bcs_map(8.0, 6.0, 5, 2);

    double mean_amplitude() const;
    void validate() const; // throws ConfigError when the layout exceeds the raster
};

struct SyntheticCow {
    DepthRaster raster;
    LandmarkSet truth;    // exact detected-six positions
    LandmarkSet detected; // with keypoint jitter, as an annotation file would carry
    BcsLabel label;
    SurfaceDescriptor surface;
};

SyntheticCow generate_cow(const SyntheticCowParams& params, const CameraConfig& cam);

struct OracleDensity {
    std::int64_t line_samples = 1'000'001;    // trapezoid points per line
    std::int64_t triangle_samples = 4'000'000; // centroid-rule subtriangles
};

/// Dense-quadrature reference features evaluated directly on the closed
/// form. Shares no sampling, interpolation or rasterization code with the
/// production extractor. Pixel-grid units (depth-image variant).
FeatureVector oracle_features(const SurfaceDescriptor& surface, const LandmarkSet& nine,
                              const OracleDensity& density = {});

/// Multi-image dataset generation: per-cow geometry (layout jitter and
/// per-line amplitudes) is drawn once from the cow seed; noise and keypoint
/// jitter are redrawn per image.
struct SynthDatasetParams {
    int n_cows = 300;
    int images_per_cow = 3;
    int n_classes = 5;
    int first_class_index = 2; // BCS 2.50
    double amp_base_mm = 8.0;
    double amp_step_mm = 6.0;
    double amp_jitter_mm = 2.0;
    double noise_sigma_mm = 3.0;
    double keypoint_jitter_px = 3.0;
    double layout_jitter_px = 3.0;
    double landmark_bump_mm = 70.0;
    std::uint64_t seed = 1;
    SyntheticCowParams geometry; // template; amplitude/seed fields are overwritten

    void validate() const;
};

struct SynthCow {
    std::string cow_id;
    BcsLabel label;
    std::vector<SyntheticCow> images;
    LandmarkSet true_nine;
    FeatureVector oracle; // from the true nine, noise-free closed form
};

/// Deterministic per-index generation (cow seed = derive_seed(seed, index)).
SynthCow generate_synth_cow(const SynthDatasetParams& params, int cow_index, const CameraConfig& cam,
                            const OracleDensity* oracle_density = nullptr);

} // namespace bovigeom
