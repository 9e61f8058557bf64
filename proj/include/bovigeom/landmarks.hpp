#pragma once

#include "bovigeom/depth_raster.hpp"
#include "bovigeom/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bovigeom {

enum class LandmarkName : int {
    left_short_rib = 0,
    right_short_rib,
    left_hook,
    right_hook,
    left_pin,
    right_pin,
    spike_a,
    spike_b,
    spike_c,
};

constexpr int kNumDetectedLandmarks = 6;
constexpr int kNumLandmarks = 9;

const std::string& landmark_name_str(LandmarkName name);
std::optional<LandmarkName> landmark_name_from_str(const std::string& s);

struct Landmark {
    double u = 0.0;
    double v = 0.0;
    bool refined = false;
    std::optional<Vec3> xyz_mm;
};

/// The six detected anatomical keypoints, plus the three derived spike
/// midpoints once derive_spikes has run.
class LandmarkSet {
public:
    bool has(LandmarkName name) const { return present_[static_cast<int>(name)]; }
    const Landmark& at(LandmarkName name) const;
    Landmark& at(LandmarkName name);
    void set(LandmarkName name, Landmark lm);

    bool has_detected_six() const;
    bool has_spikes() const;
    bool has_all_nine() const { return has_detected_six() && has_spikes(); }

private:
    std::array<Landmark, kNumLandmarks> landmarks_{};
    std::array<bool, kNumLandmarks> present_{};
};

struct RefinementConfig {
    int hook_radius = 30;
    int pin_radius = 10;
    // Optional body mask restricting the search; non-zero = inside.
    const std::vector<std::uint8_t>* mask = nullptr;
    int mask_width = 0;
    int mask_height = 0;

    void validate() const; // throws ConfigError
};

/// Parse a keypoint annotation document:
///   {"image": str, "points": [{"name": str, "u": float, "v": float}]}
/// All six detected landmarks must be present exactly once, with finite
/// non-negative coordinates (and inside `bounds` when given).
struct Extent2i {
    int width = 0;
    int height = 0;
};
LandmarkSet parse_keypoints(std::istream& in, std::optional<Extent2i> bounds = std::nullopt);
LandmarkSet parse_keypoints(const std::string& text, std::optional<Extent2i> bounds = std::nullopt);

/// Serialize the detected six to the annotation format above.
void write_keypoints(const LandmarkSet& l, const std::string& image_id, std::ostream& out);

/// Move each hook/pin to the highest valid in-mask pixel within its
/// Chebyshev search radius (ties to the smallest (v, u)). Short ribs are
/// never moved. Radius 0 leaves a landmark untouched.
LandmarkSet refine_keypoints(const LandmarkSet& l, const DepthRaster& r, const CameraConfig& cam,
                             const RefinementConfig& cfg);

/// Add spike A/B/C at the exact midpoints of the short ribs, hooks and
/// pins respectively. Call once, after refinement.
LandmarkSet derive_spikes(const LandmarkSet& l);

/// Back-project all nine landmarks through the pinhole model, reading depth
/// at fractional pixels by valid-neighbor bilinear interpolation.
LandmarkSet landmarks_to_3d(const LandmarkSet& l, const DepthRaster& r, const CameraConfig& cam);

} // namespace bovigeom
