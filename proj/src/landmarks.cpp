#include "bovigeom/landmarks.hpp"

#include "bovigeom/error.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace bovigeom {

namespace {

const std::array<std::string, kNumLandmarks> kNames = {
    "left_short_rib", "right_short_rib", "left_hook", "right_hook", "left_pin",
    "right_pin",      "spike_a",         "spike_b",   "spike_c",
};

constexpr std::array<LandmarkName, 4> kRefinable = {
    LandmarkName::left_hook,
    LandmarkName::right_hook,
    LandmarkName::left_pin,
    LandmarkName::right_pin,
};

} // namespace

const std::string& landmark_name_str(LandmarkName name) {
    return kNames[static_cast<int>(name)];
}

std::optional<LandmarkName> landmark_name_from_str(const std::string& s) {
    for (int i = 0; i < kNumLandmarks; ++i)
        if (kNames[i] == s) return static_cast<LandmarkName>(i);
    return std::nullopt;
}

const Landmark& LandmarkSet::at(LandmarkName name) const {
    if (!has(name))
        throw ConfigError("landmark set: missing landmark '" + landmark_name_str(name) + "'");
    return landmarks_[static_cast<int>(name)];
}

Landmark& LandmarkSet::at(LandmarkName name) {
    if (!has(name))
        throw ConfigError("landmark set: missing landmark '" + landmark_name_str(name) + "'");
    return landmarks_[static_cast<int>(name)];
}

void LandmarkSet::set(LandmarkName name, Landmark lm) {
    landmarks_[static_cast<int>(name)] = lm;
    present_[static_cast<int>(name)] = true;
}

bool LandmarkSet::has_detected_six() const {
    for (int i = 0; i < kNumDetectedLandmarks; ++i)
        if (!present_[i]) return false;
    return true;
}

bool LandmarkSet::has_spikes() const {
    return has(LandmarkName::spike_a) && has(LandmarkName::spike_b) && has(LandmarkName::spike_c);
}

void RefinementConfig::validate() const {
    if (hook_radius < 0 || pin_radius < 0)
        throw ConfigError("refinement: radii must be >= 0");
    if (mask != nullptr && static_cast<std::size_t>(mask_width) * mask_height != mask->size())
        throw ConfigError("refinement: mask dimensions do not match its buffer");
}

LandmarkSet parse_keypoints(std::istream& in, std::optional<Extent2i> bounds) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("keypoints: invalid json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
        throw DataError("keypoints: document must be an object with a 'points' array");

    LandmarkSet set;
    for (const auto& entry : doc["points"]) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("u") || !entry.contains("v"))
            throw DataError("keypoints: each point needs 'name', 'u' and 'v'");
        const std::string name_str = entry["name"].get<std::string>();
        const auto name = landmark_name_from_str(name_str);
        if (!name)
            throw DataError("keypoints: unknown landmark name '" + name_str + "'");
        if (static_cast<int>(*name) >= kNumDetectedLandmarks)
            throw DataError("keypoints: derived landmark '" + name_str + "' not allowed in annotation files");
        if (set.has(*name))
            throw DataError("keypoints: duplicate landmark '" + name_str + "'");
        Landmark lm;
        lm.u = entry["u"].get<double>();
        lm.v = entry["v"].get<double>();
        if (!std::isfinite(lm.u) || !std::isfinite(lm.v) || lm.u < 0.0 || lm.v < 0.0)
            throw DataError("keypoints: out-of-range coordinate for '" + name_str + "'");
        if (bounds && (lm.u > bounds->width - 1 || lm.v > bounds->height - 1))
            throw DataError("keypoints: out-of-range coordinate for '" + name_str + "'");
        set.set(*name, lm);
    }
    for (int i = 0; i < kNumDetectedLandmarks; ++i)
        if (!set.has(static_cast<LandmarkName>(i)))
            throw DataError("keypoints: missing landmark '" + kNames[i] + "'");
    return set;
}

LandmarkSet parse_keypoints(const std::string& text, std::optional<Extent2i> bounds) {
    std::istringstream in(text);
    return parse_keypoints(in, bounds);
}

void write_keypoints(const LandmarkSet& l, const std::string& image_id, std::ostream& out) {
    nlohmann::json doc;
    doc["image"] = image_id;
    doc["points"] = nlohmann::json::array();
    for (int i = 0; i < kNumDetectedLandmarks; ++i) {
        const auto name = static_cast<LandmarkName>(i);
        const Landmark& lm = l.at(name);
        doc["points"].push_back({{"name", kNames[i]}, {"u", lm.u}, {"v", lm.v}});
    }
    out << doc.dump(2) << "\n";
}

LandmarkSet refine_keypoints(const LandmarkSet& l, const DepthRaster& r, const CameraConfig& cam,
                             const RefinementConfig& cfg) {
    cam.validate();
    cfg.validate();
    if (!l.has_detected_six())
        throw ConfigError("refine_keypoints: all six detected landmarks required");

    const auto in_mask = [&](int u, int v) {
        if (cfg.mask == nullptr) return true;
        if (u >= cfg.mask_width || v >= cfg.mask_height) return false;
        return (*cfg.mask)[static_cast<std::size_t>(v) * cfg.mask_width + u] != 0;
    };

    LandmarkSet out = l;
    for (const LandmarkName name : kRefinable) {
        const int radius = (name == LandmarkName::left_hook || name == LandmarkName::right_hook)
                               ? cfg.hook_radius
                               : cfg.pin_radius;
        if (radius == 0) continue;
        Landmark& lm = out.at(name);
        const double u0 = lm.u;
        const double v0 = lm.v;
        if (!(u0 >= 0 && u0 <= r.width - 1 && v0 >= 0 && v0 <= r.height - 1))
            throw DataError("refine_keypoints: '" + landmark_name_str(name) + "' lies outside the raster");

        bool found = false;
        double best_height = 0.0;
        int best_u = 0, best_v = 0;
        const int v_lo = std::max(0, static_cast<int>(std::ceil(v0 - radius)));
        const int v_hi = std::min(r.height - 1, static_cast<int>(std::floor(v0 + radius)));
        const int u_lo = std::max(0, static_cast<int>(std::ceil(u0 - radius)));
        const int u_hi = std::min(r.width - 1, static_cast<int>(std::floor(u0 + radius)));
        for (int v = v_lo; v <= v_hi; ++v) {
            for (int u = u_lo; u <= u_hi; ++u) {
                if (!r.is_valid(u, v) || !in_mask(u, v)) continue;
                const double h = cam.ground_distance_mm - static_cast<double>(r.at(u, v));
                // Scan order is ascending (v, u), so strict > keeps the
                // lexicographic-minimal pixel on ties.
                if (!found || h > best_height) {
                    found = true;
                    best_height = h;
                    best_u = u;
                    best_v = v;
                }
            }
        }
        if (!found)
            throw DataError("refine_keypoints: no valid pixel within radius " + std::to_string(radius) +
                            " of '" + landmark_name_str(name) + "'");
        lm.u = static_cast<double>(best_u);
        lm.v = static_cast<double>(best_v);
        lm.refined = true;
    }
    return out;
}

LandmarkSet derive_spikes(const LandmarkSet& l) {
    if (!l.has_detected_six())
        throw ConfigError("derive_spikes: all six detected landmarks required");
    if (l.has(LandmarkName::spike_a) || l.has(LandmarkName::spike_b) || l.has(LandmarkName::spike_c))
        throw ConfigError("derive_spikes: spikes already present (call once)");

    const auto midpoint = [&](LandmarkName a, LandmarkName b) {
        Landmark m;
        m.u = (l.at(a).u + l.at(b).u) / 2.0;
        m.v = (l.at(a).v + l.at(b).v) / 2.0;
        return m;
    };
    LandmarkSet out = l;
    out.set(LandmarkName::spike_a, midpoint(LandmarkName::left_short_rib, LandmarkName::right_short_rib));
    out.set(LandmarkName::spike_b, midpoint(LandmarkName::left_hook, LandmarkName::right_hook));
    out.set(LandmarkName::spike_c, midpoint(LandmarkName::left_pin, LandmarkName::right_pin));
    return out;
}

LandmarkSet landmarks_to_3d(const LandmarkSet& l, const DepthRaster& r, const CameraConfig& cam) {
    cam.validate();
    if (!l.has_all_nine())
        throw ConfigError("landmarks_to_3d: all nine landmarks required");

    const HeightField field(r, cam);
    LandmarkSet out = l;
    for (int i = 0; i < kNumLandmarks; ++i) {
        const auto name = static_cast<LandmarkName>(i);
        Landmark& lm = out.at(name);
        double height = 0.0;
        if (!field.sample(lm.u, lm.v, height))
            throw DataError("landmarks_to_3d: no valid depth around '" + landmark_name_str(name) + "'");
        const double depth = cam.ground_distance_mm - height;
        lm.xyz_mm = Vec3{(lm.u - cam.cx) * depth / cam.fx, (lm.v - cam.cy) * depth / cam.fy, depth};
    }
    return out;
}

} // namespace bovigeom
