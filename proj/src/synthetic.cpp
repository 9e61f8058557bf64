#include "bovigeom/synthetic.hpp"

#include "bovigeom/error.hpp"
#include "bovigeom/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace bovigeom {

namespace {

double smoothstep01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

} // namespace

double SurfaceDescriptor::height_at(double u, double v) const {
    const double plateau = smoothstep01((u - body_u0) / edge_band_px) *
                           smoothstep01((body_u1 - u) / edge_band_px) *
                           smoothstep01((v - body_v0) / edge_band_px) *
                           smoothstep01((body_v1 - v) / edge_band_px);
    double h = base_height_mm * plateau;
    for (const Ridge& ridge : ridges) {
        if (ridge.amplitude_mm == 0.0) continue;
        const Vec2 d = ridge.p1 - ridge.p0;
        const double len2 = dot(d, d);
        const Vec2 q = Vec2{u, v} - ridge.p0;
        const double t = std::clamp(dot(q, d) / len2, 0.0, 1.0);
        const Vec2 closest = ridge.p0 + t * d;
        const double dist2 = dot(Vec2{u, v} - closest, Vec2{u, v} - closest);
        const double w2 = ridge.width_px * ridge.width_px;
        if (dist2 > 16.0 * w2) continue; // beyond 4 sigma
        // sin^2 envelope: peaks at amplitude mid-line and leaves both
        // endpoints with zero slope, so chord endpoints sit exactly on the
        // base surface.
        const double s = std::sin(3.14159265358979323846 * t);
        h += ridge.amplitude_mm * s * s * std::exp(-dist2 / (2.0 * w2));
    }
    for (const Bump& bump : bumps) {
        if (bump.amplitude_mm == 0.0) continue;
        const double du = u - bump.center.x;
        const double dv = v - bump.center.y;
        const double dist2 = du * du + dv * dv;
        const double w2 = bump.width_px * bump.width_px;
        if (dist2 > 16.0 * w2) continue;
        h += bump.amplitude_mm * std::exp(-dist2 / (2.0 * w2));
    }
    return h;
}

BcsLabel BcsMap::label_for(double mean_amplitude) const {
    validate();
    for (std::size_t i = 0; i < upper_bounds.size(); ++i)
        if (mean_amplitude < upper_bounds[i]) return labels[i];
    return labels.back();
}

void BcsMap::validate() const {
    if (labels.empty() || labels.size() != upper_bounds.size() + 1)
        throw ConfigError("bcs map: need n+1 labels for n thresholds");
    for (std::size_t i = 1; i < upper_bounds.size(); ++i)
        if (!(upper_bounds[i] > upper_bounds[i - 1]))
            throw ConfigError("bcs map: thresholds must be ascending");
    for (std::size_t i = 1; i < labels.size(); ++i)
        if (labels[i] < labels[i - 1])
            throw ConfigError("bcs map: labels must be non-decreasing");
}

BcsMap make_linear_bcs_map(double amp_base, double amp_step, int n_classes, int first_class_index) {
    if (n_classes < 1)
        throw ConfigError("bcs map: need at least one class");
    BcsMap map;
    for (int c = 0; c < n_classes; ++c) {
        map.labels.push_back(BcsLabel::from_index(first_class_index + c));
        if (c + 1 < n_classes) map.upper_bounds.push_back(amp_base + amp_step * (c + 0.5));
    }
    return map;
}

double SyntheticCowParams::mean_amplitude() const {
    double acc = 0.0;
    for (const double a : bulge_amplitude_mm) acc += a;
    return acc / 10.0;
}

void SyntheticCowParams::validate() const {
    if (raster_width <= 0 || raster_height <= 0)
        throw ConfigError("synthetic: raster dimensions must be positive");
    for (const double a : bulge_amplitude_mm)
        if (a < 0.0)
            throw ConfigError("synthetic: bulge amplitudes must be >= 0");
    if (base_height_mm < 0.0 || noise_sigma_mm < 0.0 || landmark_bump_mm < 0.0)
        throw ConfigError("synthetic: heights and sigma must be >= 0");
    const double inset = body_margin_px + edge_band_px;
    const double cu = raster_width / 2.0;
    const double cv = raster_height / 2.0;
    for (const Vec2& off : landmark_offsets) {
        const double u = cu + off.x;
        const double v = cv + off.y;
        const double slack = layout_jitter_px + 1.0;
        if (u - slack < inset || u + slack > raster_width - inset || v - slack < inset ||
            v + slack > raster_height - inset)
            throw ConfigError("synthetic: landmark layout exceeds the flat body region of the raster");
    }
    bcs_map.validate();
}

SyntheticCow generate_cow(const SyntheticCowParams& params, const CameraConfig& cam) {
    params.validate();
    cam.validate();
    Rng rng(params.seed);

    const double cu = params.raster_width / 2.0;
    const double cv = params.raster_height / 2.0;
    std::array<Vec2, kNumDetectedLandmarks> pos;
    for (int i = 0; i < kNumDetectedLandmarks; ++i) {
        pos[i] = Vec2{cu + params.landmark_offsets[i].x, cv + params.landmark_offsets[i].y};
        if (params.layout_jitter_px > 0.0) {
            pos[i].x += rng.uniform(-params.layout_jitter_px, params.layout_jitter_px);
            pos[i].y += rng.uniform(-params.layout_jitter_px, params.layout_jitter_px);
        }
    }

    SyntheticCow cow;
    cow.surface.base_height_mm = params.base_height_mm;
    cow.surface.body_u0 = params.body_margin_px;
    cow.surface.body_v0 = params.body_margin_px;
    cow.surface.body_u1 = params.raster_width - params.body_margin_px;
    cow.surface.body_v1 = params.raster_height - params.body_margin_px;
    cow.surface.edge_band_px = params.edge_band_px;

    LandmarkSet six;
    for (int i = 0; i < kNumDetectedLandmarks; ++i) {
        Landmark lm;
        lm.u = pos[i].x;
        lm.v = pos[i].y;
        six.set(static_cast<LandmarkName>(i), lm);
    }
    const LandmarkSet nine = derive_spikes(six);
    for (const LineSpec& spec : line_specs()) {
        const double amp = params.bulge_amplitude_mm[spec.id - 1];
        if (amp == 0.0) continue;
        const Landmark& a = nine.at(spec.a);
        const Landmark& b = nine.at(spec.b);
        cow.surface.ridges.push_back({{a.u, a.v}, {b.u, b.v}, amp, params.bulge_width_px});
    }
    if (params.landmark_bump_mm > 0.0) {
        for (const LandmarkName name : {LandmarkName::left_hook, LandmarkName::right_hook,
                                        LandmarkName::left_pin, LandmarkName::right_pin}) {
            const Landmark& lm = nine.at(name);
            cow.surface.bumps.push_back(
                {{lm.u, lm.v}, params.landmark_bump_mm, params.landmark_bump_width_px});
        }
    }

    cow.raster.width = params.raster_width;
    cow.raster.height = params.raster_height;
    const auto n_cells = static_cast<std::size_t>(params.raster_width) * params.raster_height;
    cow.raster.depth_mm.resize(n_cells);
    cow.raster.valid.assign(n_cells, 1);
    for (int v = 0; v < params.raster_height; ++v) {
        for (int u = 0; u < params.raster_width; ++u) {
            double h = cow.surface.height_at(u, v);
            if (params.noise_sigma_mm > 0.0) h += params.noise_sigma_mm * rng.gaussian();
            cow.raster.depth_mm[static_cast<std::size_t>(v) * params.raster_width + u] =
                static_cast<float>(cam.ground_distance_mm - h);
        }
    }

    cow.truth = six;
    cow.detected = six;
    if (params.keypoint_jitter_px > 0.0) {
        const auto j = static_cast<std::uint64_t>(params.keypoint_jitter_px);
        for (int i = 0; i < kNumDetectedLandmarks; ++i) {
            Landmark& lm = cow.detected.at(static_cast<LandmarkName>(i));
            lm.u += static_cast<double>(static_cast<std::int64_t>(rng.next_below(2 * j + 1)) -
                                        static_cast<std::int64_t>(j));
            lm.v += static_cast<double>(static_cast<std::int64_t>(rng.next_below(2 * j + 1)) -
                                        static_cast<std::int64_t>(j));
            lm.u = std::clamp(lm.u, 0.0, static_cast<double>(params.raster_width - 1));
            lm.v = std::clamp(lm.v, 0.0, static_cast<double>(params.raster_height - 1));
        }
    }
    cow.label = params.bcs_map.label_for(params.mean_amplitude());
    return cow;
}

namespace {

// Independent 3x3 solve for z = a*x + b*y + c (Cramer's rule); the oracle
// deliberately avoids the production fit_plane.
std::array<double, 3> oracle_plane(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    const double det = (p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y);
    if (det == 0.0)
        throw ConfigError("oracle: degenerate triangle");
    const double a = ((p2.z - p1.z) * (p3.y - p1.y) - (p3.z - p1.z) * (p2.y - p1.y)) / det;
    const double b = ((p2.x - p1.x) * (p3.z - p1.z) - (p3.x - p1.x) * (p2.z - p1.z)) / det;
    return {a, b, p1.z - a * p1.x - b * p1.y};
}

} // namespace

FeatureVector oracle_features(const SurfaceDescriptor& surface, const LandmarkSet& nine,
                              const OracleDensity& density) {
    if (!nine.has_all_nine())
        throw ConfigError("oracle_features: all nine landmarks required");
    if (density.line_samples < 3 || density.triangle_samples < 4)
        throw ConfigError("oracle_features: densities too small");

    FeatureVector out;
    out.variant = FeatureVariant::depth_image;

    for (const LineSpec& spec : line_specs()) {
        const Landmark& a = nine.at(spec.a);
        const Landmark& b = nine.at(spec.b);
        const double h0 = surface.height_at(a.u, a.v);
        const double h1 = surface.height_at(b.u, b.v);
        const double len = std::hypot(b.u - a.u, b.v - a.v);
        const std::int64_t n = density.line_samples;
        double best = -std::numeric_limits<double>::infinity();
        double integral = 0.0;
        double prev_dev = 0.0;
        for (std::int64_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(n - 1);
            const double u = a.u + t * (b.u - a.u);
            const double v = a.v + t * (b.v - a.v);
            const double dev = surface.height_at(u, v) - (h0 + t * (h1 - h0));
            best = std::max(best, dev);
            if (k > 0) integral += 0.5 * (prev_dev + dev);
            prev_dev = dev;
        }
        integral *= len / static_cast<double>(n - 1);
        out.values[spec.id - 1] = best;
        out.values[10 + spec.id - 1] = integral;
    }

    for (const TriangleSpec& spec : triangle_specs()) {
        const Landmark& a = nine.at(spec.a);
        const Landmark& b = nine.at(spec.b);
        const Landmark& c = nine.at(spec.c);
        const Vec3 va{a.u, a.v, surface.height_at(a.u, a.v)};
        const Vec3 vb{b.u, b.v, surface.height_at(b.u, b.v)};
        const Vec3 vc{c.u, c.v, surface.height_at(c.u, c.v)};
        const auto plane = oracle_plane(va, vb, vc);

        // Uniform barycentric subdivision into k^2 congruent subtriangles,
        // centroid rule on each; every sample is strictly interior so no
        // boundary rasterization is involved.
        const auto k = static_cast<std::int64_t>(
            std::ceil(std::sqrt(static_cast<double>(density.triangle_samples))));
        const double area2 = std::abs((vb.x - va.x) * (vc.y - va.y) - (vc.x - va.x) * (vb.y - va.y));
        const double cell_area = 0.5 * area2 / static_cast<double>(k * k);
        double acc = 0.0;
        for (std::int64_t i = 0; i < k; ++i) {
            for (std::int64_t j = 0; j < k - i; ++j) {
                // Upward subtriangle centroid in barycentric coordinates.
                {
                    const double l1 = (i + 1.0 / 3.0) / static_cast<double>(k);
                    const double l2 = (j + 1.0 / 3.0) / static_cast<double>(k);
                    const double x = va.x + l1 * (vb.x - va.x) + l2 * (vc.x - va.x);
                    const double y = va.y + l1 * (vb.y - va.y) + l2 * (vc.y - va.y);
                    acc += plane[0] * x + plane[1] * y + plane[2] - surface.height_at(x, y);
                }
                if (j < k - i - 1) {
                    const double l1 = (i + 2.0 / 3.0) / static_cast<double>(k);
                    const double l2 = (j + 2.0 / 3.0) / static_cast<double>(k);
                    const double x = va.x + l1 * (vb.x - va.x) + l2 * (vc.x - va.x);
                    const double y = va.y + l1 * (vb.y - va.y) + l2 * (vc.y - va.y);
                    acc += plane[0] * x + plane[1] * y + plane[2] - surface.height_at(x, y);
                }
            }
        }
        out.values[20 + spec.id - 1] = acc * cell_area;
    }
    return out;
}

void SynthDatasetParams::validate() const {
    if (n_cows < 1 || images_per_cow < 1)
        throw ConfigError("synth dataset: counts must be >= 1");
    if (n_classes < 2)
        throw ConfigError("synth dataset: need at least 2 classes");
    if (first_class_index < 0 || first_class_index + n_classes > BcsLabel::kNumClasses)
        throw ConfigError("synth dataset: class range exceeds the BCS scale");
    if (amp_step_mm <= 0.0 || amp_base_mm <= 0.0)
        throw ConfigError("synth dataset: amplitude base and step must be > 0");
    if (amp_jitter_mm < 0.0 || amp_jitter_mm >= amp_step_mm / 2.0)
        throw ConfigError("synth dataset: amplitude jitter must stay below half the class step");
}

SynthCow generate_synth_cow(const SynthDatasetParams& params, int cow_index, const CameraConfig& cam,
                            const OracleDensity* oracle_density) {
    params.validate();
    const std::uint64_t cow_seed = derive_seed(params.seed, static_cast<std::uint64_t>(cow_index));
    Rng cow_rng(cow_seed);

    SyntheticCowParams geom = params.geometry;
    geom.bcs_map = make_linear_bcs_map(params.amp_base_mm, params.amp_step_mm, params.n_classes,
                                       params.first_class_index);
    geom.landmark_bump_mm = params.landmark_bump_mm;
    geom.noise_sigma_mm = params.noise_sigma_mm;
    geom.keypoint_jitter_px = params.keypoint_jitter_px;

    // Cow identity: jittered layout and per-line amplitudes, fixed across
    // the cow's images.
    geom.layout_jitter_px = 0.0;
    if (params.layout_jitter_px > 0.0) {
        for (auto& off : geom.landmark_offsets) {
            off.x += cow_rng.uniform(-params.layout_jitter_px, params.layout_jitter_px);
            off.y += cow_rng.uniform(-params.layout_jitter_px, params.layout_jitter_px);
        }
    }
    const int cls = cow_index % params.n_classes;
    const double base_amp = params.amp_base_mm + params.amp_step_mm * cls;
    for (int l = 0; l < 10; ++l) {
        double amp = base_amp;
        if (params.amp_jitter_mm > 0.0) amp += cow_rng.uniform(-params.amp_jitter_mm, params.amp_jitter_mm);
        geom.bulge_amplitude_mm[l] = std::max(amp, 0.0);
    }

    SynthCow cow;
    char id[16];
    std::snprintf(id, sizeof id, "cow%05d", cow_index);
    cow.cow_id = id;
    for (int img = 0; img < params.images_per_cow; ++img) {
        SyntheticCowParams img_geom = geom;
        img_geom.seed = derive_seed(cow_seed, static_cast<std::uint64_t>(img) + 1);
        cow.images.push_back(generate_cow(img_geom, cam));
    }
    cow.label = cow.images.front().label;
    cow.true_nine = derive_spikes(cow.images.front().truth);
    if (oracle_density != nullptr) {
        cow.oracle = oracle_features(cow.images.front().surface, cow.true_nine, *oracle_density);
    }
    return cow;
}

} // namespace bovigeom
