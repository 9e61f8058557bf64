#include "bovigeom/features.hpp"

#include "bovigeom/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bovigeom {

const std::string& feature_variant_str(FeatureVariant v) {
    static const std::string depth = "depth_image";
    static const std::string cloud = "point_cloud";
    return v == FeatureVariant::depth_image ? depth : cloud;
}

std::optional<FeatureVariant> feature_variant_from_str(const std::string& s) {
    if (s == "depth_image") return FeatureVariant::depth_image;
    if (s == "point_cloud") return FeatureVariant::point_cloud;
    return std::nullopt;
}

const std::array<LineSpec, 10>& line_specs() {
    using L = LandmarkName;
    static const std::array<LineSpec, 10> specs = {{
        {1, L::spike_a, L::right_hook},
        {2, L::spike_b, L::right_hook},
        {3, L::spike_c, L::right_hook},
        {4, L::right_pin, L::right_hook},
        {5, L::spike_b, L::right_pin},
        {6, L::spike_b, L::left_pin},
        {7, L::left_hook, L::left_pin},
        {8, L::left_hook, L::spike_c},
        {9, L::left_hook, L::spike_b},
        {10, L::left_hook, L::spike_a},
    }};
    return specs;
}

const std::array<TriangleSpec, 4>& triangle_specs() {
    using L = LandmarkName;
    static const std::array<TriangleSpec, 4> specs = {{
        {1, L::spike_a, L::spike_b, L::right_hook},
        {2, L::spike_a, L::spike_b, L::left_hook},
        {3, L::spike_b, L::spike_c, L::right_hook},
        {4, L::spike_b, L::spike_c, L::left_hook},
    }};
    return specs;
}

PlaneCoeffs fit_plane(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    const double det = (p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y);
    double scale = 0.0;
    for (const Vec3* p : {&p1, &p2, &p3}) scale = std::max({scale, std::abs(p->x), std::abs(p->y)});
    if (std::abs(det) <= 1e-12 * std::max(1.0, scale * scale))
        throw DataError("fit_plane: collinear or duplicated (x, y) projections");
    const double a = ((p2.z - p1.z) * (p3.y - p1.y) - (p3.z - p1.z) * (p2.y - p1.y)) / det;
    const double b = ((p2.x - p1.x) * (p3.z - p1.z) - (p3.x - p1.x) * (p2.z - p1.z)) / det;
    const double c = p1.z - a * p1.x - b * p1.y;
    return {a, b, c};
}

CloudSurface::CloudSurface(const PointCloud& cloud, double ground_distance_mm, double r_query_scale) {
    if (cloud.size() < 2)
        throw ConfigError("cloud surface: need at least 2 points");
    pts_.reserve(cloud.size());
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    min_x_ = std::numeric_limits<double>::infinity();
    min_y_ = std::numeric_limits<double>::infinity();
    for (const Vec3& p : cloud.points) {
        pts_.push_back({p.x, p.y, ground_distance_mm - p.z});
        min_x_ = std::min(min_x_, p.x);
        min_y_ = std::min(min_y_, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }

    // Median nearest-neighbor spacing via a uniform grid sized to the
    // expected point density.
    const double span_x = std::max(max_x - min_x_, 1e-9);
    const double span_y = std::max(max_y - min_y_, 1e-9);
    const double guess = std::sqrt(span_x * span_y / static_cast<double>(pts_.size()));
    const auto build_grid = [&](double cell) {
        cell_ = std::max(cell, 1e-9);
        grid_w_ = static_cast<int>(span_x / cell_) + 1;
        grid_h_ = static_cast<int>(span_y / cell_) + 1;
        grid_.assign(static_cast<std::size_t>(grid_w_) * grid_h_, {});
        for (std::uint32_t i = 0; i < pts_.size(); ++i) {
            const int gx = static_cast<int>((pts_[i].x - min_x_) / cell_);
            const int gy = static_cast<int>((pts_[i].y - min_y_) / cell_);
            grid_[static_cast<std::size_t>(gy) * grid_w_ + gx].push_back(i);
        }
    };
    build_grid(guess);

    std::vector<double> nn(pts_.size(), std::numeric_limits<double>::infinity());
    for (std::uint32_t i = 0; i < pts_.size(); ++i) {
        const int gx = static_cast<int>((pts_[i].x - min_x_) / cell_);
        const int gy = static_cast<int>((pts_[i].y - min_y_) / cell_);
        // Expand the search ring until a neighbor is found.
        for (int ring = 1; ring <= std::max(grid_w_, grid_h_); ++ring) {
            for (int dy = -ring; dy <= ring; ++dy) {
                for (int dx = -ring; dx <= ring; ++dx) {
                    const int x = gx + dx, y = gy + dy;
                    if (x < 0 || y < 0 || x >= grid_w_ || y >= grid_h_) continue;
                    for (const std::uint32_t j : grid_[static_cast<std::size_t>(y) * grid_w_ + x]) {
                        if (j == i) continue;
                        const double d = std::hypot(pts_[j].x - pts_[i].x, pts_[j].y - pts_[i].y);
                        if (d > 0.0) nn[i] = std::min(nn[i], d);
                    }
                }
            }
            // A full extra ring guards against neighbors just across a cell
            // boundary being farther than a point in the next ring out.
            if (std::isfinite(nn[i]) && nn[i] <= ring * cell_) break;
        }
    }
    std::vector<double> finite;
    finite.reserve(nn.size());
    for (const double d : nn)
        if (std::isfinite(d)) finite.push_back(d);
    if (finite.empty())
        throw ConfigError("cloud surface: all points share one xy position");
    const std::size_t mid = finite.size() / 2;
    std::nth_element(finite.begin(), finite.begin() + mid, finite.end());
    median_nn_spacing_ = finite[mid];
    r_query_ = r_query_scale * median_nn_spacing_;

    // Rebuild the lookup grid at the query radius so a 3x3 block covers it.
    build_grid(r_query_);
}

bool CloudSurface::sample(double x, double y, double& height) const {
    const int gx = static_cast<int>(std::floor((x - min_x_) / cell_));
    const int gy = static_cast<int>(std::floor((y - min_y_) / cell_));
    bool found = false;
    double best = 0.0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const int cx = gx + dx, cy = gy + dy;
            if (cx < 0 || cy < 0 || cx >= grid_w_ || cy >= grid_h_) continue;
            for (const std::uint32_t i : grid_[static_cast<std::size_t>(cy) * grid_w_ + cx]) {
                const double ddx = pts_[i].x - x;
                const double ddy = pts_[i].y - y;
                if (ddx * ddx + ddy * ddy > r_query_ * r_query_) continue;
                if (!found || pts_[i].h > best) {
                    found = true;
                    best = pts_[i].h;
                }
            }
        }
    }
    if (found) height = best;
    return found;
}

Profile line_profile(const SurfaceSampler& s, Vec2 p0, Vec2 p1, int n_samples) {
    if (n_samples < 2)
        throw ConfigError("line_profile: need at least 2 samples");
    if (p0.x == p1.x && p0.y == p1.y)
        throw ConfigError("line_profile: endpoints coincide");

    double h0 = 0.0, h1 = 0.0;
    std::vector<int> missing;
    if (!s.sample(p0.x, p0.y, h0)) missing.push_back(0);
    if (!s.sample(p1.x, p1.y, h1)) missing.push_back(n_samples - 1);

    Profile profile;
    profile.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const double t = static_cast<double>(k) / (n_samples - 1);
        const Vec2 pos = p0 + t * (p1 - p0);
        double h = 0.0;
        if (!s.sample(pos.x, pos.y, h)) {
            if (k != 0 && k != n_samples - 1) missing.push_back(k);
            continue;
        }
        profile.push_back({t, h, h0 + t * (h1 - h0)});
    }
    if (!missing.empty()) {
        std::string msg = "line_profile: no surface data at sample indices";
        const std::size_t shown = std::min<std::size_t>(missing.size(), 8);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + std::to_string(missing[i]);
        if (missing.size() > shown) msg += " (+" + std::to_string(missing.size() - shown) + " more)";
        throw DataError(msg);
    }
    return profile;
}

double max_distance(const Profile& profile) {
    if (profile.empty())
        throw ConfigError("max_distance: empty profile");
    double best = -std::numeric_limits<double>::infinity();
    for (const ProfileSample& s : profile) best = std::max(best, s.surface - s.chord);
    return best;
}

double area(const Profile& profile, double chord_length) {
    if (profile.size() < 2)
        throw ConfigError("area: need at least 2 profile samples");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        const double d0 = profile[i].surface - profile[i].chord;
        const double d1 = profile[i + 1].surface - profile[i + 1].chord;
        acc += 0.5 * (d0 + d1) * (profile[i + 1].t - profile[i].t);
    }
    return acc * chord_length;
}

namespace {

// Top-left fill rule in image coordinates (y down), for triangles wound so
// the interior has positive edge functions.
bool edge_is_top_left(Vec2 a, Vec2 b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

} // namespace

double triangle_volume(const SurfaceSampler& s, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                       double pitch) {
    if (!(pitch > 0.0))
        throw ConfigError("triangle_volume: pitch must be > 0");
    const PlaneCoeffs plane = fit_plane(v0, v1, v2);

    Vec2 a{v0.x, v0.y}, b{v1.x, v1.y}, c{v2.x, v2.y};
    if (cross(b - a, c - a) < 0.0) std::swap(b, c);
    const Vec2 verts[3] = {a, b, c};

    const double min_x = std::min({a.x, b.x, c.x});
    const double max_x = std::max({a.x, b.x, c.x});
    const double min_y = std::min({a.y, b.y, c.y});
    const double max_y = std::max({a.y, b.y, c.y});
    const std::int64_t ix0 = static_cast<std::int64_t>(std::ceil(min_x / pitch));
    const std::int64_t ix1 = static_cast<std::int64_t>(std::floor(max_x / pitch));
    const std::int64_t iy0 = static_cast<std::int64_t>(std::ceil(min_y / pitch));
    const std::int64_t iy1 = static_cast<std::int64_t>(std::floor(max_y / pitch));

    double volume = 0.0;
    std::size_t missing = 0;
    for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
        for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
            const Vec2 p{static_cast<double>(ix) * pitch, static_cast<double>(iy) * pitch};
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e) {
                const Vec2 ea = verts[e];
                const Vec2 eb = verts[(e + 1) % 3];
                const double edge = cross(eb - ea, p - ea);
                if (edge > 0.0) continue;
                if (edge == 0.0 && edge_is_top_left(ea, eb)) continue;
                inside = false;
            }
            if (!inside) continue;
            double h = 0.0;
            if (!s.sample(p.x, p.y, h)) {
                ++missing;
                continue;
            }
            volume += plane.height_at(p.x, p.y) - h;
        }
    }
    if (missing > 0)
        throw DataError("triangle_volume: " + std::to_string(missing) + " cells without surface data");
    return volume * pitch * pitch;
}

namespace {

struct ResolvedLandmark {
    Vec2 pos;      // planar position in the variant's units
    double height; // surface height in millimeters
};

int profile_sample_count(double chord_len, double spacing, const FeatureParams& params) {
    const double per_unit = params.samples_per_spacing * chord_len / spacing;
    const int n = std::max(params.min_profile_samples, static_cast<int>(std::ceil(per_unit)));
    return std::max(n, 2);
}

FeatureVector extract_from_surface(const SurfaceSampler& surface,
                                   const std::array<ResolvedLandmark, kNumLandmarks>& lms,
                                   FeatureVariant variant, const FeatureParams& params) {
    FeatureVector out;
    out.variant = variant;
    const double spacing = surface.native_spacing();

    const auto run = [&](const std::string& feature, auto&& fn) {
        try {
            fn();
        } catch (const DataError& e) {
            throw DataError(feature + ": " + e.what());
        } catch (const ConfigError& e) {
            throw DataError(feature + ": " + e.what());
        }
    };

    for (const LineSpec& spec : line_specs()) {
        const ResolvedLandmark& p0 = lms[static_cast<int>(spec.a)];
        const ResolvedLandmark& p1 = lms[static_cast<int>(spec.b)];
        const double chord_xy = norm(p1.pos - p0.pos);
        const double chord_len =
            params.chord_length_3d ? std::hypot(chord_xy, p1.height - p0.height) : chord_xy;
        const std::string id = "l" + std::to_string(spec.id);
        run("maxdist_" + id, [&] {
            Profile profile =
                line_profile(surface, p0.pos, p1.pos, profile_sample_count(chord_xy, spacing, params));
            if (params.clamp_negative)
                for (ProfileSample& ps : profile) ps.surface = std::max(ps.surface, ps.chord);
            out.values[spec.id - 1] = max_distance(profile);
            out.values[10 + spec.id - 1] = area(profile, chord_len);
        });
    }

    for (const TriangleSpec& spec : triangle_specs()) {
        const ResolvedLandmark& a = lms[static_cast<int>(spec.a)];
        const ResolvedLandmark& b = lms[static_cast<int>(spec.b)];
        const ResolvedLandmark& c = lms[static_cast<int>(spec.c)];
        const std::string id = "volume_v" + std::to_string(spec.id);
        run(id, [&] {
            const double pitch = variant == FeatureVariant::depth_image
                                     ? 1.0
                                     : params.volume_pitch_scale * spacing;
            double v = triangle_volume(surface, Vec3{a.pos.x, a.pos.y, a.height},
                                       Vec3{b.pos.x, b.pos.y, b.height},
                                       Vec3{c.pos.x, c.pos.y, c.height}, pitch);
            if (params.clamp_negative) v = std::max(v, 0.0);
            out.values[20 + spec.id - 1] = v;
        });
    }

    for (int i = 0; i < kNumFeatures; ++i)
        if (!std::isfinite(out.values[i]))
            throw DataError("feature vector: non-finite value for " + FeatureVector::names()[i]);
    return out;
}

} // namespace

FeatureVector extract_features(const DepthRaster& r, const CameraConfig& cam, const LandmarkSet& l,
                               const FeatureParams& params) {
    cam.validate();
    if (!l.has_all_nine())
        throw ConfigError("extract_features: all nine landmarks required");
    const RasterSurface surface(r, cam);
    std::array<ResolvedLandmark, kNumLandmarks> lms;
    for (int i = 0; i < kNumLandmarks; ++i) {
        const Landmark& lm = l.at(static_cast<LandmarkName>(i));
        double h = 0.0;
        if (!surface.sample(lm.u, lm.v, h))
            throw DataError("extract_features: no valid depth at landmark '" +
                            landmark_name_str(static_cast<LandmarkName>(i)) + "'");
        lms[i] = {{lm.u, lm.v}, h};
    }
    return extract_from_surface(surface, lms, FeatureVariant::depth_image, params);
}

FeatureVector extract_features_cloud(const PointCloud& c, double ground_distance_mm,
                                     const LandmarkSet& l, const FeatureParams& params) {
    if (!l.has_all_nine())
        throw ConfigError("extract_features_cloud: all nine landmarks required");
    const CloudSurface surface(c, ground_distance_mm, params.r_query_scale);
    std::array<ResolvedLandmark, kNumLandmarks> lms;
    for (int i = 0; i < kNumLandmarks; ++i) {
        const Landmark& lm = l.at(static_cast<LandmarkName>(i));
        if (!lm.xyz_mm)
            throw ConfigError("extract_features_cloud: landmark '" +
                              landmark_name_str(static_cast<LandmarkName>(i)) + "' lacks a 3D position");
        lms[i] = {{lm.xyz_mm->x, lm.xyz_mm->y}, ground_distance_mm - lm.xyz_mm->z};
    }
    return extract_from_surface(surface, lms, FeatureVariant::point_cloud, params);
}

const std::array<std::string, kNumFeatures>& FeatureVector::names() {
    static const std::array<std::string, kNumFeatures> names = [] {
        std::array<std::string, kNumFeatures> n;
        for (int i = 0; i < 10; ++i) n[i] = "maxdist_l" + std::to_string(i + 1);
        for (int i = 0; i < 10; ++i) n[10 + i] = "area_l" + std::to_string(i + 1);
        for (int i = 0; i < 4; ++i) n[20 + i] = "volume_v" + std::to_string(i + 1);
        return n;
    }();
    return names;
}

int FeatureVector::index_of(const std::string& name) {
    const auto& all = names();
    for (int i = 0; i < kNumFeatures; ++i)
        if (all[i] == name) return i;
    return -1;
}

void write_feature_csv(const std::vector<FeatureRecord>& rows, std::ostream& out) {
    out << "cow_id,image_id,variant";
    for (const std::string& name : FeatureVector::names()) out << "," << name;
    out << ",label\n";
    char buf[40];
    for (const FeatureRecord& row : rows) {
        out << row.cow_id << "," << row.image_id << "," << feature_variant_str(row.variant);
        for (const double v : row.values) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        if (row.label) {
            std::snprintf(buf, sizeof buf, ",%.2f", *row.label);
            out << buf;
        } else {
            out << ",";
        }
        out << "\n";
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(std::move(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_double_cell(const std::string& cell, int line_no, const std::string& what) {
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw DataError("feature csv: bad " + what + " '" + cell + "' at line " + std::to_string(line_no));
    return value;
}

} // namespace

std::vector<FeatureRecord> read_feature_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("feature csv: empty input");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() != 3 + kNumFeatures + 1 || header[0] != "cow_id" || header[1] != "image_id" ||
        header[2] != "variant" || header.back() != "label")
        throw DataError("feature csv: unexpected header");
    for (int i = 0; i < kNumFeatures; ++i)
        if (header[3 + i] != FeatureVector::names()[i])
            throw DataError("feature csv: column " + std::to_string(3 + i) + " is '" + header[3 + i] +
                            "', expected '" + FeatureVector::names()[i] + "'");

    std::vector<FeatureRecord> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("feature csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        FeatureRecord row;
        row.cow_id = cells[0];
        row.image_id = cells[1];
        const auto variant = feature_variant_from_str(cells[2]);
        if (!variant)
            throw DataError("feature csv: unknown variant '" + cells[2] + "' at line " +
                            std::to_string(line_no));
        row.variant = *variant;
        for (int i = 0; i < kNumFeatures; ++i)
            row.values[i] = parse_double_cell(cells[3 + i], line_no, "feature value");
        if (!cells.back().empty()) row.label = parse_double_cell(cells.back(), line_no, "label");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace bovigeom
