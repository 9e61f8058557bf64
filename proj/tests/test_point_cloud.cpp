#include "bovigeom/point_cloud.hpp"

#include "bovigeom/error.hpp"
#include "bovigeom/ply.hpp"
#include "bovigeom/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

using namespace bovigeom;

namespace {

CameraConfig test_camera() {
    CameraConfig cam;
    cam.ground_distance_mm = 2515.0;
    cam.fx = 700.0;
    cam.fy = 650.0;
    cam.cx = 4.0;
    cam.cy = 3.0;
    return cam;
}

DepthRaster random_raster(Rng& rng, int w, int h, double lo = 500.0, double hi = 3000.0) {
    DepthRaster r;
    r.width = w;
    r.height = h;
    r.depth_mm.resize(static_cast<std::size_t>(w) * h);
    r.valid.resize(r.depth_mm.size());
    for (std::size_t i = 0; i < r.depth_mm.size(); ++i) {
        const bool ok = rng.next_below(10) != 0;
        r.valid[i] = ok ? 1 : 0;
        r.depth_mm[i] = ok ? static_cast<float>(rng.uniform(lo, hi)) : 0.0f;
    }
    return r;
}

PointCloud make_cloud(std::initializer_list<Vec3> pts) {
    PointCloud c;
    c.points.assign(pts);
    return c;
}

bool same_multiset(const PointCloud& a, const PointCloud& b) {
    auto key = [](const Vec3& p) { return std::make_tuple(p.x, p.y, p.z); };
    std::multiset<std::tuple<double, double, double>> ma, mb;
    for (const auto& p : a.points) ma.insert(key(p));
    for (const auto& p : b.points) mb.insert(key(p));
    return ma == mb;
}

} // namespace

TEST_CASE("backproject: principal point, unit tangent and ground filter") {
    const CameraConfig cam = test_camera();
    DepthRaster r;
    r.width = 900;
    r.height = 5;
    r.depth_mm.assign(static_cast<std::size_t>(r.width) * r.height, 0.0f);
    r.valid.assign(r.depth_mm.size(), 0);
    const auto set = [&](int u, int v, float d) {
        r.depth_mm[static_cast<std::size_t>(v) * r.width + u] = d;
        r.valid[static_cast<std::size_t>(v) * r.width + u] = 1;
    };
    set(4, 3, 1000.0f);   // principal point
    set(704, 3, 1000.0f); // cx + fx
    set(5, 4, 2515.0f);   // exactly on ground: excluded

    const PointCloud c = backproject(r, cam);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0].x == doctest::Approx(0.0));
    CHECK(c.points[0].y == doctest::Approx(0.0));
    CHECK(c.points[0].z == doctest::Approx(1000.0));
    CHECK(c.points[1].x == doctest::Approx(1000.0));
    CHECK(c.points[1].y == doctest::Approx(0.0));
    CHECK(c.source_pixel[1].u == 704);
    CHECK(c.source_pixel[1].v == 3);
}

TEST_CASE("backproject: reprojection recovers source pixels exactly") {
    const CameraConfig cam = test_camera();
    Rng rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        const DepthRaster r = random_raster(rng, 24, 18);
        const PointCloud c = backproject(r, cam);
        std::size_t expected = 0;
        for (int v = 0; v < r.height; ++v)
            for (int u = 0; u < r.width; ++u)
                if (r.is_valid(u, v) && r.at(u, v) < cam.ground_distance_mm) ++expected;
        CHECK(c.size() == expected);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const Vec3& p = c.points[i];
            const double u = p.x * cam.fx / p.z + cam.cx;
            const double v = p.y * cam.fy / p.z + cam.cy;
            CHECK(std::abs(u - c.source_pixel[i].u) < 1e-6);
            CHECK(std::abs(v - c.source_pixel[i].v) < 1e-6);
            CHECK(p.z == static_cast<double>(r.at(c.source_pixel[i].u, c.source_pixel[i].v)));
        }
    }
}

TEST_CASE("voxel_downsample: centroids, separation and ordering") {
    VoxelGridSpec grid;
    grid.voxel_size_mm = 1000.0;

    const PointCloud one = voxel_downsample(make_cloud({{0, 0, 0}, {100, 0, 0}}), grid);
    REQUIRE(one.size() == 1);
    CHECK(one.points[0].x == doctest::Approx(50.0));

    const PointCloud two = voxel_downsample(make_cloud({{0, 0, 0}, {1500, 0, 0}}), grid);
    CHECK(two.size() == 2);
    CHECK(two.points[0].x < two.points[1].x); // lexicographic voxel order

    CHECK_THROWS_AS(voxel_downsample(one, VoxelGridSpec{}), ConfigError);
}

TEST_CASE("voxel_downsample: one giant voxel reduces to the global centroid") {
    Rng rng(8);
    PointCloud c;
    Vec3 sum;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p{rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500)};
        c.points.push_back(p);
        sum = sum + p;
    }
    VoxelGridSpec grid;
    grid.voxel_size_mm = 10000.0;
    grid.origin = {-5000, -5000, -5000};
    const PointCloud out = voxel_downsample(c, grid);
    REQUIRE(out.size() == 1);
    const Vec3 centroid = (1.0 / 10000.0) * sum;
    CHECK(out.points[0].x == doctest::Approx(centroid.x).epsilon(1e-12));
    CHECK(out.points[0].y == doctest::Approx(centroid.y).epsilon(1e-12));
    CHECK(out.points[0].z == doctest::Approx(centroid.z).epsilon(1e-12));
}

TEST_CASE("voxel_downsample: tiny voxels preserve the point multiset") {
    Rng rng(9);
    PointCloud c;
    for (int i = 0; i < 200; ++i)
        c.points.push_back({rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100)});
    VoxelGridSpec grid;
    grid.voxel_size_mm = 1e-4;
    const PointCloud out = voxel_downsample(c, grid);
    CHECK(out.size() == c.size());
    CHECK(same_multiset(out, c));
}

TEST_CASE("normalize_unit_sphere: fixed point, degenerate cloud, inversion") {
    const PointCloud centered = normalize_unit_sphere(make_cloud({{1, 0, 0}, {-1, 0, 0}}));
    CHECK(centered.points[0].x == doctest::Approx(1.0));
    CHECK(centered.points[1].x == doctest::Approx(-1.0));
    CHECK(centered.normalized);

    const PointCloud lonely = normalize_unit_sphere(make_cloud({{10, 10, 10}}));
    CHECK(lonely.points[0].x == 0.0);
    CHECK(lonely.norm_transform->scale == 1.0);

    CHECK_THROWS_AS(normalize_unit_sphere(PointCloud{}), ConfigError);

    Rng rng(11);
    PointCloud c;
    for (int i = 0; i < 500; ++i)
        c.points.push_back({rng.uniform(-300, 900), rng.uniform(100, 200), rng.uniform(500, 2500)});
    const PointCloud n = normalize_unit_sphere(c);
    // Independent recomputation of centroid and max norm after the transform.
    Vec3 centroid;
    double max_norm = 0.0;
    for (const Vec3& p : n.points) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(n.size())) * centroid;
    for (const Vec3& p : n.points) max_norm = std::max(max_norm, norm(p));
    CHECK(std::abs(max_norm - 1.0) <= 1e-9);
    CHECK(norm(centroid) <= 1e-12);

    const PointCloud back = denormalize(n);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back.points[i].x == doctest::Approx(c.points[i].x).epsilon(1e-9));
        CHECK(back.points[i].y == doctest::Approx(c.points[i].y).epsilon(1e-9));
        CHECK(back.points[i].z == doctest::Approx(c.points[i].z).epsilon(1e-9));
    }
}

TEST_CASE("subsample: permutation at n, padding below n, determinism") {
    Rng rng(3);
    PointCloud c;
    for (int i = 0; i < 40; ++i) c.points.push_back({static_cast<double>(i), 0, 1});

    const PointCloud full = subsample(c, 40, 99);
    CHECK(same_multiset(full, c));

    PointCloud small = make_cloud({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    const PointCloud padded = subsample(small, 5, 7);
    REQUIRE(padded.size() == 5);
    std::map<double, int> count;
    for (const auto& p : padded.points) ++count[p.x];
    CHECK(count.size() == 3); // all originals present
    for (const auto& [x, n] : count) CHECK(n >= 1);

    const PointCloud again = subsample(c, 17, 123);
    const PointCloud again2 = subsample(c, 17, 123);
    REQUIRE(again.size() == again2.size());
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again.points[i].x == again2.points[i].x);

    CHECK_THROWS_AS(subsample(PointCloud{}, 3, 1), ConfigError);
}

TEST_CASE("augment: identity, similarity scaling, rotation preserves radii") {
    PointCloud c = make_cloud({{100, 0, 50}, {0, 200, 70}, {-50, -50, 90}});

    const PointCloud id = augment(c, 0.0, 1.0, 1.0, 0.0, 5);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(id.points[i].x == doctest::Approx(c.points[i].x));
        CHECK(id.points[i].y == doctest::Approx(c.points[i].y));
        CHECK(id.points[i].z == doctest::Approx(c.points[i].z));
    }

    const PointCloud scaled = augment(c, 1.0, 0.5, 2.0, 0.0, 17);
    // Recover the applied scale from one pair, check every pair matches.
    const auto dist = [](const Vec3& a, const Vec3& b) { return norm(a - b); };
    const double s = dist(scaled.points[0], scaled.points[1]) / dist(c.points[0], c.points[1]);
    CHECK(s > 0.5 - 1e-9);
    CHECK(s < 2.0 + 1e-9);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            CHECK(dist(scaled.points[i], scaled.points[j]) ==
                  doctest::Approx(s * dist(c.points[i], c.points[j])).epsilon(1e-9));

    const PointCloud rotated = augment(c, 3.14, 1.0, 1.0, 0.0, 23);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::hypot(rotated.points[i].x, rotated.points[i].y) ==
              doctest::Approx(std::hypot(c.points[i].x, c.points[i].y)).epsilon(1e-9));
        CHECK(rotated.points[i].z == c.points[i].z);
    }

    const PointCloud side = augment(c, 2.0, 1.0, 1.0, 0.0, 41, RotationAxis::y);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::hypot(side.points[i].x, side.points[i].z) ==
              doctest::Approx(std::hypot(c.points[i].x, c.points[i].z)).epsilon(1e-9));
        CHECK(side.points[i].y == c.points[i].y);
    }

    const PointCloud a1 = augment(c, 0.5, 0.9, 1.1, 2.0, 99);
    const PointCloud a2 = augment(c, 0.5, 0.9, 1.1, 2.0, 99);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(a1.points[i].x == a2.points[i].x);

    CHECK_THROWS_AS(augment(c, 0.0, 2.0, 1.0, 0.0, 1), ConfigError);
}

TEST_CASE("ply: golden header and body, empty cloud, round trip") {
    std::ostringstream empty_os;
    write_ply(PointCloud{}, empty_os);
    CHECK(empty_os.str() == "ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\n"
                            "property float y\nproperty float z\nend_header\n");

    std::ostringstream os;
    write_ply(make_cloud({{1, 2, 3}}), os);
    CHECK(os.str() == "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
                      "property float y\nproperty float z\nend_header\n1 2 3\n");

    Rng rng(13);
    PointCloud c;
    for (int i = 0; i < 300; ++i)
        c.points.push_back({rng.uniform(-2000, 2000), rng.uniform(-2000, 2000), rng.uniform(1, 3000)});
    std::ostringstream round_os;
    write_ply(c, round_os);
    std::istringstream in(round_os.str());
    const PointCloud back = read_ply(in);
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back.points[i].x == static_cast<double>(static_cast<float>(c.points[i].x)));
        CHECK(back.points[i].y == static_cast<double>(static_cast<float>(c.points[i].y)));
        CHECK(back.points[i].z == static_cast<double>(static_cast<float>(c.points[i].z)));
    }
}

TEST_CASE("ply: structural errors carry line numbers") {
    std::istringstream short_body("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n"
                                  "property float y\nproperty float z\nend_header\n1 2 3\n");
    CHECK_THROWS_WITH_AS(read_ply(short_body), doctest::Contains("vertex count says 2"), DataError);

    std::istringstream bad_coord("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
                                 "property float y\nproperty float z\nend_header\n1 oops 3\n");
    CHECK_THROWS_WITH_AS(read_ply(bad_coord), doctest::Contains("line 8"), DataError);

    std::istringstream no_magic("lyp\n");
    CHECK_THROWS_AS(read_ply(no_magic), DataError);
}

TEST_CASE("ply: binary little-endian vertices readable") {
    PointCloud c = make_cloud({{1.5, -2.0, 3.25}, {0.0, 10.0, 2515.0}});
    std::ostringstream os;
    os << "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
          "property float x\nproperty float y\nproperty float z\nend_header\n";
    for (const Vec3& p : c.points) {
        const float xyz[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                              static_cast<float>(p.z)};
        os.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
    }
    std::istringstream in(os.str());
    const PointCloud back = read_ply(in);
    REQUIRE(back.size() == 2);
    CHECK(back.points[0].x == doctest::Approx(1.5));
    CHECK(back.points[1].z == doctest::Approx(2515.0));
}
