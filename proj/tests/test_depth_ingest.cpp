#include "bovigeom/depth_raster.hpp"

#include "bovigeom/error.hpp"
#include "bovigeom/height_map.hpp"
#include "bovigeom/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bovigeom;

namespace {

CameraConfig test_camera() {
    CameraConfig cam;
    cam.ground_distance_mm = 2515.0;
    cam.fx = 700.0;
    cam.fy = 700.0;
    cam.cx = 80.0;
    cam.cy = 110.0;
    cam.height_max_mm = 2515.0;
    return cam;
}

} // namespace

TEST_CASE("parse: simple all-valid raster") {
    const DepthRaster r = parse_depth_raster("2515,2515\n1500,2515");
    CHECK(r.width == 2);
    CHECK(r.height == 2);
    for (int v = 0; v < 2; ++v)
        for (int u = 0; u < 2; ++u) CHECK(r.is_valid(u, v));
    CHECK(r.at(0, 1) == doctest::Approx(1500.0));
}

TEST_CASE("parse: empty, zero and negative cells are masked invalid") {
    const DepthRaster r = parse_depth_raster("2515,,\n1500,0,-1");
    CHECK(r.width == 3);
    CHECK(r.height == 2);
    CHECK(r.is_valid(0, 0));
    CHECK_FALSE(r.is_valid(1, 0));
    CHECK_FALSE(r.is_valid(2, 0));
    CHECK(r.is_valid(0, 1));
    CHECK_FALSE(r.is_valid(1, 1));
    CHECK_FALSE(r.is_valid(2, 1));
}

TEST_CASE("parse: non-numeric cell reports coordinates") {
    CHECK_THROWS_WITH_AS(parse_depth_raster("2515,,\n1500,0,abc"),
                         doctest::Contains("row 1, col 2"), DataError);
}

TEST_CASE("parse: ragged row reports the row index") {
    CHECK_THROWS_WITH_AS(parse_depth_raster("1,2\n3"), doctest::Contains("ragged row 1"), DataError);
}

TEST_CASE("parse: empty input rejected") {
    CHECK_THROWS_AS(parse_depth_raster(""), DataError);
    CHECK_THROWS_AS(parse_depth_raster("\n\n"), DataError);
}

TEST_CASE("parse: trailing newline and crlf tolerated") {
    const DepthRaster r = parse_depth_raster("1,2\r\n3,4\r\n");
    CHECK(r.width == 2);
    CHECK(r.height == 2);
    CHECK(r.at(1, 1) == doctest::Approx(4.0f));
}

TEST_CASE("parse: dimensions match input for random well-formed grids") {
    Rng rng(2024);
    for (int iter = 0; iter < 50; ++iter) {
        const int w = 1 + static_cast<int>(rng.next_below(12));
        const int h = 1 + static_cast<int>(rng.next_below(12));
        std::ostringstream os;
        for (int v = 0; v < h; ++v) {
            for (int u = 0; u < w; ++u) {
                if (u) os << ",";
                os << rng.uniform(1.0, 3000.0);
            }
            os << "\n";
        }
        const DepthRaster r = parse_depth_raster(os.str());
        CHECK(r.width == w);
        CHECK(r.height == h);
    }
}

TEST_CASE("csv round trip preserves values and masks") {
    const DepthRaster r = parse_depth_raster("2515,,\n1500.25,0,-4");
    std::ostringstream os;
    write_depth_csv(r, os);
    const DepthRaster back = parse_depth_raster(os.str());
    REQUIRE(back.width == r.width);
    REQUIRE(back.height == r.height);
    for (int v = 0; v < r.height; ++v)
        for (int u = 0; u < r.width; ++u) {
            CHECK(back.is_valid(u, v) == r.is_valid(u, v));
            if (r.is_valid(u, v)) CHECK(back.at(u, v) == doctest::Approx(r.at(u, v)).epsilon(1e-6));
        }
}

TEST_CASE("heightmap: ground-level, mid and below-ground depths") {
    const CameraConfig cam = test_camera();
    const DepthRaster r = parse_depth_raster("2515,1515,3000");
    const HeightMap h = raster_to_heightmap(r, cam);
    CHECK(h.at(0, 0) == 0);                            // exactly on ground
    CHECK(h.at(1, 0) == 101);                          // round(255*1000/2515)
    CHECK(h.at(2, 0) == 0);                            // below ground clamps
    CHECK(h.scale_mm_per_level == doctest::Approx(2515.0 / 255.0));
}

TEST_CASE("heightmap: invalid cells map to gray 0") {
    const DepthRaster r = parse_depth_raster("1000,\n,2000");
    const HeightMap h = raster_to_heightmap(r, test_camera());
    CHECK(h.at(1, 0) == 0);
    CHECK(h.at(0, 1) == 0);
    CHECK(h.at(0, 0) > 0);
}

TEST_CASE("heightmap: gray inversion reconstructs height within half a step") {
    const CameraConfig cam = test_camera();
    Rng rng(77);
    std::ostringstream os;
    for (int v = 0; v < 20; ++v) {
        for (int u = 0; u < 20; ++u) {
            if (u) os << ",";
            os << rng.uniform(cam.ground_distance_mm - cam.height_max_mm + 1.0, cam.ground_distance_mm);
        }
        os << "\n";
    }
    const DepthRaster r = parse_depth_raster(os.str());
    const HeightMap h = raster_to_heightmap(r, cam);
    for (int v = 0; v < r.height; ++v)
        for (int u = 0; u < r.width; ++u) {
            const double truth = cam.ground_distance_mm - r.at(u, v);
            const double rebuilt = h.at(u, v) * h.scale_mm_per_level;
            CHECK(std::abs(rebuilt - truth) <= h.scale_mm_per_level / 2.0 + 0.5);
        }
}

TEST_CASE("pad_center: identity, centered placement, undersized target") {
    HeightMap h;
    h.width = 2;
    h.height = 2;
    h.gray = {10, 20, 30, 40};
    h.scale_mm_per_level = 1.0;

    const PaddedHeightMap same = pad_center(h, 2, 2, 0);
    CHECK(same.offset_x == 0);
    CHECK(same.offset_y == 0);
    CHECK(same.map.gray == h.gray);

    const PaddedHeightMap padded = pad_center(h, 4, 4, 0);
    CHECK(padded.offset_x == 1);
    CHECK(padded.offset_y == 1);
    int zeros = 0;
    for (const auto g : padded.map.gray)
        if (g == 0) ++zeros;
    CHECK(zeros == 12);
    CHECK(padded.map.at(1, 1) == 10);
    CHECK(padded.map.at(2, 2) == 40);

    CHECK_THROWS_AS(pad_center(h, 1, 4, 0), ConfigError);
}

TEST_CASE("pad_center: source pixels preserved, fill elsewhere (random)") {
    Rng rng(5);
    for (int iter = 0; iter < 30; ++iter) {
        HeightMap h;
        h.width = 1 + static_cast<int>(rng.next_below(6));
        h.height = 1 + static_cast<int>(rng.next_below(6));
        h.scale_mm_per_level = 1.0;
        h.gray.resize(static_cast<std::size_t>(h.width) * h.height);
        for (auto& g : h.gray) g = static_cast<std::uint8_t>(1 + rng.next_below(255));
        const int tw = h.width + static_cast<int>(rng.next_below(5));
        const int th = h.height + static_cast<int>(rng.next_below(5));
        const std::uint8_t fill = 0;
        const PaddedHeightMap p = pad_center(h, tw, th, fill);
        for (int v = 0; v < th; ++v)
            for (int u = 0; u < tw; ++u) {
                const int su = u - p.offset_x;
                const int sv = v - p.offset_y;
                if (su >= 0 && su < h.width && sv >= 0 && sv < h.height)
                    CHECK(p.map.at(u, v) == h.at(su, sv));
                else
                    CHECK(p.map.at(u, v) == fill);
            }
    }
}

TEST_CASE("pgm: golden header bytes and byte-exact round trip") {
    HeightMap h;
    h.width = 3;
    h.height = 2;
    h.gray = {0, 128, 255, 7, 9, 11};
    h.scale_mm_per_level = 2515.0 / 255.0;
    std::ostringstream os;
    write_pgm(h, os);
    const std::string blob = os.str();
    const std::string expected_header = "P5\n# mm_per_level=9.8627451\n3 2\n255\n";
    CHECK(blob.substr(0, expected_header.size()) == expected_header);
    CHECK(blob.size() == expected_header.size() + 6);

    std::istringstream in(blob);
    const HeightMap back = read_pgm(in);
    CHECK(back.width == h.width);
    CHECK(back.height == h.height);
    CHECK(back.gray == h.gray);
    CHECK(back.scale_mm_per_level == doctest::Approx(h.scale_mm_per_level));
}

TEST_CASE("pgm: malformed inputs rejected") {
    std::istringstream not_pgm("P2\n1 1\n255\n0");
    CHECK_THROWS_AS(read_pgm(not_pgm), DataError);
    std::istringstream truncated("P5\n2 2\n255\nab");
    CHECK_THROWS_AS(read_pgm(truncated), DataError);
}

TEST_CASE("height field: bilinear interpolation with invalid-neighbor renormalization") {
    const CameraConfig cam = test_camera();
    const DepthRaster r = parse_depth_raster("2315,2215\n2315,");
    const HeightField field(r, cam);
    double h = 0.0;
    REQUIRE(field.sample(0.0, 0.0, h));
    CHECK(h == doctest::Approx(200.0));
    REQUIRE(field.sample(0.5, 0.0, h));
    CHECK(h == doctest::Approx(250.0)); // midpoint of 200 and 300
    // (1, 1) is invalid: sampling at (0.5, 0.5) renormalizes over 3 cells.
    REQUIRE(field.sample(0.5, 0.5, h));
    CHECK(h == doctest::Approx((200.0 + 300.0 + 200.0) / 3.0));
    CHECK_FALSE(field.sample(1.0, 1.0, h));
}
