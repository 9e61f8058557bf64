#pragma once

#include "bovigeom/depth_raster.hpp"
#include "bovigeom/features.hpp"
#include "bovigeom/landmarks.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace bovigeom {

/// Minimal TOML reader covering the config schema: [section] headers,
/// key = value pairs (numbers, booleans, quoted strings, flat numeric
/// arrays) and # comments.
struct TomlValue {
    std::variant<double, bool, std::string, std::vector<double>> data;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<std::vector<double>>(data); }
};

using TomlSection = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlSection>;

TomlDocument parse_toml(std::istream& in);

struct PipelineConfig {
    CameraConfig camera;
    RefinementConfig refinement;
    FeatureParams features;
    struct Convert {
        int pad_width = 0; // 0 = no padding
        int pad_height = 0;
        int pad_fill = 0;
    } convert;
    struct Evaluation {
        int repeats = 5;
        std::array<double, 3> ratios = {0.70, 0.15, 0.15};
        std::string grid = "table1"; // table1 | default
    } evaluation;

    /// Parses and validates; unknown sections or keys are rejected.
    static PipelineConfig load(std::istream& in);
    static PipelineConfig load_file(const std::string& path);
};

} // namespace bovigeom
