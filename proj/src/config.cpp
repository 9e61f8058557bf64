#include "bovigeom/config.hpp"

#include "bovigeom/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace bovigeom {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Cuts a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& tok, int line_no) {
    double value = 0.0;
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("toml: bad number '" + tok + "' at line " + std::to_string(line_no));
    return value;
}

TomlValue parse_value(const std::string& raw, int line_no) {
    TomlValue value;
    if (raw.empty())
        throw ConfigError("toml: missing value at line " + std::to_string(line_no));
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw ConfigError("toml: unterminated string at line " + std::to_string(line_no));
        value.data = raw.substr(1, raw.size() - 2);
        return value;
    }
    if (raw == "true" || raw == "false") {
        value.data = (raw == "true");
        return value;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']')
            throw ConfigError("toml: unterminated array at line " + std::to_string(line_no));
        std::vector<double> items;
        std::string body = raw.substr(1, raw.size() - 2);
        std::istringstream bs(body);
        std::string item;
        while (std::getline(bs, item, ',')) {
            item = strip(item);
            if (item.empty()) continue;
            items.push_back(parse_number(item, line_no));
        }
        value.data = std::move(items);
        return value;
    }
    value.data = parse_number(raw, line_no);
    return value;
}

} // namespace

TomlDocument parse_toml(std::istream& in) {
    TomlDocument doc;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = strip(strip_comment(line));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']')
                throw ConfigError("toml: malformed section header at line " + std::to_string(line_no));
            section = strip(content.substr(1, content.size() - 2));
            if (section.empty())
                throw ConfigError("toml: empty section name at line " + std::to_string(line_no));
            doc[section];
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw ConfigError("toml: expected 'key = value' at line " + std::to_string(line_no));
        const std::string key = strip(content.substr(0, eq));
        if (key.empty())
            throw ConfigError("toml: empty key at line " + std::to_string(line_no));
        if (doc[section].count(key))
            throw ConfigError("toml: duplicate key '" + key + "' at line " + std::to_string(line_no));
        doc[section].emplace(key, parse_value(strip(content.substr(eq + 1)), line_no));
    }
    return doc;
}

namespace {

class SectionReader {
public:
    SectionReader(const TomlDocument& doc, const std::string& name) : name_(name) {
        const auto it = doc.find(name);
        if (it != doc.end()) section_ = &it->second;
    }

    bool exists() const { return section_ != nullptr; }

    double number(const std::string& key, double fallback) {
        const TomlValue* v = fetch(key);
        if (v == nullptr) return fallback;
        if (!v->is_number())
            throw ConfigError("config: [" + name_ + "] " + key + " must be a number");
        return std::get<double>(v->data);
    }

    bool boolean(const std::string& key, bool fallback) {
        const TomlValue* v = fetch(key);
        if (v == nullptr) return fallback;
        if (!v->is_bool())
            throw ConfigError("config: [" + name_ + "] " + key + " must be true or false");
        return std::get<bool>(v->data);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const TomlValue* v = fetch(key);
        if (v == nullptr) return fallback;
        if (!v->is_string())
            throw ConfigError("config: [" + name_ + "] " + key + " must be a quoted string");
        return std::get<std::string>(v->data);
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const TomlValue* v = fetch(key);
        if (v == nullptr) return fallback;
        if (!v->is_array())
            throw ConfigError("config: [" + name_ + "] " + key + " must be an array of numbers");
        return std::get<std::vector<double>>(v->data);
    }

    void finish() const {
        if (section_ == nullptr) return;
        for (const auto& [key, value] : *section_)
            if (!touched_.count(key))
                throw ConfigError("config: unknown key '" + key + "' in section [" + name_ + "]");
    }

private:
    const TomlValue* fetch(const std::string& key) {
        touched_.insert(key);
        if (section_ == nullptr) return nullptr;
        const auto it = section_->find(key);
        return it == section_->end() ? nullptr : &it->second;
    }

    std::string name_;
    const TomlSection* section_ = nullptr;
    std::set<std::string> touched_;
};

int round_int(double v, const std::string& what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        throw ConfigError("config: " + what + " must be an integer");
    return static_cast<int>(r);
}

} // namespace

PipelineConfig PipelineConfig::load(std::istream& in) {
    const TomlDocument doc = parse_toml(in);
    const std::set<std::string> known = {"", "camera", "refinement", "features", "convert", "evaluation"};
    for (const auto& [section, _] : doc)
        if (!known.count(section))
            throw ConfigError("config: unknown section [" + section + "]");
    if (doc.count("") && !doc.at("").empty())
        throw ConfigError("config: top-level keys are not allowed; use sections");

    PipelineConfig cfg;

    SectionReader camera(doc, "camera");
    if (!camera.exists())
        throw ConfigError("config: missing required [camera] section");
    cfg.camera.ground_distance_mm = camera.number("ground_distance_mm", 2515.0);
    cfg.camera.fx = camera.number("fx", 0.0);
    cfg.camera.fy = camera.number("fy", 0.0);
    cfg.camera.cx = camera.number("cx", 0.0);
    cfg.camera.cy = camera.number("cy", 0.0);
    cfg.camera.height_max_mm = camera.number("height_max_mm", cfg.camera.ground_distance_mm);
    camera.finish();
    cfg.camera.validate();

    SectionReader refinement(doc, "refinement");
    cfg.refinement.hook_radius = round_int(refinement.number("hook_radius", 30.0), "hook_radius");
    cfg.refinement.pin_radius = round_int(refinement.number("pin_radius", 10.0), "pin_radius");
    refinement.finish();
    cfg.refinement.validate();

    SectionReader features(doc, "features");
    cfg.features.min_profile_samples =
        round_int(features.number("min_profile_samples", 64.0), "min_profile_samples");
    cfg.features.samples_per_spacing = features.number("samples_per_spacing", 2.0);
    cfg.features.r_query_scale = features.number("r_query_scale", 1.5);
    cfg.features.volume_pitch_scale = features.number("volume_pitch_scale", 1.0);
    cfg.features.clamp_negative = features.boolean("clamp_negative", false);
    cfg.features.chord_length_3d = features.boolean("chord_length_3d", false);
    features.finish();
    if (cfg.features.min_profile_samples < 2 || cfg.features.samples_per_spacing <= 0.0 ||
        cfg.features.r_query_scale <= 0.0 || cfg.features.volume_pitch_scale <= 0.0)
        throw ConfigError("config: [features] values must be positive");

    SectionReader convert(doc, "convert");
    cfg.convert.pad_width = round_int(convert.number("pad_width", 0.0), "pad_width");
    cfg.convert.pad_height = round_int(convert.number("pad_height", 0.0), "pad_height");
    cfg.convert.pad_fill = round_int(convert.number("pad_fill", 0.0), "pad_fill");
    convert.finish();
    if (cfg.convert.pad_fill < 0 || cfg.convert.pad_fill > 255)
        throw ConfigError("config: [convert] pad_fill must be 0..255");
    if ((cfg.convert.pad_width != 0) != (cfg.convert.pad_height != 0))
        throw ConfigError("config: [convert] pad_width and pad_height must be set together");

    SectionReader evaluation(doc, "evaluation");
    cfg.evaluation.repeats = round_int(evaluation.number("repeats", 5.0), "repeats");
    const std::vector<double> ratios = evaluation.numbers("ratios", {0.70, 0.15, 0.15});
    cfg.evaluation.grid = evaluation.text("grid", "table1");
    evaluation.finish();
    if (cfg.evaluation.repeats < 1)
        throw ConfigError("config: [evaluation] repeats must be >= 1");
    if (ratios.size() != 3)
        throw ConfigError("config: [evaluation] ratios must have 3 entries");
    std::copy(ratios.begin(), ratios.end(), cfg.evaluation.ratios.begin());
    if (cfg.evaluation.grid != "table1" && cfg.evaluation.grid != "default")
        throw ConfigError("config: [evaluation] grid must be \"table1\" or \"default\"");

    return cfg;
}

PipelineConfig PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    return load(in);
}

} // namespace bovigeom
