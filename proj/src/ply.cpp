#include "bovigeom/ply.hpp"

#include "bovigeom/error.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace bovigeom {

void write_ply(const PointCloud& c, std::ostream& out) {
    out << "ply\n"
        << "format ascii 1.0\n"
        << "element vertex " << c.size() << "\n"
        << "property float x\n"
        << "property float y\n"
        << "property float z\n"
        << "end_header\n";
    char buf[96];
    for (const Vec3& p : c.points) {
        // %.9g is the shortest format that round-trips any float32.
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n",
                      static_cast<double>(static_cast<float>(p.x)),
                      static_cast<double>(static_cast<float>(p.y)),
                      static_cast<double>(static_cast<float>(p.z)));
        out << buf;
    }
}

namespace {

struct PlyProperty {
    std::string name;
    int byte_size = 0;
    bool is_float = false;      // float32
    bool is_double = false;     // float64
};

int scalar_size(const std::string& type) {
    static const std::map<std::string, int> sizes = {
        {"char", 1},  {"int8", 1},   {"uchar", 1},  {"uint8", 1},  {"short", 2},   {"int16", 2},
        {"ushort", 2}, {"uint16", 2}, {"int", 4},    {"int32", 4},  {"uint", 4},    {"uint32", 4},
        {"float", 4}, {"float32", 4}, {"double", 8}, {"float64", 8}};
    const auto it = sizes.find(type);
    return it == sizes.end() ? 0 : it->second;
}

double parse_coord(const std::string& token, int line_no) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw DataError("ply: non-numeric coordinate '" + token + "' at line " + std::to_string(line_no));
    return value;
}

} // namespace

PointCloud read_ply(std::istream& in) {
    std::string line;
    int line_no = 0;
    const auto next_line = [&](std::string& out_line) {
        if (!std::getline(in, out_line)) return false;
        if (!out_line.empty() && out_line.back() == '\r') out_line.pop_back();
        ++line_no;
        return true;
    };

    if (!next_line(line) || line != "ply")
        throw DataError("ply: missing 'ply' magic at line 1");

    bool binary = false;
    std::size_t vertex_count = 0;
    bool in_vertex_element = false;
    bool seen_vertex = false;
    std::vector<PlyProperty> vertex_props;
    bool trailing_elements = false;

    while (true) {
        if (!next_line(line))
            throw DataError("ply: unexpected end of header at line " + std::to_string(line_no));
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment" || word.empty()) continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw DataError("ply: unsupported format '" + fmt + "' at line " + std::to_string(line_no));
            continue;
        }
        if (word == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                vertex_count = count;
                in_vertex_element = true;
                seen_vertex = true;
            } else {
                in_vertex_element = false;
                if (seen_vertex && count > 0) trailing_elements = true;
            }
            continue;
        }
        if (word == "property") {
            if (!in_vertex_element) continue;
            std::string type;
            ls >> type;
            if (type == "list")
                throw DataError("ply: list property on vertex element is unsupported (line " +
                                std::to_string(line_no) + ")");
            PlyProperty prop;
            prop.byte_size = scalar_size(type);
            if (prop.byte_size == 0)
                throw DataError("ply: unknown property type '" + type + "' at line " + std::to_string(line_no));
            prop.is_float = (type == "float" || type == "float32");
            prop.is_double = (type == "double" || type == "float64");
            ls >> prop.name;
            vertex_props.push_back(prop);
            continue;
        }
        if (word == "end_header") break;
        throw DataError("ply: unrecognized header line " + std::to_string(line_no) + ": '" + line + "'");
    }

    if (!seen_vertex)
        throw DataError("ply: header has no vertex element");
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t i = 0; i < vertex_props.size(); ++i) {
        if (vertex_props[i].name == "x") ix = static_cast<int>(i);
        if (vertex_props[i].name == "y") iy = static_cast<int>(i);
        if (vertex_props[i].name == "z") iz = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw DataError("ply: vertex element lacks x/y/z properties");

    PointCloud c;
    c.points.reserve(vertex_count);

    if (!binary) {
        for (std::size_t n = 0; n < vertex_count; ++n) {
            if (!next_line(line))
                throw DataError("ply: vertex count says " + std::to_string(vertex_count) + " but body ends after " +
                                std::to_string(n) + " vertices (line " + std::to_string(line_no) + ")");
            std::istringstream ls(line);
            std::vector<std::string> tokens;
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (tokens.size() != vertex_props.size())
                throw DataError("ply: expected " + std::to_string(vertex_props.size()) + " values at line " +
                                std::to_string(line_no) + ", got " + std::to_string(tokens.size()));
            // float32 properties snap to the nearest float so that
            // write -> read is exact.
            const auto coord = [&](int prop) {
                const double v = parse_coord(tokens[prop], line_no);
                return vertex_props[prop].is_float ? static_cast<double>(static_cast<float>(v)) : v;
            };
            c.points.push_back({coord(ix), coord(iy), coord(iz)});
        }
    } else {
        std::size_t stride = 0;
        for (const auto& p : vertex_props) stride += static_cast<std::size_t>(p.byte_size);
        std::vector<char> row(stride);
        for (std::size_t n = 0; n < vertex_count; ++n) {
            in.read(row.data(), static_cast<std::streamsize>(stride));
            if (in.gcount() != static_cast<std::streamsize>(stride))
                throw DataError("ply: binary body truncated at vertex " + std::to_string(n));
            const auto read_at = [&](int prop_index) -> double {
                std::size_t off = 0;
                for (int i = 0; i < prop_index; ++i) off += static_cast<std::size_t>(vertex_props[i].byte_size);
                const PlyProperty& p = vertex_props[prop_index];
                if (p.is_float) {
                    float f;
                    std::memcpy(&f, row.data() + off, 4);
                    return static_cast<double>(f);
                }
                if (p.is_double) {
                    double d;
                    std::memcpy(&d, row.data() + off, 8);
                    return d;
                }
                throw DataError("ply: coordinate property '" + p.name + "' must be float or double");
            };
            c.points.push_back({read_at(ix), read_at(iy), read_at(iz)});
        }
        if (trailing_elements)
            throw DataError("ply: binary elements after vertex data are unsupported");
    }
    return c;
}

} // namespace bovigeom
