#pragma once

#include "bovigeom/point_cloud.hpp"

#include <iosfwd>

namespace bovigeom {

/// ASCII PLY with float x/y/z properties and a fixed header layout.
/// Coordinates round-trip through 32-bit floats.
void write_ply(const PointCloud& c, std::ostream& out);

/// Reads ASCII or binary_little_endian PLY. The vertex element must carry
/// scalar x/y/z properties; other scalar properties are skipped.
PointCloud read_ply(std::istream& in);

} // namespace bovigeom
