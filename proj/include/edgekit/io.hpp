#pragma once

#include <string>
#include <vector>

#include "edgekit/types.hpp"

namespace edgekit {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// Reads ascii or binary_little_endian PLY. Positions come from float or
// double x,y,z vertex properties (always stored as float64 internally); an
// integer vertex property named `label` or `class` (case-insensitive), when
// present, populates labels. Label 3 folds into 0, anything else outside
// {0,1,2} is rejected. Malformed input throws ParseError with a line/byte
// location; big-endian files are rejected.
PointCloud read_ply(const std::string& path);

// Whitespace-separated "x y z" or "x y z label" lines. Blank lines and lines
// starting with '#' are skipped. Column count must be consistent.
PointCloud read_xyz(const std::string& path);

// Writes x,y,z (float64) plus a uchar `label` property when the cloud is
// labeled. Binary little-endian round-trips positions bit-exactly.
void write_ply(const PointCloud& cloud, const std::string& path,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

// Classification output: x,y,z,red,green,blue,label per vertex.
// Colors: non-edge (128,128,128), sharp-edge (255,0,0), boundary (0,255,0).
void write_classified_ply(const PointCloud& cloud,
                          const std::vector<std::uint8_t>& predictions,
                          const std::string& path,
                          PlyFormat format = PlyFormat::BinaryLittleEndian);

// Writes `contents` to `path` via a temporary file and atomic rename, so a
// failure never leaves a partial output behind.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace edgekit
