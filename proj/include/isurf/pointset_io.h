#pragma once

#include <string>
#include <vector>

#include "isurf/sampler.h"
#include "isurf/types.h"

namespace isurf {

// ASCII, one "x y z" per line (normals are not stored).
void write_xyz(const std::string& path, const std::vector<SurfaceSample>& samples);
std::vector<SurfaceSample> read_xyz(const std::string& path);

// Binary little-endian PLY with float x y z and, when every sample carries
// one, nx ny nz.
void write_ply_points(const std::string& path, const std::vector<SurfaceSample>& samples);
std::vector<SurfaceSample> read_ply_points(const std::string& path);

// Dispatch on extension (.xyz / .ply).
void write_points(const std::string& path, const std::vector<SurfaceSample>& samples);
std::vector<SurfaceSample> read_points(const std::string& path);

}  // namespace isurf
