#pragma once

#include <string>
#include <vector>

#include "isurf/types.h"

namespace isurf {

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> faces;

  bool empty() const { return vertices.empty() || faces.empty(); }
  Scalar face_area(int f) const {
    const Vec3& a = vertices[static_cast<size_t>(faces[static_cast<size_t>(f)][0])];
    const Vec3& b = vertices[static_cast<size_t>(faces[static_cast<size_t>(f)][1])];
    const Vec3& c = vertices[static_cast<size_t>(faces[static_cast<size_t>(f)][2])];
    return 0.5 * (b - a).cross(c - a).norm();
  }
  Scalar total_area() const {
    Scalar s = 0;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) s += face_area(f);
    return s;
  }
};

// Wavefront OBJ: `v` and `f` records only; polygon faces are fan-triangulated.
Mesh load_obj(const std::string& path);

// PLY, binary little-endian: vertex x/y/z plus triangular faces.
Mesh load_ply(const std::string& path);

// Dispatches on the file extension (.obj / .ply).
Mesh load_mesh_file(const std::string& path);

void save_obj(const std::string& path, const Mesh& mesh);

}  // namespace isurf
