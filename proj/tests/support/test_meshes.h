#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "isurf/mesh.h"

namespace isurf::testing {

// Axis-aligned cube of the given half extent, 12 triangles, outward oriented.
inline Mesh cube_mesh(Scalar half = 0.5) {
  Mesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back(Vec3(i & 1 ? half : -half, i & 2 ? half : -half, i & 4 ? half : -half));
  const int quads[6][4] = {
      {0, 4, 6, 2},  // x = -h
      {1, 3, 7, 5},  // x = +h
      {0, 1, 5, 4},  // y = -h
      {2, 6, 7, 3},  // y = +h
      {0, 2, 3, 1},  // z = -h
      {4, 5, 7, 6},  // z = +h
  };
  for (const auto& q : quads) {
    m.faces.emplace_back(q[0], q[1], q[2]);
    m.faces.emplace_back(q[0], q[2], q[3]);
  }
  return m;
}

// Icosahedron subdivided `subdiv` times and projected to the given radius.
inline Mesh icosphere(int subdiv, Scalar radius = 1.0) {
  const Scalar phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (Vec3& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(verts.size());
      verts.push_back((0.5 * (verts[static_cast<size_t>(a)] + verts[static_cast<size_t>(b)]))
                          .normalized());
      midpoint[key] = idx;
      return idx;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  Mesh m;
  m.vertices = std::move(verts);
  for (Vec3& v : m.vertices) v *= radius;
  m.faces = std::move(faces);
  return m;
}

}  // namespace isurf::testing
