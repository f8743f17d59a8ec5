#pragma once

// Independent closed-form references used to freeze expected values. These
// deliberately avoid the library's tracing path: sphere and torus hits come
// from polynomial root finding, mesh distances from a brute-force scan.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "isurf/mesh.h"
#include "isurf/ray.h"
#include "isurf/types.h"

namespace isurf::testing {

// Real roots of sum_i c[i] t^i via the companion matrix; leading zeros are
// trimmed. Roots with |imag| below `imag_tol` count as real.
inline std::vector<Scalar> real_roots(std::vector<Scalar> c, Scalar imag_tol = 1e-8) {
  while (c.size() > 1 && std::abs(c.back()) < 1e-14) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<Scalar> roots;
  if (n < 1) return roots;
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    companion(i, n - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(n)];
    if (i > 0) companion(i, i - 1) = 1.0;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  for (int i = 0; i < n; ++i) {
    const auto z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) < imag_tol) roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Intersections of origin + t*dir (unit dir) with the sphere |p - c| = r,
// restricted to [t0, t1].
inline std::vector<Scalar> sphere_line_hits(const Vec3& origin, const Vec3& dir, const Vec3& center,
                                            Scalar r, Scalar t0, Scalar t1) {
  const Vec3 oc = origin - center;
  const Scalar b = oc.dot(dir);
  const Scalar disc = b * b - (oc.squaredNorm() - r * r);
  std::vector<Scalar> hits;
  if (disc < 0) return hits;
  const Scalar root = std::sqrt(disc);
  for (Scalar t : {-b - root, -b + root})
    if (t >= t0 && t <= t1) hits.push_back(t);
  return hits;
}

// Intersections with the z-axis torus (x^2+y^2+z^2+R^2-r^2)^2 = 4R^2(x^2+y^2)
// inside [t0, t1], by quartic solve.
inline std::vector<Scalar> torus_line_hits(const Vec3& origin, const Vec3& dir, Scalar R, Scalar r,
                                           Scalar t0, Scalar t1) {
  // q(t) = t^2 + 2 (o.d) t + |o|^2 + R^2 - r^2  (unit direction)
  const Scalar qb = 2.0 * origin.dot(dir);
  const Scalar qc = origin.squaredNorm() + R * R - r * r;
  // q(t)^2
  std::vector<Scalar> poly(5, 0.0);
  poly[4] = 1.0;
  poly[3] = 2.0 * qb;
  poly[2] = qb * qb + 2.0 * qc;
  poly[1] = 2.0 * qb * qc;
  poly[0] = qc * qc;
  // minus 4 R^2 ((ox + t dx)^2 + (oy + t dy)^2)
  const Scalar a2 = dir.x() * dir.x() + dir.y() * dir.y();
  const Scalar a1 = 2.0 * (origin.x() * dir.x() + origin.y() * dir.y());
  const Scalar a0 = origin.x() * origin.x() + origin.y() * origin.y();
  poly[2] -= 4.0 * R * R * a2;
  poly[1] -= 4.0 * R * R * a1;
  poly[0] -= 4.0 * R * R * a0;
  std::vector<Scalar> hits;
  for (Scalar t : real_roots(poly))
    if (t >= t0 && t <= t1) hits.push_back(t);
  // Deduplicate double roots reported twice by the eigensolver.
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](Scalar a, Scalar b) { return std::abs(a - b) < 1e-10; }),
             hits.end());
  return hits;
}

inline Scalar point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return (p - a).norm();
  const Vec3 bp = p - b;
  const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return (p - b).norm();
  if (d1 * d4 - d3 * d2 <= 0 && d1 >= 0 && d3 <= 0)
    return (p - (a + (d1 / (d1 - d3)) * ab)).norm();
  const Vec3 cp = p - c;
  const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return (p - c).norm();
  if (d5 * d2 - d1 * d6 <= 0 && d2 >= 0 && d6 <= 0)
    return (p - (a + (d2 / (d2 - d6)) * ac)).norm();
  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0)
    return (p - (b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b))).norm();
  const Vec3 n = ab.cross(ac).normalized();
  return std::abs(n.dot(ap));
}

// Brute-force unsigned distance to a mesh: minimum over every triangle.
inline Scalar brute_mesh_distance(const Vec3& p, const Mesh& mesh) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& f : mesh.faces)
    best = std::min(best, point_triangle_distance(p, mesh.vertices[static_cast<size_t>(f[0])],
                                                  mesh.vertices[static_cast<size_t>(f[1])],
                                                  mesh.vertices[static_cast<size_t>(f[2])]));
  return best;
}

}  // namespace isurf::testing
