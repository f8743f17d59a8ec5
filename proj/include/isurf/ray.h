#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "isurf/types.h"

namespace isurf {

// An oriented line clipped to the bounding volume: origin + t * dir is inside
// for t in (t_entry, t_exit). The origin lies on the offset plane through the
// volume's center, so t_entry is typically negative.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::UnitZ();
  Scalar t_entry = 0;
  Scalar t_exit = 0;
  std::int64_t id = -1;

  Vec3 at(Scalar t) const { return origin + t * dir; }
};

// Stable branchless orthonormal basis: (n, b, d) is right-handed (n x b = d)
// and a deterministic function of d alone.
inline void orthonormal_frame(const Vec3& d, Vec3& n, Vec3& b) {
  const Scalar s = std::copysign(1.0, d.z());
  const Scalar a = -1.0 / (s + d.z());
  const Scalar c = d.x() * d.y() * a;
  n = Vec3(1.0 + s * d.x() * d.x() * a, s * c, -s * d.x());
  b = Vec3(c, s + d.y() * d.y() * a, -d.y());
}

// Slab test for the full line (t may be negative). Returns false on a miss.
inline bool clip_line_to_box(const Vec3& origin, const Vec3& dir, const Box3& box, Scalar& t0,
                             Scalar& t1) {
  t0 = -std::numeric_limits<Scalar>::infinity();
  t1 = std::numeric_limits<Scalar>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-300) {
      if (origin[a] < box.min()[a] || origin[a] > box.max()[a]) return false;
      continue;
    }
    const Scalar inv = 1.0 / dir[a];
    Scalar ta = (box.min()[a] - origin[a]) * inv;
    Scalar tb = (box.max()[a] - origin[a]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return std::isfinite(t0) && std::isfinite(t1);
}

// Line/sphere clip (bounding-sphere fast path).
inline bool clip_line_to_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center,
                                Scalar radius, Scalar& t0, Scalar& t1) {
  const Vec3 oc = origin - center;
  const Scalar b = oc.dot(dir);
  const Scalar c = oc.squaredNorm() - radius * radius;
  const Scalar disc = b * b - c;
  if (disc < 0) return false;
  const Scalar root = std::sqrt(disc);
  t0 = -b - root;
  t1 = -b + root;
  return true;
}

}  // namespace isurf
