#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace isurf {

using Scalar = double;
using Vec3 = Eigen::Vector3d;
using Box3 = Eigen::AlignedBox3d;

// Sampling domain default: the [-1,1]^3 cube.
inline Box3 default_box() { return Box3(Vec3(-1, -1, -1), Vec3(1, 1, 1)); }

inline Scalar box_surface_area(const Box3& b) {
  const Vec3 d = b.diagonal();
  return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
}

inline bool box_is_cube(const Box3& b, Scalar tol = 1e-12) {
  const Vec3 d = b.diagonal();
  return std::abs(d.x() - d.y()) <= tol && std::abs(d.y() - d.z()) <= tol;
}

enum class Signedness { kSigned, kUnsigned };

// Field evaluation produced a non-finite value.
class FieldEvalError : public std::runtime_error {
 public:
  explicit FieldEvalError(const Vec3& p)
      : std::runtime_error("non-finite field value at (" + std::to_string(p.x()) + ", " +
                           std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")"),
        point(p) {}
  Vec3 point;
};

// Gradient vanished where a direction was required; carries the last iterate.
class DegenerateGradientError : public std::runtime_error {
 public:
  explicit DegenerateGradientError(const Vec3& p)
      : std::runtime_error("degenerate gradient"), last_iterate(p) {}
  Vec3 last_iterate;
};

// No ray produced a surface intersection where at least one was required.
class EmptySurfaceError : public std::runtime_error {
 public:
  EmptySurfaceError() : std::runtime_error("no surface intersections found") {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isurf
