#pragma once

#include <memory>
#include <string>
#include <vector>

#include "isurf/field.h"
#include "isurf/types.h"

namespace isurf {

// Trilinearly interpolated scalar field sampled at the corners of a regular
// grid over `bounds` (dims counts corners per axis, x-fastest storage).
// Outside the bounds the field is evaluated at the clamped coordinate.
//
// The Lipschitz bound is precomputed per cell as the Euclidean combination of
// the per-axis corner-difference slopes, maximized over all cells.
class GridField final : public ImplicitField {
 public:
  GridField(const Eigen::Vector3i& dims, std::vector<float> values, const Box3& bounds,
            Signedness sgn = Signedness::kSigned);

  const Eigen::Vector3i& dims() const { return dims_; }
  const Box3& bounds() const { return bounds_; }
  const std::vector<float>& values() const { return values_; }
  float value_at(int i, int j, int k) const {
    return values_[static_cast<size_t>((k * dims_.y() + j) * dims_.x() + i)];
  }

 protected:
  Scalar eval_impl(const Vec3& p) const override;

 private:
  struct CellRef {
    int i, j, k;
    Scalar fx, fy, fz;  // fractional coordinates in [0,1]
  };
  CellRef locate(const Vec3& p) const;
  Scalar compute_lipschitz() const;

  Eigen::Vector3i dims_;
  std::vector<float> values_;
  Box3 bounds_;
  Vec3 cell_size_;
};

// ISGF: magic "ISGF", u32 nx ny nz, 6x f64 bounding box (min, max), then
// nx*ny*nz little-endian f32 corner values in x-fastest order.
std::shared_ptr<GridField> load_grid(const std::string& path);
void save_grid(const std::string& path, const GridField& grid);

// Samples `field` at the corners of a dims grid over `bounds`.
std::shared_ptr<GridField> bake_grid(const ImplicitField& field, const Eigen::Vector3i& dims,
                                     const Box3& bounds);

}  // namespace isurf
