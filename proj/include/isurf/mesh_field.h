#pragma once

#include <memory>
#include <vector>

#include "isurf/field.h"
#include "isurf/mesh.h"
#include "isurf/types.h"

namespace isurf {

// Distance field of a triangle mesh via an AABB tree over the faces
// (lambda = 1). Watertight, consistently oriented input gets a sign from the
// angle-weighted pseudonormal of the closest feature; anything else falls back
// to unsigned distance.
class MeshField final : public ImplicitField {
 public:
  explicit MeshField(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  bool watertight() const { return watertight_; }

  struct ClosestPoint {
    Vec3 point = Vec3::Zero();
    Scalar distance = 0;
    int triangle = -1;
  };
  ClosestPoint closest_point(const Vec3& p) const;

  bool has_analytic_gradient() const override { return true; }
  Vec3 analytic_gradient(const Vec3& p) const override;

 protected:
  Scalar eval_impl(const Vec3& p) const override;

 private:
  struct Node {
    Vec3 lo, hi;
    std::int32_t left = -1;   // internal: child index; leaf: first triangle
    std::int32_t count = 0;   // 0 for internal nodes
  };

  struct TriPack {
    Vec3 a, b, c;
  };

  void build_tree();
  std::int32_t build_node(std::int32_t begin, std::int32_t end);
  void build_pseudonormals();
  Scalar signed_value(const ClosestPoint& cp, const Vec3& p) const;

  Mesh mesh_;
  bool watertight_ = false;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> tri_order_;
  std::vector<TriPack> tri_pack_;
  std::vector<Vec3> face_normals_;
  std::vector<Vec3> vertex_pseudonormals_;
  // Edge pseudonormals keyed per (face, corner) for the edge opposite corner
  // ordering (v[corner], v[corner+1]).
  std::vector<std::array<Vec3, 3>> edge_pseudonormals_;
};

std::shared_ptr<MeshField> load_mesh(const std::string& path);

}  // namespace isurf
