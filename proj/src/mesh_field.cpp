#include "isurf/mesh_field.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace isurf {

namespace {

// Closest point on triangle abc (Ericson). `feature` reports where it landed:
// 0/1/2 vertex a/b/c, 3/4/5 edge ab/bc/ca, 6 interior.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                         int& feature) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) {
    feature = 0;
    return a;
  }
  const Vec3 bp = p - b;
  const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) {
    feature = 1;
    return b;
  }
  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    feature = 3;
    const Scalar v = d1 / (d1 - d3);
    return a + v * ab;
  }
  const Vec3 cp = p - c;
  const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) {
    feature = 2;
    return c;
  }
  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    feature = 5;
    const Scalar w = d2 / (d2 - d6);
    return a + w * ac;
  }
  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    feature = 4;
    const Scalar w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }
  feature = 6;
  const Scalar denom = 1.0 / (va + vb + vc);
  const Scalar v = vb * denom, w = vc * denom;
  return a + v * ab + w * ac;
}

Scalar box_sq_distance(const Vec3& lo, const Vec3& hi, const Vec3& p) {
  Scalar d2 = 0;
  for (int a = 0; a < 3; ++a) {
    const Scalar d = std::max({lo[a] - p[a], 0.0, p[a] - hi[a]});
    d2 += d * d;
  }
  return d2;
}

}  // namespace

MeshField::MeshField(Mesh mesh) : ImplicitField(1.0, Signedness::kUnsigned), mesh_(std::move(mesh)) {
  if (mesh_.empty()) throw ParseError("mesh field needs a non-empty mesh");
  build_tree();
  build_pseudonormals();
  set_signedness(watertight_ ? Signedness::kSigned : Signedness::kUnsigned);
}

void MeshField::build_tree() {
  const std::int32_t n = static_cast<std::int32_t>(mesh_.faces.size());
  tri_order_.resize(static_cast<size_t>(n));
  std::iota(tri_order_.begin(), tri_order_.end(), 0);
  nodes_.reserve(static_cast<size_t>(2 * n));
  build_node(0, n);
  // Flat per-leaf triangle storage keeps the query loop off the index chains.
  tri_pack_.resize(static_cast<size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) {
    const auto& f = mesh_.faces[static_cast<size_t>(tri_order_[static_cast<size_t>(i)])];
    tri_pack_[static_cast<size_t>(i)] = {mesh_.vertices[static_cast<size_t>(f[0])],
                                         mesh_.vertices[static_cast<size_t>(f[1])],
                                         mesh_.vertices[static_cast<size_t>(f[2])]};
  }
}

std::int32_t MeshField::build_node(std::int32_t begin, std::int32_t end) {
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({});
  Vec3 lo = Vec3::Constant(std::numeric_limits<Scalar>::infinity());
  Vec3 hi = -lo;
  for (std::int32_t i = begin; i < end; ++i) {
    const auto& f = mesh_.faces[static_cast<size_t>(tri_order_[static_cast<size_t>(i)])];
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh_.vertices[static_cast<size_t>(f[k])];
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  nodes_[static_cast<size_t>(self)].lo = lo;
  nodes_[static_cast<size_t>(self)].hi = hi;
  if (end - begin <= 8) {
    nodes_[static_cast<size_t>(self)].left = begin;
    nodes_[static_cast<size_t>(self)].count = end - begin;
    return self;
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::int32_t mid = (begin + end) / 2;
  auto centroid = [&](std::int32_t t) {
    const auto& f = mesh_.faces[static_cast<size_t>(t)];
    return (mesh_.vertices[static_cast<size_t>(f[0])][axis] +
            mesh_.vertices[static_cast<size_t>(f[1])][axis] +
            mesh_.vertices[static_cast<size_t>(f[2])][axis]);
  };
  std::nth_element(tri_order_.begin() + begin, tri_order_.begin() + mid, tri_order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) { return centroid(a) < centroid(b); });
  const std::int32_t left = build_node(begin, mid);
  const std::int32_t right = build_node(mid, end);
  (void)left;
  nodes_[static_cast<size_t>(self)].left = right;  // left child is self+1 by construction
  nodes_[static_cast<size_t>(self)].count = 0;
  return self;
}

void MeshField::build_pseudonormals() {
  const size_t nf = mesh_.faces.size();
  face_normals_.resize(nf);
  edge_pseudonormals_.assign(nf, {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
  vertex_pseudonormals_.assign(mesh_.vertices.size(), Vec3::Zero());

  std::map<std::pair<int, int>, Vec3> edge_sum;
  std::map<std::pair<int, int>, int> directed_count;
  for (size_t f = 0; f < nf; ++f) {
    const auto& tri = mesh_.faces[f];
    const Vec3& a = mesh_.vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = mesh_.vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = mesh_.vertices[static_cast<size_t>(tri[2])];
    Vec3 n = (b - a).cross(c - a);
    const Scalar len = n.norm();
    face_normals_[f] = len > 0 ? Vec3(n / len) : Vec3::UnitZ();
    const std::array<Vec3, 3> v = {a, b, c};
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k], j = tri[(k + 1) % 3];
      // try_emplace: Eigen's default constructor would leave the coefficients
      // uninitialized under operator[].
      edge_sum.try_emplace({std::min(i, j), std::max(i, j)}, Vec3::Zero()).first->second +=
          face_normals_[f];
      directed_count[{i, j}] += 1;
      // Angle-weighted vertex normal.
      const Vec3 e1 = (v[static_cast<size_t>((k + 1) % 3)] - v[static_cast<size_t>(k)]).normalized();
      const Vec3 e2 = (v[static_cast<size_t>((k + 2) % 3)] - v[static_cast<size_t>(k)]).normalized();
      const Scalar angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
      vertex_pseudonormals_[static_cast<size_t>(tri[k])] += angle * face_normals_[f];
    }
  }
  watertight_ = true;
  for (const auto& [edge, count] : directed_count) {
    if (count != 1 || directed_count.count({edge.second, edge.first}) == 0) {
      watertight_ = false;
      break;
    }
  }
  for (size_t f = 0; f < nf; ++f) {
    const auto& tri = mesh_.faces[f];
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k], j = tri[(k + 1) % 3];
      edge_pseudonormals_[f][static_cast<size_t>(k)] =
          edge_sum.at({std::min(i, j), std::max(i, j)});
    }
  }
}

MeshField::ClosestPoint MeshField::closest_point(const Vec3& p) const {
  ClosestPoint best;
  Scalar best_sq = std::numeric_limits<Scalar>::infinity();
  struct Entry {
    std::int32_t node;
    Scalar dist_sq;
  };
  std::array<Entry, 64> stack;
  int top = 0;
  stack[static_cast<size_t>(top++)] = {0, box_sq_distance(nodes_[0].lo, nodes_[0].hi, p)};
  while (top > 0) {
    const Entry entry = stack[static_cast<size_t>(--top)];
    if (entry.dist_sq >= best_sq) continue;
    const Node& node = nodes_[static_cast<size_t>(entry.node)];
    if (node.count > 0) {
      for (std::int32_t i = node.left; i < node.left + node.count; ++i) {
        const TriPack& tri = tri_pack_[static_cast<size_t>(i)];
        int feature;
        const Vec3 cp = closest_on_triangle(p, tri.a, tri.b, tri.c, feature);
        const Scalar d2 = (p - cp).squaredNorm();
        if (d2 < best_sq) {
          best_sq = d2;
          best.point = cp;
          best.triangle = tri_order_[static_cast<size_t>(i)];
        }
      }
      continue;
    }
    // Visit the nearer child first (push it last).
    const std::int32_t c0 = entry.node + 1;
    const std::int32_t c1 = node.left;
    const Scalar d0 = box_sq_distance(nodes_[static_cast<size_t>(c0)].lo,
                                      nodes_[static_cast<size_t>(c0)].hi, p);
    const Scalar d1 = box_sq_distance(nodes_[static_cast<size_t>(c1)].lo,
                                      nodes_[static_cast<size_t>(c1)].hi, p);
    if (d0 < d1) {
      stack[static_cast<size_t>(top++)] = {c1, d1};
      stack[static_cast<size_t>(top++)] = {c0, d0};
    } else {
      stack[static_cast<size_t>(top++)] = {c0, d0};
      stack[static_cast<size_t>(top++)] = {c1, d1};
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

Scalar MeshField::signed_value(const ClosestPoint& cp, const Vec3& p) const {
  if (!watertight_) return cp.distance;
  const auto& f = mesh_.faces[static_cast<size_t>(cp.triangle)];
  int feature;
  closest_on_triangle(p, mesh_.vertices[static_cast<size_t>(f[0])],
                      mesh_.vertices[static_cast<size_t>(f[1])],
                      mesh_.vertices[static_cast<size_t>(f[2])], feature);
  Vec3 pn;
  if (feature == 6) {
    pn = face_normals_[static_cast<size_t>(cp.triangle)];
  } else if (feature >= 3) {
    pn = edge_pseudonormals_[static_cast<size_t>(cp.triangle)][static_cast<size_t>(feature - 3)];
  } else {
    pn = vertex_pseudonormals_[static_cast<size_t>(f[feature])];
  }
  return (p - cp.point).dot(pn) >= 0 ? cp.distance : -cp.distance;
}

Scalar MeshField::eval_impl(const Vec3& p) const { return signed_value(closest_point(p), p); }

Vec3 MeshField::analytic_gradient(const Vec3& p) const {
  const ClosestPoint cp = closest_point(p);
  const Vec3 d = p - cp.point;
  const Scalar dist = d.norm();
  if (dist < 1e-12) {
    // On the surface the outward face normal is the natural limit.
    return face_normals_[static_cast<size_t>(cp.triangle)];
  }
  if (watertight_ && signed_value(cp, p) < 0) return Vec3(-d / dist);
  return d / dist;
}

std::shared_ptr<MeshField> load_mesh(const std::string& path) {
  return std::make_shared<MeshField>(load_mesh_file(path));
}

}  // namespace isurf
