#pragma once

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

#include "isurf/field.h"
#include "isurf/types.h"

// Analytic field constructors. Sphere/box/torus/plane evaluate the exact
// Euclidean SDF (lambda = 1, negative inside). Min/max compositions keep a
// valid Lipschitz bound (max of the children's) but are not exact SDFs.

namespace isurf {

class SphereField final : public ImplicitField {
 public:
  SphereField(const Vec3& center, Scalar radius)
      : ImplicitField(1.0, Signedness::kSigned), center_(center), radius_(radius) {}

  bool has_analytic_gradient() const override { return true; }
  Vec3 analytic_gradient(const Vec3& p) const override { return (p - center_).normalized(); }

  const Vec3& center() const { return center_; }
  Scalar radius() const { return radius_; }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return (p - center_).norm() - radius_; }

 private:
  Vec3 center_;
  Scalar radius_;
};

// Solid axis-aligned box; the level set is the box surface.
class BoxField final : public ImplicitField {
 public:
  BoxField(const Vec3& center, const Vec3& half_extents)
      : ImplicitField(1.0, Signedness::kSigned), center_(center), half_(half_extents) {}

  bool has_analytic_gradient() const override { return true; }
  Vec3 analytic_gradient(const Vec3& p) const override {
    const Vec3 d = p - center_;
    const Vec3 q = d.cwiseAbs() - half_;
    if ((q.array() > 0).any()) {
      Vec3 g = q.cwiseMax(0.0);
      g = g.cwiseProduct(d.cwiseSign());
      return g.normalized();
    }
    int axis = 0;
    q.maxCoeff(&axis);
    Vec3 g = Vec3::Zero();
    g[axis] = d[axis] >= 0 ? 1.0 : -1.0;
    return g;
  }

 protected:
  Scalar eval_impl(const Vec3& p) const override {
    const Vec3 q = (p - center_).cwiseAbs() - half_;
    const Scalar outside = q.cwiseMax(0.0).norm();
    const Scalar inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
  }

 private:
  Vec3 center_;
  Vec3 half_;
};

// Torus around the z axis through `center`: major radius R (ring), minor
// radius r (tube).
class TorusField final : public ImplicitField {
 public:
  TorusField(const Vec3& center, Scalar major_radius, Scalar minor_radius)
      : ImplicitField(1.0, Signedness::kSigned),
        center_(center),
        major_(major_radius),
        minor_(minor_radius) {}

  bool has_analytic_gradient() const override { return true; }
  Vec3 analytic_gradient(const Vec3& p) const override {
    const Vec3 d = p - center_;
    const Scalar rho = std::hypot(d.x(), d.y());
    const Scalar qx = rho - major_;
    const Scalar qn = std::hypot(qx, d.z());
    // Non-finite on the symmetry axis / tube circle; callers treat that as a
    // degenerate gradient.
    const Scalar gx = (qx / qn) * (d.x() / rho);
    const Scalar gy = (qx / qn) * (d.y() / rho);
    const Scalar gz = d.z() / qn;
    return Vec3(gx, gy, gz);
  }

  Scalar major_radius() const { return major_; }
  Scalar minor_radius() const { return minor_; }

 protected:
  Scalar eval_impl(const Vec3& p) const override {
    const Vec3 d = p - center_;
    const Scalar rho = std::hypot(d.x(), d.y());
    return std::hypot(rho - major_, d.z()) - minor_;
  }

 private:
  Vec3 center_;
  Scalar major_, minor_;
};

// Half-space n.p - offset < 0 is inside; n must be unit length.
class PlaneField final : public ImplicitField {
 public:
  PlaneField(const Vec3& unit_normal, Scalar offset)
      : ImplicitField(1.0, Signedness::kSigned), normal_(unit_normal.normalized()), offset_(offset) {}

  bool has_analytic_gradient() const override { return true; }
  Vec3 analytic_gradient(const Vec3&) const override { return normal_; }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return normal_.dot(p) - offset_; }

 private:
  Vec3 normal_;
  Scalar offset_;
};

// child - delta: shifts the level set outward (delta > 0) or inward.
class OffsetField final : public ImplicitField {
 public:
  OffsetField(FieldPtr child, Scalar delta)
      : ImplicitField(child->lipschitz_bound(), child->signedness()),
        child_(std::move(child)),
        delta_(delta) {}

  bool has_analytic_gradient() const override { return child_->has_analytic_gradient(); }
  Vec3 analytic_gradient(const Vec3& p) const override { return child_->analytic_gradient(p); }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return eval_raw(*child_, p) - delta_; }

 private:
  FieldPtr child_;
  Scalar delta_;
};

// |child|: an unsigned field whose zero set is the child's surface.
class AbsField final : public ImplicitField {
 public:
  explicit AbsField(FieldPtr child)
      : ImplicitField(child->lipschitz_bound(), Signedness::kUnsigned), child_(std::move(child)) {}

  bool has_analytic_gradient() const override { return child_->has_analytic_gradient(); }
  Vec3 analytic_gradient(const Vec3& p) const override {
    const Scalar v = eval_raw(*child_, p);
    const Vec3 g = child_->analytic_gradient(p);
    return v >= 0 ? g : Vec3(-g);
  }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return std::abs(eval_raw(*child_, p)); }

 private:
  FieldPtr child_;
};

class ComplementField final : public ImplicitField {
 public:
  explicit ComplementField(FieldPtr child)
      : ImplicitField(child->lipschitz_bound(), child->signedness()), child_(std::move(child)) {}

  bool has_analytic_gradient() const override { return child_->has_analytic_gradient(); }
  Vec3 analytic_gradient(const Vec3& p) const override { return -child_->analytic_gradient(p); }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return -eval_raw(*child_, p); }

 private:
  FieldPtr child_;
};

namespace detail {
inline Scalar max_child_lipschitz(const std::vector<FieldPtr>& cs) {
  Scalar l = 0;
  for (const auto& c : cs) l = std::max(l, c->lipschitz_bound());
  return l;
}
inline Signedness combined_signedness(const std::vector<FieldPtr>& cs) {
  for (const auto& c : cs)
    if (c->signedness() == Signedness::kUnsigned) return Signedness::kUnsigned;
  return Signedness::kSigned;
}
}  // namespace detail

// min of children. Not an exact SDF, but the Lipschitz bound stays valid.
class UnionField final : public ImplicitField {
 public:
  explicit UnionField(std::vector<FieldPtr> children)
      : ImplicitField(detail::max_child_lipschitz(children), detail::combined_signedness(children)),
        children_(std::move(children)) {}

  bool has_analytic_gradient() const override {
    for (const auto& c : children_)
      if (!c->has_analytic_gradient()) return false;
    return true;
  }
  Vec3 analytic_gradient(const Vec3& p) const override { return arg_extreme(p)->analytic_gradient(p); }

 protected:
  Scalar eval_impl(const Vec3& p) const override {
    Scalar v = eval_raw(*children_.front(), p);
    for (size_t i = 1; i < children_.size(); ++i) v = std::min(v, eval_raw(*children_[i], p));
    return v;
  }

 private:
  const ImplicitField* arg_extreme(const Vec3& p) const {
    const ImplicitField* best = children_.front().get();
    Scalar v = eval_raw(*best, p);
    for (size_t i = 1; i < children_.size(); ++i) {
      const Scalar vi = eval_raw(*children_[i], p);
      if (vi < v) {
        v = vi;
        best = children_[i].get();
      }
    }
    return best;
  }
  std::vector<FieldPtr> children_;
};

// max of children.
class IntersectionField final : public ImplicitField {
 public:
  explicit IntersectionField(std::vector<FieldPtr> children)
      : ImplicitField(detail::max_child_lipschitz(children), detail::combined_signedness(children)),
        children_(std::move(children)) {}

  bool has_analytic_gradient() const override {
    for (const auto& c : children_)
      if (!c->has_analytic_gradient()) return false;
    return true;
  }
  Vec3 analytic_gradient(const Vec3& p) const override { return arg_extreme(p)->analytic_gradient(p); }

 protected:
  Scalar eval_impl(const Vec3& p) const override {
    Scalar v = eval_raw(*children_.front(), p);
    for (size_t i = 1; i < children_.size(); ++i) v = std::max(v, eval_raw(*children_[i], p));
    return v;
  }

 private:
  const ImplicitField* arg_extreme(const Vec3& p) const {
    const ImplicitField* best = children_.front().get();
    Scalar v = eval_raw(*best, p);
    for (size_t i = 1; i < children_.size(); ++i) {
      const Scalar vi = eval_raw(*children_[i], p);
      if (vi > v) {
        v = vi;
        best = children_[i].get();
      }
    }
    return best;
  }
  std::vector<FieldPtr> children_;
};

// Rigid motion plus uniform scale: f(p) = s * child(R^-1 (p - t) / s), which
// preserves both SDF exactness and the Lipschitz bound.
class TransformField final : public ImplicitField {
 public:
  TransformField(FieldPtr child, const Eigen::Quaterniond& rotation, const Vec3& translation,
                 Scalar scale)
      : ImplicitField(child->lipschitz_bound(), child->signedness()),
        child_(std::move(child)),
        inv_rot_(rotation.conjugate()),
        rot_(rotation),
        translation_(translation),
        scale_(scale) {}

  bool has_analytic_gradient() const override { return child_->has_analytic_gradient(); }
  Vec3 analytic_gradient(const Vec3& p) const override {
    return rot_ * child_->analytic_gradient(to_local(p));
  }

 protected:
  Scalar eval_impl(const Vec3& p) const override { return scale_ * eval_raw(*child_, to_local(p)); }

 private:
  Vec3 to_local(const Vec3& p) const { return (inv_rot_ * (p - translation_)) / scale_; }

  FieldPtr child_;
  Eigen::Quaterniond inv_rot_, rot_;
  Vec3 translation_;
  Scalar scale_;
};

inline FieldPtr make_sphere(const Vec3& c, Scalar r) { return std::make_shared<SphereField>(c, r); }
inline FieldPtr make_box(const Vec3& c, const Vec3& h) { return std::make_shared<BoxField>(c, h); }
inline FieldPtr make_torus(const Vec3& c, Scalar R, Scalar r) {
  return std::make_shared<TorusField>(c, R, r);
}
inline FieldPtr make_plane(const Vec3& n, Scalar d) { return std::make_shared<PlaneField>(n, d); }
inline FieldPtr make_offset(FieldPtr child, Scalar delta) {
  return std::make_shared<OffsetField>(std::move(child), delta);
}
inline FieldPtr make_abs(FieldPtr child) { return std::make_shared<AbsField>(std::move(child)); }
inline FieldPtr make_complement(FieldPtr child) {
  return std::make_shared<ComplementField>(std::move(child));
}
inline FieldPtr make_union(std::vector<FieldPtr> children) {
  return std::make_shared<UnionField>(std::move(children));
}
inline FieldPtr make_intersection(std::vector<FieldPtr> children) {
  return std::make_shared<IntersectionField>(std::move(children));
}

}  // namespace isurf
