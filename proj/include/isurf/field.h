#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>

#include "isurf/types.h"

namespace isurf {

// Default finite-difference step: 1e-5 of the default box diagonal (2*sqrt(3)).
inline constexpr Scalar kDefaultGradStep = 3.4641016151377546e-5;

// A scalar field f over R^3 whose zero level set is the surface of interest.
//
// Contract:
//   - |f(p) - f(q)| <= lipschitz_bound() * |p - q| over the sampling domain,
//     which is what lets the tracer take steps of |f|/lambda safely.
//   - Sign convention for signed fields: negative inside, positive outside.
//   - evaluate() bumps eval_count() by exactly one per call; this tally is the
//     efficiency metric reported by every pipeline.
//
// Fields are immutable after construction and safe for concurrent evaluation.
// The counter is a relaxed atomic: it is a statistic, not a synchronization
// point.
class ImplicitField {
 public:
  virtual ~ImplicitField() = default;

  Scalar evaluate(const Vec3& p) const {
    evals_.fetch_add(1, std::memory_order_relaxed);
    const Scalar v = eval_impl(p);
    if (!std::isfinite(v)) throw FieldEvalError(p);
    return v;
  }

  Scalar lipschitz_bound() const { return lipschitz_; }
  Signedness signedness() const { return signedness_; }

  std::uint64_t eval_count() const { return evals_.load(std::memory_order_relaxed); }
  void reset_eval_count() const { evals_.store(0, std::memory_order_relaxed); }

  // Exact gradient where the variant supplies one (not counted as an
  // evaluation; it is not an implicit-function call).
  virtual bool has_analytic_gradient() const { return false; }
  virtual Vec3 analytic_gradient(const Vec3&) const {
    throw std::logic_error("field has no analytic gradient");
  }

 protected:
  ImplicitField(Scalar lipschitz, Signedness sgn) : lipschitz_(lipschitz), signedness_(sgn) {}

  virtual Scalar eval_impl(const Vec3& p) const = 0;

  // Composite nodes evaluate children through this hook so that only the root
  // field's counter advances: one evaluate() call is one evaluation, no matter
  // how deep the expression tree is.
  static Scalar eval_raw(const ImplicitField& f, const Vec3& p) { return f.eval_impl(p); }

  void set_lipschitz(Scalar l) { lipschitz_ = l; }
  void set_signedness(Signedness s) { signedness_ = s; }

 private:
  Scalar lipschitz_;
  Signedness signedness_;
  mutable std::atomic<std::uint64_t> evals_{0};
};

using FieldPtr = std::shared_ptr<const ImplicitField>;

// Wraps an opaque callable. The Lipschitz bound cannot be derived from a black
// box, so the caller must supply it.
class CallableField final : public ImplicitField {
 public:
  CallableField(std::function<Scalar(const Vec3&)> fn, Scalar lipschitz,
                Signedness sgn = Signedness::kSigned)
      : ImplicitField(lipschitz, sgn), fn_(std::move(fn)) {}

 protected:
  Scalar eval_impl(const Vec3& p) const override { return fn_(p); }

 private:
  std::function<Scalar(const Vec3&)> fn_;
};

// Central-difference gradient, 6 evaluations; uses the field's exact gradient
// when available (0 evaluations). Throws DegenerateGradientError when the
// result vanishes or is non-finite.
Vec3 gradient(const ImplicitField& field, const Vec3& p, Scalar h = kDefaultGradStep);

}  // namespace isurf
