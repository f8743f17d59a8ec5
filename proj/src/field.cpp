#include "isurf/field.h"

#include <cmath>

namespace isurf {

Vec3 gradient(const ImplicitField& field, const Vec3& p, Scalar h) {
  Vec3 g;
  if (field.has_analytic_gradient()) {
    g = field.analytic_gradient(p);
  } else {
    for (int a = 0; a < 3; ++a) {
      Vec3 hi = p, lo = p;
      hi[a] += h;
      lo[a] -= h;
      g[a] = (field.evaluate(hi) - field.evaluate(lo)) / (2 * h);
    }
  }
  if (!g.allFinite() || g.squaredNorm() < 1e-24) throw DegenerateGradientError(p);
  return g;
}

}  // namespace isurf
