#include "isurf/tracer.h"

#include <cmath>

namespace isurf {

TraceResult trace_all(const ImplicitField& field, const Ray& ray, const TraceConfig& cfg) {
  TraceResult out;
  const Scalar lambda = cfg.lambda > 0 ? cfg.lambda : field.lipschitz_bound();
  const Scalar eps = cfg.epsilon;
  Scalar t = ray.t_entry;
  const Scalar t_end = ray.t_exit;
  std::int64_t steps = 0;

  auto eval_at = [&](Scalar tt) {
    ++out.evals;
    ++steps;
    if (cfg.record_steps) out.step_ts.push_back(tt);
    return field.evaluate(ray.at(tt));
  };

  if (t <= t_end) {
    Scalar s = std::abs(eval_at(t));
    bool in_box = true;
    while (in_box) {
      if (s < eps) {
        Hit hit;
        hit.point = ray.at(t);
        hit.t = t;
        hit.hit_index = static_cast<std::int32_t>(out.hits.size());
        hit.residual = s;
        out.hits.push_back(hit);
        // Escape phase: leave the epsilon band before looking for the next
        // intersection.
        while (s < eps) {
          if (steps >= cfg.max_steps) {
            out.terminated = TraceTermination::kMaxSteps;
            in_box = false;
            break;
          }
          t += std::max(s, eps) / lambda;
          if (t > t_end) {
            in_box = false;
            break;
          }
          s = std::abs(eval_at(t));
        }
        continue;
      }
      if (steps >= cfg.max_steps) {
        out.terminated = TraceTermination::kMaxSteps;
        break;
      }
      t += s / lambda;
      if (t > t_end) break;
      s = std::abs(eval_at(t));
    }
  }

  // Inside intervals from midpoint sign probes. Only meaningful for signed
  // fields and complete traces.
  if (field.signedness() == Signedness::kSigned &&
      out.terminated == TraceTermination::kExitedBox) {
    Scalar prev = ray.t_entry;
    auto probe = [&](Scalar a, Scalar b) {
      if (b - a <= 1e-12) return;
      ++out.evals;
      const Scalar mid = field.evaluate(ray.at(0.5 * (a + b)));
      if (mid < 0) out.chords.push_back({a, b});
    };
    for (const Hit& h : out.hits) {
      probe(prev, h.t);
      prev = h.t;
    }
    probe(prev, ray.t_exit);
  }
  return out;
}

Vec3 newton_project(const ImplicitField& field, Vec3 p, int steps, Scalar grad_step) {
  for (int i = 0; i < steps; ++i) {
    const Scalar v = field.evaluate(p);
    Vec3 g;
    try {
      g = gradient(field, p, grad_step);
    } catch (const DegenerateGradientError&) {
      throw DegenerateGradientError(p);
    }
    p -= (v / g.squaredNorm()) * g;
  }
  return p;
}

}  // namespace isurf
