#pragma once

#include <cstdint>
#include <vector>

#include "isurf/field.h"
#include "isurf/ray.h"
#include "isurf/types.h"

namespace isurf {

struct TraceConfig {
  Scalar epsilon = 1e-4;       // |f| < epsilon registers an intersection
  std::int64_t max_steps = 10000;  // evaluation budget per ray
  Scalar lambda = 0;           // <= 0: use the field's own bound
  bool record_steps = false;   // keep every evaluated t (diagnostics)
};

struct Hit {
  Vec3 point = Vec3::Zero();
  Scalar t = 0;
  std::int32_t hit_index = 0;  // ordinal along the ray
  Scalar residual = 0;         // |f(point)|, <= epsilon
};

struct Chord {
  Scalar t_start = 0;
  Scalar t_end = 0;
  Scalar length() const { return t_end - t_start; }
};

enum class TraceTermination { kExitedBox, kMaxSteps };

struct TraceResult {
  std::vector<Hit> hits;      // sorted by strictly increasing t
  std::vector<Chord> chords;  // inside intervals; signed fields only
  std::uint64_t evals = 0;    // field evaluations spent on this ray
  TraceTermination terminated = TraceTermination::kExitedBox;
  std::vector<Scalar> step_ts;  // populated when record_steps is set

  Scalar chord_length() const {
    Scalar s = 0;
    for (const Chord& c : chords) s += c.length();
    return s;
  }
};

// Finds all intersections of the ray with the zero level set by marching from
// t_entry with steps |f|/lambda. When |f| drops below epsilon a hit is
// recorded and the march switches to steps max(|f|, epsilon)/lambda until it
// leaves the epsilon band, then resumes. For signed fields, the interior
// intervals (chords) are recovered by probing the sign of f at the midpoints
// between consecutive events (entry, hits, exit).
TraceResult trace_all(const ImplicitField& field, const Ray& ray, const TraceConfig& cfg);

// x <- x - f(x) grad f(x) / |grad f(x)|^2, `steps` times. One step lands on
// the surface for exact SDFs. Throws DegenerateGradientError (with the last
// iterate attached) if the gradient vanishes.
Vec3 newton_project(const ImplicitField& field, Vec3 p, int steps,
                    Scalar grad_step = kDefaultGradStep);

}  // namespace isurf
