#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isurf/ray.h"
#include "isurf/types.h"

namespace isurf {

enum class RayMode {
  kUniform,         // uniform oriented-line measure (direction + plane offset)
  kLowDiscrepancy,  // scrambled Halton (2,3,5,7) over the same 4 dimensions
  kNaiveBiased,     // origin uniform in the volume; intentionally non-uniform
};

enum class BoundingShape { kBox, kSphere };

// Same (mode, seed, index) always reproduces the same ray; generation is a
// pure function of the config and index, so streams can be regenerated or
// split freely.
struct RayStreamConfig {
  RayMode mode = RayMode::kUniform;
  std::uint64_t seed = 0;
  Box3 box = default_box();
  BoundingShape bound = BoundingShape::kBox;
};

// Area of the bounding surface; the moment constants are ratios against it.
Scalar bound_surface_area(const RayStreamConfig& cfg);

// One proposal at `index`. For uniform/naive modes, `index` walks the proposal
// stream and a miss means the offset landed outside the volume's projection
// (callers advance to the next index). Low-discrepancy mode retries misses
// internally with Cranley-Patterson rotations, so index is the ray index and
// the result is always a ray.
std::optional<Ray> sample_ray(const RayStreamConfig& cfg, std::int64_t index);

// Exactly `count` accepted rays with ids dense in [0, count).
std::vector<Ray> uniform_rays(const RayStreamConfig& cfg, std::int64_t count);

// Deterministic component used by sample_ray: builds the ray through
// center + u0*n + u1*b along d, clipped to the bounding volume.
std::optional<Ray> make_plane_ray(const RayStreamConfig& cfg, const Vec3& d, Scalar u0, Scalar u1);

namespace detail {
// Scrambled radical inverse for the low-discrepancy stream.
double scrambled_radical_inverse(std::uint64_t index, int base_index, std::uint64_t seed);
}  // namespace detail

}  // namespace isurf
