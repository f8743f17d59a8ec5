#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isurf/field.h"
#include "isurf/sampler.h"
#include "isurf/types.h"

namespace isurf {

// Greedy weighted sample elimination: repeatedly remove the sample most
// crowded by its neighbors until `target_count` remain. Neighbor weight is
// (1 - min(d, 2 r_max) / (2 r_max))^8 with r_max = sqrt(area / (2 sqrt(3) N)),
// the packing radius for N points on a surface of the given area. The output
// is a subset of the input, in input order.
std::vector<SurfaceSample> blue_noise_subsample(const std::vector<SurfaceSample>& samples,
                                                std::int64_t target_count, Scalar surface_area);

// Draws `count` samples with replacement with probability proportional to
// `weights` (same length as `samples`). Output density is weight times the
// input density. Throws std::invalid_argument on negative or all-zero weights.
std::vector<SurfaceSample> importance_resample(const std::vector<SurfaceSample>& samples,
                                               const std::vector<Scalar>& weights,
                                               std::int64_t count, std::uint64_t seed);

std::vector<SurfaceSample> importance_resample(
    const std::vector<SurfaceSample>& samples,
    const std::function<Scalar(const SurfaceSample&)>& weight_fn, std::int64_t count,
    std::uint64_t seed);

// Mean curvature of the level set at a near-surface point, for a field with
// unit gradient: H = Laplacian(f) / 2, central differences with step h.
// Positive on convex regions under the negative-inside convention.
Scalar mean_curvature(const ImplicitField& field, const Vec3& p, Scalar h = 1e-3);

}  // namespace isurf
