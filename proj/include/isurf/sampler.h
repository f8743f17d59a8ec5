#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isurf/field.h"
#include "isurf/ray_gen.h"
#include "isurf/tracer.h"
#include "isurf/types.h"

namespace isurf {

struct SurfaceSample {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  bool has_normal = false;
  std::int64_t ray_id = -1;
  std::int32_t hit_index = -1;
  std::int32_t voxel_id = -1;
};

struct SampleRunReport {
  std::int64_t rays = 0;       // M
  std::int64_t hits = 0;       // K
  std::int64_t samples = 0;    // returned count
  std::uint64_t evals = 0;     // field evaluations spent
  std::int64_t flagged_rays = 0;  // rays that hit the step budget
  std::string mode;
  std::uint64_t seed = 0;
};

struct SamplingResult {
  std::vector<SurfaceSample> samples;
  SampleRunReport report;
};

struct SamplerOptions {
  bool with_normals = false;
  int threads = 1;
};

// Every intersection of every ray becomes a sample; identically distributed
// uniform on the surface (correlations only within a ray).
SamplingResult sample_keep_all(const ImplicitField& field, const RayStreamConfig& stream,
                               const TraceConfig& trace, std::int64_t ray_count,
                               const SamplerOptions& opts = {});

// One uniformly chosen intersection per hitting ray. Deliberately biased on
// non-convex shapes; shipped as a negative control.
SamplingResult sample_keep_one(const ImplicitField& field, const RayStreamConfig& stream,
                               const TraceConfig& trace, std::int64_t ray_count,
                               const SamplerOptions& opts = {});

// Draws `sample_count` rays with replacement with probability proportional to
// their intersection counts, then one uniform intersection per draw.
// Duplicates in the output are expected and kept. Throws EmptySurfaceError if
// no ray hits.
SamplingResult sample_resampled(const ImplicitField& field, const RayStreamConfig& stream,
                                const TraceConfig& trace, std::int64_t ray_count,
                                std::int64_t sample_count, const SamplerOptions& opts = {});

// The resampling draw itself: `count` (slot, hit) pairs where slot is chosen
// with probability proportional to hits_per_slot[slot] and hit is uniform
// below it. Slots with zero hits are never drawn.
std::vector<std::pair<std::int32_t, std::int32_t>> resample_draws(
    const std::vector<std::int64_t>& hits_per_slot, std::int64_t count, std::uint64_t seed);

// Sparse occupancy grid over a cubic domain: a voxel is kept when
// |f(center)| <= lambda * (sqrt(3)/2) * edge, so any voxel containing surface
// is kept (false positives only cost rays).
struct VoxelGrid {
  Box3 domain;
  int resolution = 1;
  Scalar edge = 0;
  std::vector<std::uint8_t> occupancy;   // resolution^3, x-fastest
  std::vector<std::int32_t> occupied;    // ids of occupied voxels, ascending

  Box3 voxel_bounds(std::int32_t id) const;
  Scalar occupied_fraction() const {
    return occupancy.empty() ? 0.0
                             : static_cast<Scalar>(occupied.size()) /
                                   static_cast<Scalar>(occupancy.size());
  }
};

VoxelGrid build_voxels(const ImplicitField& field, const Box3& domain, int resolution);

struct VoxelStats {
  std::int32_t voxel_id = -1;
  std::int64_t rays = 0;
  std::int64_t hits = 0;
  Scalar chord_sum = 0;
};

struct StratifiedResult {
  std::vector<SurfaceSample> samples;
  SampleRunReport report;
  std::vector<VoxelStats> voxel_stats;
};

// Runs the keep-all pipeline independently inside each occupied voxel with the
// voxel as the bounding volume. Equal rays per congruent voxel keeps the
// surface density uniform; per-voxel (M_v, K_v) feed stratified estimators.
StratifiedResult sample_stratified(const ImplicitField& field, const VoxelGrid& grid,
                                   const RayStreamConfig& stream, const TraceConfig& trace,
                                   std::int64_t rays_per_voxel, const SamplerOptions& opts = {});

}  // namespace isurf
