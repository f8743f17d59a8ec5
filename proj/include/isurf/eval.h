#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "isurf/field.h"
#include "isurf/mesh.h"
#include "isurf/sampler.h"
#include "isurf/types.h"

namespace isurf {

// Disjoint decomposition of a surface with known patch areas, used to score
// sample uniformity.
struct SurfacePartition {
  std::vector<Scalar> areas;
  Scalar total_area = 0;
  std::function<int(const Vec3&)> classify;          // patch id (always total)
  std::function<Scalar(const Vec3&)> surface_distance;  // for off-surface checks
};

// Toroidal grid of nu x nv patches on the z-axis torus (major R, minor r).
// Patch areas are exact: A(cell) = r * du * (R * dv + r * (sin v1 - sin v0)).
SurfacePartition torus_partition(Scalar R, Scalar r, int nu, int nv,
                                 const Vec3& center = Vec3::Zero());

// One patch per triangle; classification by closest triangle.
SurfacePartition mesh_partition(const Mesh& mesh);

struct TvResult {
  Scalar tv = 0;                    // 1/2 sum_i |n_i/N - A_i/A_total|
  std::int64_t classified = 0;      // N
  std::int64_t unclassified = 0;    // off-surface beyond tolerance; excluded
};

// Total variation between the per-patch sample fractions and area fractions.
// Samples farther than `max_surface_dist` from the surface are reported and
// excluded.
TvResult tv_score(const std::vector<SurfaceSample>& samples, const SurfacePartition& partition,
                  Scalar max_surface_dist = 1e-3);

// Area-weighted triangle choice plus uniform barycentric point (sqrt trick).
std::vector<SurfaceSample> ground_truth_mesh_sampler(const Mesh& mesh, std::int64_t count,
                                                     std::uint64_t seed);

// Analytic uniform torus sampler (inverse-CDF in the tube angle).
std::vector<SurfaceSample> torus_uniform_samples(Scalar R, Scalar r, std::int64_t count,
                                                 std::uint64_t seed,
                                                 const Vec3& center = Vec3::Zero());

class RejectionFailureError : public std::runtime_error {
 public:
  RejectionFailureError() : std::runtime_error("rejection sampling found no surface band") {}
};

struct RejectionResult {
  std::vector<SurfaceSample> samples;
  std::uint64_t evals = 0;
  std::int64_t trials = 0;
};

// Baseline: uniform points in the box kept when |f| < band, then projected
// with `newton_steps` Newton iterations. Evaluations (including any
// finite-difference gradients) come from the field counter. Throws
// RejectionFailureError when `max_trials` proposals yield nothing.
RejectionResult rejection_baseline(const ImplicitField& field, const Box3& box,
                                   std::int64_t count, Scalar band, std::uint64_t seed,
                                   int newton_steps = 5, std::int64_t max_trials = 100000000);

enum class EvalMethod { kOurs, kRejection, kGroundTruth };

const char* eval_method_name(EvalMethod m);

struct EvalRow {
  std::string method;
  std::string shape;
  std::int64_t samples = 0;
  Scalar tv = 0;
  std::uint64_t evals = 0;
  std::uint64_t seed = 0;
};

struct EvalCaseConfig {
  std::string shape_name;
  const ImplicitField* field = nullptr;     // for ours / rejection
  const Mesh* mesh = nullptr;               // for ground truth
  const SurfacePartition* partition = nullptr;
  std::function<std::vector<SurfaceSample>(std::int64_t, std::uint64_t)> analytic_sampler;
  Box3 box = default_box();
  Scalar epsilon = 1e-4;
  Scalar rejection_band = 1e-3;
  Scalar classify_tolerance = 1e-3;
};

// One comparison run; `ours` casts rays in fixed batches until the pool holds
// `count` samples and trims to exactly `count`.
EvalRow run_eval_method(const EvalCaseConfig& cfg, EvalMethod method, std::int64_t count,
                        std::uint64_t seed, int threads = 1);

void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows);

}  // namespace isurf
