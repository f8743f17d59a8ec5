#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isurf/field.h"
#include "isurf/ray_gen.h"
#include "isurf/sampler.h"
#include "isurf/tracer.h"
#include "isurf/types.h"

namespace isurf {

// Monte Carlo shape-quantity estimates from ray/intersection statistics.
//
// With rays drawn uniformly against a convex bounding surface of area A_b,
//   E[hits per ray]  = 2 A / A_b      => area   = (A_b / 2) * K / M
//   E[chord per ray] = 4 V / A_b      => volume = (A_b / 4) * sum(sigma) / M
// For the default [-1,1]^3 cube A_b = 24, giving the familiar constants 12
// and 6. Standard errors come from per-ray sample variance: rays are i.i.d.
// even though intersections within a ray are not.
struct EstimatorReport {
  Scalar area = 0, area_se = 0;
  bool has_volume = false;
  Scalar volume = 0, volume_se = 0;
  bool has_shell_centroid = false;
  Vec3 shell_centroid = Vec3::Zero(), shell_centroid_se = Vec3::Zero();
  bool has_solid_centroid = false;
  Vec3 solid_centroid = Vec3::Zero(), solid_centroid_se = Vec3::Zero();
  Scalar mean_chord_hitting = 0;  // over rays that pass through the solid
  std::int64_t chord_rays = 0;
  std::int64_t rays = 0, hits = 0;
  std::uint64_t evals = 0;
  std::int64_t flagged_rays = 0;
};

Scalar area_from_counts(std::int64_t hits, std::int64_t rays, Scalar bound_area);
Scalar volume_from_chords(Scalar chord_sum, std::int64_t rays, Scalar bound_area);

// Compensated (Neumaier) accumulator so reductions stay stable and chunked
// parallel runs merge deterministically in chunk order.
class KahanSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.sum_);
    comp_ += o.comp_;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0, comp_ = 0;
};

class MomentAccumulator {
 public:
  explicit MomentAccumulator(Scalar bound_area) : bound_area_(bound_area) {}

  void add(const Ray& ray, const TraceResult& tr);
  void merge(const MomentAccumulator& other);
  EstimatorReport report(Signedness sgn) const;

 private:
  Scalar bound_area_;
  std::int64_t rays_ = 0, hits_ = 0, chord_rays_ = 0, flagged_ = 0;
  std::uint64_t evals_ = 0;
  KahanSum k2_, sigma_, sigma2_;
  KahanSum x_[3], x2_[3], xk_[3];
  KahanSum t_[3], t2_[3], tsig_[3];
};

// One-pass estimate over `ray_count` rays from the stream.
EstimatorReport estimate_moments(const ImplicitField& field, const RayStreamConfig& stream,
                                 const TraceConfig& trace, std::int64_t ray_count, int threads = 1);

// Per-voxel stratified variant: equal rays per occupied voxel, estimates
// summed across strata (area of voxel box = 6 s^2, so A = sum 3 s^2 K_v/M_v).
EstimatorReport estimate_moments_stratified(const ImplicitField& field, const VoxelGrid& grid,
                                            const RayStreamConfig& stream,
                                            const TraceConfig& trace,
                                            std::int64_t rays_per_voxel, int threads = 1);

std::string estimator_report_json(const EstimatorReport& report);

struct ConvergenceRow {
  std::int64_t rays = 0;
  Scalar estimate = 0;
  Scalar stderr_ = 0;
};
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace isurf
