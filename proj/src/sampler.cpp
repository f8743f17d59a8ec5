#include "isurf/sampler.h"

#include <algorithm>
#include <cmath>

#include "isurf/parallel.h"
#include "isurf/rng.h"

namespace isurf {

namespace {

constexpr std::int64_t kChunk = 4096;
constexpr std::uint64_t kPickSalt = 0x6b656570ull;
constexpr std::uint64_t kResampleSalt = 0x72736d70ull;
constexpr std::uint64_t kVoxelSalt = 0x766f7831ull;

void append_hit_sample(std::vector<SurfaceSample>& out, const ImplicitField& field,
                       const Hit& hit, std::int64_t ray_id, std::int32_t voxel_id,
                       bool with_normals, std::uint64_t& extra_evals) {
  SurfaceSample s;
  s.point = hit.point;
  s.ray_id = ray_id;
  s.hit_index = hit.hit_index;
  s.voxel_id = voxel_id;
  if (with_normals) {
    try {
      s.normal = gradient(field, hit.point).normalized();
      s.has_normal = true;
    } catch (const DegenerateGradientError&) {
      s.has_normal = false;
    }
    // The finite-difference fallback costs exactly six evaluations; the
    // shared counter cannot be diffed here without racing other chunks.
    extra_evals += field.has_analytic_gradient() ? 0 : 6;
  }
  out.push_back(s);
}

struct ChunkOut {
  std::vector<SurfaceSample> samples;
  std::int64_t hits = 0;
  std::uint64_t evals = 0;
  std::int64_t flagged = 0;
};

enum class Mode { kKeepAll, kKeepOne };

std::vector<ChunkOut> trace_chunks(const ImplicitField& field, const std::vector<Ray>& rays,
                                   const TraceConfig& trace, const SamplerOptions& opts, Mode mode,
                                   std::uint64_t pick_seed) {
  const std::int64_t n = static_cast<std::int64_t>(rays.size());
  const std::int64_t n_chunks = n == 0 ? 0 : (n + kChunk - 1) / kChunk;
  std::vector<ChunkOut> outs(static_cast<size_t>(n_chunks));
  parallel_chunks(n, kChunk, opts.threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    ChunkOut& out = outs[static_cast<size_t>(c)];
    for (std::int64_t i = b; i < e; ++i) {
      const Ray& ray = rays[static_cast<size_t>(i)];
      const TraceResult tr = trace_all(field, ray, trace);
      out.evals += tr.evals;
      out.hits += static_cast<std::int64_t>(tr.hits.size());
      if (tr.terminated == TraceTermination::kMaxSteps) ++out.flagged;
      if (mode == Mode::kKeepAll) {
        for (const Hit& h : tr.hits)
          append_hit_sample(out.samples, field, h, ray.id, -1, opts.with_normals, out.evals);
      } else if (!tr.hits.empty()) {
        CounterRng rng(pick_seed ^ kPickSalt, static_cast<std::uint64_t>(ray.id));
        const auto pick = rng.next_below(tr.hits.size());
        append_hit_sample(out.samples, field, tr.hits[pick], ray.id, -1, opts.with_normals,
                          out.evals);
      }
    }
  });
  return outs;
}

SamplingResult merge_chunks(std::vector<ChunkOut>&& outs, std::int64_t rays, const char* mode,
                            std::uint64_t seed) {
  SamplingResult result;
  std::int64_t total = 0;
  for (const ChunkOut& o : outs) total += static_cast<std::int64_t>(o.samples.size());
  result.samples.reserve(static_cast<size_t>(total));
  for (ChunkOut& o : outs) {
    result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
    result.report.hits += o.hits;
    result.report.evals += o.evals;
    result.report.flagged_rays += o.flagged;
  }
  result.report.rays = rays;
  result.report.samples = static_cast<std::int64_t>(result.samples.size());
  result.report.mode = mode;
  result.report.seed = seed;
  return result;
}

}  // namespace

SamplingResult sample_keep_all(const ImplicitField& field, const RayStreamConfig& stream,
                               const TraceConfig& trace, std::int64_t ray_count,
                               const SamplerOptions& opts) {
  const std::vector<Ray> rays = uniform_rays(stream, ray_count);
  auto outs = trace_chunks(field, rays, trace, opts, Mode::kKeepAll, stream.seed);
  return merge_chunks(std::move(outs), ray_count, "keep-all", stream.seed);
}

SamplingResult sample_keep_one(const ImplicitField& field, const RayStreamConfig& stream,
                               const TraceConfig& trace, std::int64_t ray_count,
                               const SamplerOptions& opts) {
  const std::vector<Ray> rays = uniform_rays(stream, ray_count);
  auto outs = trace_chunks(field, rays, trace, opts, Mode::kKeepOne, stream.seed);
  return merge_chunks(std::move(outs), ray_count, "keep-one", stream.seed);
}

std::vector<std::pair<std::int32_t, std::int32_t>> resample_draws(
    const std::vector<std::int64_t>& hits_per_slot, std::int64_t count, std::uint64_t seed) {
  std::vector<std::int64_t> cumulative(hits_per_slot.size());
  std::int64_t total = 0;
  for (size_t i = 0; i < hits_per_slot.size(); ++i) {
    total += hits_per_slot[i];
    cumulative[i] = total;
  }
  if (total <= 0) throw EmptySurfaceError();
  std::vector<std::pair<std::int32_t, std::int32_t>> draws;
  draws.reserve(static_cast<size_t>(count));
  for (std::int64_t d = 0; d < count; ++d) {
    CounterRng rng(seed ^ kResampleSalt, static_cast<std::uint64_t>(d));
    // Weight proportional to the slot's intersection count, realized through
    // the cumulative array.
    const std::int64_t target =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total)));
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto slot = static_cast<std::int32_t>(it - cumulative.begin());
    const auto hit = static_cast<std::int32_t>(
        rng.next_below(static_cast<std::uint64_t>(hits_per_slot[static_cast<size_t>(slot)])));
    draws.emplace_back(slot, hit);
  }
  return draws;
}

SamplingResult sample_resampled(const ImplicitField& field, const RayStreamConfig& stream,
                                const TraceConfig& trace, std::int64_t ray_count,
                                std::int64_t sample_count, const SamplerOptions& opts) {
  const std::vector<Ray> rays = uniform_rays(stream, ray_count);
  auto outs = trace_chunks(field, rays, trace, opts, Mode::kKeepAll, stream.seed);
  SamplingResult all = merge_chunks(std::move(outs), ray_count, "resample", stream.seed);
  if (all.samples.empty()) throw EmptySurfaceError();

  // Candidate pool grouped by hitting ray; samples are already ordered by
  // (ray, hit).
  std::vector<std::int64_t> offsets;        // start of each hitting ray's hits
  std::vector<std::int64_t> hits_per_ray;   // k_i over hitting rays
  const std::int64_t total = static_cast<std::int64_t>(all.samples.size());
  std::int64_t i = 0;
  while (i < total) {
    std::int64_t j = i;
    while (j < total && all.samples[static_cast<size_t>(j)].ray_id ==
                            all.samples[static_cast<size_t>(i)].ray_id)
      ++j;
    offsets.push_back(i);
    hits_per_ray.push_back(j - i);
    i = j;
  }

  SamplingResult result;
  result.report = all.report;
  result.report.mode = "resample";
  result.report.samples = sample_count;
  result.samples.reserve(static_cast<size_t>(sample_count));
  for (const auto& [slot, hit] : resample_draws(hits_per_ray, sample_count, stream.seed)) {
    const std::int64_t pick = offsets[static_cast<size_t>(slot)] + hit;
    result.samples.push_back(all.samples[static_cast<size_t>(pick)]);
  }
  return result;
}

Box3 VoxelGrid::voxel_bounds(std::int32_t id) const {
  const int r = resolution;
  const int ix = id % r, iy = (id / r) % r, iz = id / (r * r);
  const Vec3 lo = domain.min() + edge * Vec3(ix, iy, iz);
  return Box3(lo, lo + Vec3::Constant(edge));
}

VoxelGrid build_voxels(const ImplicitField& field, const Box3& domain, int resolution) {
  if (resolution < 1) throw std::invalid_argument("voxel resolution must be >= 1");
  if (!box_is_cube(domain, 1e-12 * domain.diagonal().norm() + 1e-300))
    throw std::invalid_argument("voxel stratification requires a cubic domain");
  VoxelGrid grid;
  grid.domain = domain;
  grid.resolution = resolution;
  grid.edge = domain.diagonal().x() / resolution;
  grid.occupancy.assign(static_cast<size_t>(resolution) * resolution * resolution, 0);
  const Scalar band = field.lipschitz_bound() * (std::sqrt(3.0) / 2.0) * grid.edge;
  std::int32_t id = 0;
  for (int iz = 0; iz < resolution; ++iz)
    for (int iy = 0; iy < resolution; ++iy)
      for (int ix = 0; ix < resolution; ++ix, ++id) {
        const Vec3 center = domain.min() + grid.edge * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
        if (std::abs(field.evaluate(center)) <= band) {
          grid.occupancy[static_cast<size_t>(id)] = 1;
          grid.occupied.push_back(id);
        }
      }
  return grid;
}

StratifiedResult sample_stratified(const ImplicitField& field, const VoxelGrid& grid,
                                   const RayStreamConfig& stream, const TraceConfig& trace,
                                   std::int64_t rays_per_voxel, const SamplerOptions& opts) {
  struct VoxelOut {
    std::vector<SurfaceSample> samples;
    VoxelStats stats;
    std::uint64_t evals = 0;
    std::int64_t flagged = 0;
  };
  const std::int64_t n_vox = static_cast<std::int64_t>(grid.occupied.size());
  std::vector<VoxelOut> outs(static_cast<size_t>(n_vox));
  parallel_chunks(n_vox, 1, opts.threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    (void)c;
    for (std::int64_t v = b; v < e; ++v) {
      VoxelOut& out = outs[static_cast<size_t>(v)];
      const std::int32_t vid = grid.occupied[static_cast<size_t>(v)];
      out.stats.voxel_id = vid;
      out.stats.rays = rays_per_voxel;
      RayStreamConfig local = stream;
      local.box = grid.voxel_bounds(vid);
      local.seed = mix_bits(stream.seed ^ (kVoxelSalt + static_cast<std::uint64_t>(vid)));
      const std::vector<Ray> rays = uniform_rays(local, rays_per_voxel);
      for (const Ray& ray : rays) {
        const TraceResult tr = trace_all(field, ray, trace);
        out.evals += tr.evals;
        out.stats.hits += static_cast<std::int64_t>(tr.hits.size());
        out.stats.chord_sum += tr.chord_length();
        if (tr.terminated == TraceTermination::kMaxSteps) ++out.flagged;
        for (const Hit& h : tr.hits)
          append_hit_sample(out.samples, field, h, ray.id, vid, opts.with_normals, out.evals);
      }
    }
  });

  StratifiedResult result;
  for (VoxelOut& o : outs) {
    result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
    result.voxel_stats.push_back(o.stats);
    result.report.hits += o.stats.hits;
    result.report.evals += o.evals;
    result.report.flagged_rays += o.flagged;
  }
  result.report.rays = n_vox * rays_per_voxel;
  result.report.samples = static_cast<std::int64_t>(result.samples.size());
  result.report.mode = "stratified";
  result.report.seed = stream.seed;
  return result;
}

}  // namespace isurf
