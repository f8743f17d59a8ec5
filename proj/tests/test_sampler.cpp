#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "isurf/eval.h"
#include "isurf/moments.h"
#include "isurf/pointset_io.h"
#include "isurf/primitives.h"
#include "isurf/sampler.h"

using namespace isurf;

namespace {

RayStreamConfig stream_with_seed(std::uint64_t seed) {
  RayStreamConfig cfg;
  cfg.seed = seed;
  return cfg;
}

bool same_samples(const std::vector<SurfaceSample>& a, const std::vector<SurfaceSample>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].point != b[i].point || a[i].ray_id != b[i].ray_id ||
        a[i].hit_index != b[i].hit_index || a[i].voxel_id != b[i].voxel_id)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("keep-all hit rate reproduces the sphere area ratio") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const auto [samples, report] =
      sample_keep_all(sphere, stream_with_seed(1), TraceConfig{}, 1000000);
  CHECK(report.rays == 1000000);
  CHECK(report.samples == report.hits);
  CHECK(std::abs(static_cast<Scalar>(report.hits) / static_cast<Scalar>(report.rays) -
                 std::numbers::pi / 12.0) < 0.002);
  CHECK(report.flagged_rays == 0);
  // Every sample lies in the epsilon band.
  for (size_t i = 0; i < samples.size(); i += 997)
    CHECK(std::abs(sphere.evaluate(samples[i].point)) <= 1e-4);
}

TEST_CASE("an empty level set produces zero samples without error") {
  const CallableField empty([](const Vec3&) { return 1.0; }, 1.0);
  const auto [samples, report] = sample_keep_all(empty, stream_with_seed(2), TraceConfig{}, 5000);
  CHECK(samples.empty());
  CHECK(report.hits == 0);
  CHECK(report.evals > 0);
}

TEST_CASE("keep-all report evals match the field counter, threads included") {
  const FieldPtr shells = make_union(
      {make_abs(make_sphere(Vec3::Zero(), 0.3)), make_abs(make_sphere(Vec3::Zero(), 0.6))});
  shells->reset_eval_count();
  SamplerOptions opts;
  opts.threads = 2;
  const auto [samples, report] =
      sample_keep_all(*shells, stream_with_seed(3), TraceConfig{}, 20000, opts);
  CHECK(report.evals == shells->eval_count());
  CHECK(report.samples > 0);
}

TEST_CASE("sampling is deterministic across thread counts") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  SamplerOptions one;
  one.threads = 1;
  SamplerOptions four;
  four.threads = 4;
  const auto a = sample_keep_all(sphere, stream_with_seed(4), TraceConfig{}, 30000, one);
  const auto b = sample_keep_all(sphere, stream_with_seed(4), TraceConfig{}, 30000, four);
  CHECK(same_samples(a.samples, b.samples));
  CHECK(a.report.evals == b.report.evals);
  CHECK(a.report.hits == b.report.hits);
}

TEST_CASE("keep-one returns one sample per hitting ray") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const auto [samples, report] = sample_keep_one(sphere, stream_with_seed(5), TraceConfig{}, 50000);
  CHECK(report.mode == "keep-one");
  std::set<std::int64_t> rays_seen;
  for (const SurfaceSample& s : samples) {
    CHECK(rays_seen.insert(s.ray_id).second);
    CHECK(s.hit_index >= 0);
  }
  CHECK(static_cast<std::int64_t>(samples.size()) < report.hits);
  const auto empty = sample_keep_one(sphere, stream_with_seed(5), TraceConfig{}, 0);
  CHECK(empty.samples.empty());
}

TEST_CASE("keep-one is unbiased on a convex body (every ray has two hits)") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  SurfacePartition octants;
  octants.areas.assign(8, std::numbers::pi / 8);
  octants.total_area = std::numbers::pi;
  octants.classify = [](const Vec3& p) {
    return (p.x() > 0 ? 1 : 0) | (p.y() > 0 ? 2 : 0) | (p.z() > 0 ? 4 : 0);
  };
  octants.surface_distance = [](const Vec3& p) { return std::abs(p.norm() - 0.5); };
  // Equal sample counts: keep-one yields half as many samples per ray.
  const auto all = sample_keep_all(sphere, stream_with_seed(30), TraceConfig{}, 40000);
  const auto one = sample_keep_one(sphere, stream_with_seed(31), TraceConfig{}, 80000);
  const Scalar tv_all = tv_score(all.samples, octants).tv;
  const Scalar tv_one = tv_score(one.samples, octants).tv;
  CHECK(tv_one < 2.5 * tv_all);  // both at the noise floor, no bias term
  CHECK(tv_one < 0.03);
}

TEST_CASE("resample draws follow the intersection-count weights") {
  // Two candidate rays with 1 and 3 intersections.
  const auto draws = resample_draws({1, 3}, 400000, 9);
  std::int64_t second = 0;
  for (const auto& [slot, hit] : draws) {
    if (slot == 1) {
      ++second;
      CHECK(hit < 3);
    } else {
      CHECK(slot == 0);
      CHECK(hit == 0);
    }
  }
  // Binomial(400000, 3/4): three sigma is about 822.
  CHECK(std::abs(second - 300000) < 822);

  // Slots with zero intersections are never drawn.
  for (const auto& [slot, hit] : resample_draws({0, 2, 0, 1}, 5000, 10)) {
    CHECK((slot == 1 || slot == 3));
    (void)hit;
  }
}

TEST_CASE("equal weights make resampling a uniform choice among hits") {
  const auto draws = resample_draws({1, 1, 1, 1}, 80000, 11);
  std::int64_t counts[4] = {0, 0, 0, 0};
  for (const auto& [slot, hit] : draws) ++counts[slot];
  for (std::int64_t c : counts) CHECK(std::abs(c - 20000) < 3 * std::sqrt(80000 * 0.25 * 0.75));
}

TEST_CASE("resampled mode returns the requested count and may duplicate") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const auto [samples, report] =
      sample_resampled(sphere, stream_with_seed(12), TraceConfig{}, 20000, 30000);
  CHECK(samples.size() == 30000);
  CHECK(report.samples == 30000);
  CHECK(report.hits < 30000);  // fewer candidates than draws forces duplicates
  const CallableField empty([](const Vec3&) { return 1.0; }, 1.0);
  CHECK_THROWS_AS(sample_resampled(empty, stream_with_seed(12), TraceConfig{}, 2000, 100),
                  EmptySurfaceError);
}

TEST_CASE("voxel occupancy: whole box, plane slab, empty field") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const VoxelGrid whole = build_voxels(sphere, default_box(), 1);
  CHECK(whole.occupied.size() == 1);
  CHECK(whole.occupied_fraction() == doctest::Approx(1.0));

  const PlaneField plane(Vec3(0, 0, 1), 0.0);
  const VoxelGrid slab = build_voxels(plane, default_box(), 4);
  CHECK(slab.occupied.size() == 32);
  for (std::int32_t id : slab.occupied) {
    const int iz = id / 16;
    CHECK((iz == 1 || iz == 2));
  }

  const CallableField empty([](const Vec3&) { return 1.0; }, 1.0);
  CHECK(build_voxels(empty, default_box(), 16).occupied.empty());

  CHECK_THROWS_AS(build_voxels(sphere, Box3(Vec3(-1, -1, -0.5), Vec3(1, 1, 0.5)), 4),
                  std::invalid_argument);
}

TEST_CASE("voxels containing surface are always occupied") {
  const TorusField torus(Vec3::Zero(), 0.5, 0.2);
  const VoxelGrid grid = build_voxels(torus, default_box(), 16);
  for (int i = 0; i < 500; ++i) {
    const Scalar u = 2 * std::numbers::pi * i / 500.0;
    const Scalar v = 2 * std::numbers::pi * (i * 7 % 500) / 500.0;
    const Vec3 p((0.5 + 0.2 * std::cos(v)) * std::cos(u), (0.5 + 0.2 * std::cos(v)) * std::sin(u),
                 0.2 * std::sin(v));
    const int ix = std::clamp(static_cast<int>((p.x() + 1) / grid.edge), 0, 15);
    const int iy = std::clamp(static_cast<int>((p.y() + 1) / grid.edge), 0, 15);
    const int iz = std::clamp(static_cast<int>((p.z() + 1) / grid.edge), 0, 15);
    CHECK(grid.occupancy[static_cast<size_t>((iz * 16 + iy) * 16 + ix)] == 1);
  }
}

TEST_CASE("stratified sampling at resolution 1 matches the global hit rate") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const VoxelGrid grid = build_voxels(sphere, default_box(), 1);
  const auto strat =
      sample_stratified(sphere, grid, stream_with_seed(21), TraceConfig{}, 200000);
  const auto global = sample_keep_all(sphere, stream_with_seed(22), TraceConfig{}, 200000);
  const Scalar r1 = static_cast<Scalar>(strat.report.hits) / 200000.0;
  const Scalar r2 = static_cast<Scalar>(global.report.hits) / 200000.0;
  CHECK(std::abs(r1 - r2) < 0.0064);  // three sigma for the paired difference
}

TEST_CASE("per-voxel area estimates sum to the sphere area") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const VoxelGrid grid = build_voxels(sphere, default_box(), 8);
  REQUIRE(grid.occupied.size() > 0);
  const std::int64_t rays_per_voxel =
      std::max<std::int64_t>(1, 1000000 / static_cast<std::int64_t>(grid.occupied.size()));
  const auto strat =
      sample_stratified(sphere, grid, stream_with_seed(23), TraceConfig{}, rays_per_voxel);
  Scalar area = 0;
  const Scalar s = grid.edge;
  for (const VoxelStats& vs : strat.voxel_stats)
    area += 3.0 * s * s * static_cast<Scalar>(vs.hits) / static_cast<Scalar>(vs.rays);
  CHECK(std::abs(area - std::numbers::pi) < 0.01 * std::numbers::pi);
  // Sample counts line up with the per-voxel tallies.
  std::int64_t hits = 0;
  for (const VoxelStats& vs : strat.voxel_stats) hits += vs.hits;
  CHECK(hits == static_cast<std::int64_t>(strat.samples.size()));
}

TEST_CASE("stratified sampling is deterministic across thread counts") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  const VoxelGrid grid = build_voxels(sphere, default_box(), 8);
  SamplerOptions one;
  one.threads = 1;
  SamplerOptions four;
  four.threads = 4;
  const auto a = sample_stratified(sphere, grid, stream_with_seed(24), TraceConfig{}, 200, one);
  const auto b = sample_stratified(sphere, grid, stream_with_seed(24), TraceConfig{}, 200, four);
  CHECK(same_samples(a.samples, b.samples));
  CHECK(a.report.evals == b.report.evals);
}

TEST_CASE("requested normals align with the outward gradient") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  SamplerOptions opts;
  opts.with_normals = true;
  const auto [samples, report] =
      sample_keep_all(sphere, stream_with_seed(25), TraceConfig{}, 5000, opts);
  REQUIRE(!samples.empty());
  for (const SurfaceSample& s : samples) {
    REQUIRE(s.has_normal);
    CHECK((s.normal - s.point.normalized()).norm() < 1e-3);
  }
}

TEST_CASE("point set writers round-trip through xyz and ply") {
  const SphereField sphere(Vec3::Zero(), 0.5);
  SamplerOptions opts;
  opts.with_normals = true;
  const auto [samples, report] =
      sample_keep_all(sphere, stream_with_seed(26), TraceConfig{}, 2000, opts);
  REQUIRE(samples.size() > 10);
  const std::string xyz = (std::filesystem::temp_directory_path() / "isurf_pts.xyz").string();
  const std::string ply = (std::filesystem::temp_directory_path() / "isurf_pts.ply").string();
  write_points(xyz, samples);
  write_points(ply, samples);
  const auto from_xyz = read_points(xyz);
  const auto from_ply = read_points(ply);
  REQUIRE(from_xyz.size() == samples.size());
  REQUIRE(from_ply.size() == samples.size());
  for (size_t i = 0; i < samples.size(); i += 131) {
    CHECK((from_xyz[i].point - samples[i].point).norm() < 1e-12);
    CHECK((from_ply[i].point - samples[i].point).norm() < 1e-6);   // f32 storage
    CHECK((from_ply[i].normal - samples[i].normal).norm() < 1e-6);
  }
  std::filesystem::remove(xyz);
  std::filesystem::remove(ply);
}
