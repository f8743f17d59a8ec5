// Command-line surface for the sampling, moment-estimation, and evaluation
// pipelines. Machine output goes to stdout (or files); progress goes to
// stderr. Outputs are bit-reproducible for a fixed (seed, config), regardless
// of --threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isurf/eval.h"
#include "isurf/grid_field.h"
#include "isurf/mesh_field.h"
#include "isurf/moments.h"
#include "isurf/pointset_io.h"
#include "isurf/postprocess.h"
#include "isurf/primitives.h"
#include "isurf/rng.h"
#include "isurf/sampler.h"
#include "isurf/scene.h"
#include "isurf/version.h"

namespace {

using nlohmann::json;
using namespace isurf;

constexpr int kExitBadArgs = 2;
constexpr int kExitLoadFailure = 3;
constexpr int kExitEmptySurface = 4;
constexpr int kExitUnsignedVolume = 5;

struct SceneArgs {
  std::string scene_path;
  std::string mesh_path;
  std::string grid_path;
};

struct CommonArgs {
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  double lambda = 0;  // <= 0: field's own bound
  bool lds = false;
  std::string bound = "box";
  int threads = 1;
};

void add_scene_options(CLI::App* cmd, SceneArgs& args) {
  auto* scene = cmd->add_option("--scene", args.scene_path, "scene description (JSON)");
  auto* mesh = cmd->add_option("--mesh", args.mesh_path, "triangle mesh (OBJ/PLY)");
  auto* grid = cmd->add_option("--grid", args.grid_path, "sampled grid field (ISGF)");
  scene->excludes(mesh)->excludes(grid);
  mesh->excludes(grid);
}

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--seed", args.seed, "random stream seed");
  cmd->add_option("--epsilon", args.epsilon, "intersection tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", args.lambda, "Lipschitz bound override");
  cmd->add_flag("--lds", args.lds, "low-discrepancy ray stream");
  cmd->add_option("--bound", args.bound, "bounding volume for rays")
      ->check(CLI::IsMember({"box", "sphere"}));
  cmd->add_option("--threads", args.threads, "worker threads (0 = auto)");
}

// Loaded scene: the field plus the sampling domain.
struct LoadedScene {
  Scene scene;
  std::string source;
};

LoadedScene load_field(const SceneArgs& args) {
  LoadedScene out;
  if (!args.scene_path.empty()) {
    out.scene = load_scene_json(args.scene_path);
    out.source = args.scene_path;
  } else if (!args.mesh_path.empty()) {
    out.scene.field = load_mesh(args.mesh_path);
    out.scene.name = args.mesh_path;
    out.source = args.mesh_path;
  } else if (!args.grid_path.empty()) {
    const auto grid = load_grid(args.grid_path);
    out.scene.domain = grid->bounds();
    out.scene.field = grid;
    out.scene.name = args.grid_path;
    out.source = args.grid_path;
  } else {
    throw CLI::ValidationError("scene", "one of --scene/--mesh/--grid is required");
  }
  return out;
}

RayStreamConfig make_stream(const LoadedScene& scene, const CommonArgs& common) {
  RayStreamConfig stream;
  stream.mode = common.lds ? RayMode::kLowDiscrepancy : RayMode::kUniform;
  stream.seed = common.seed;
  stream.box = scene.scene.domain;
  stream.bound = common.bound == "sphere" ? BoundingShape::kSphere : BoundingShape::kBox;
  return stream;
}

TraceConfig make_trace(const CommonArgs& common) {
  TraceConfig trace;
  trace.epsilon = common.epsilon;
  trace.lambda = common.lambda;
  return trace;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

json config_json(const LoadedScene& scene, const CommonArgs& common, const json& extra) {
  json cfg;
  cfg["source"] = scene.source;
  cfg["seed"] = common.seed;
  cfg["epsilon"] = common.epsilon;
  cfg["lambda"] = common.lambda;
  cfg["ray_mode"] = common.lds ? "low-discrepancy" : "uniform";
  cfg["bound"] = common.bound;
  for (const auto& [key, value] : extra.items()) cfg[key] = value;
  return cfg;
}

void write_report(const std::string& path, const json& report) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write report: " + path);
  out << report.dump(2) << "\n";
}

json report_with_config(const LoadedScene& scene, const CommonArgs& common, const json& extra) {
  json report;
  report["version"] = kVersion;
  report["config"] = config_json(scene, common, extra);
  report["config_hash"] = fnv1a_hex(report["config"].dump());
  return report;
}

// Fixed-size batches with independently derived seeds; the pool grows until
// `target` samples exist. Identical for every thread count.
constexpr std::uint64_t kBatchSalt = 0x62746368ull;
constexpr std::int64_t kBatchRays = 65536;

struct PooledSamples {
  std::vector<SurfaceSample> samples;
  std::vector<std::int64_t> hits_per_ray;  // grouped by (batch, ray) for resampling
  std::int64_t rays = 0;
  std::int64_t hits = 0;
  std::uint64_t evals = 0;
  std::int64_t flagged = 0;
};

PooledSamples pool_until(const ImplicitField& field, const RayStreamConfig& stream,
                         const TraceConfig& trace, const SamplerOptions& opts, std::int64_t target,
                         bool keep_one) {
  PooledSamples pool;
  for (int batch = 0; batch < 4096; ++batch) {
    RayStreamConfig bs = stream;
    bs.seed = batch == 0
                  ? stream.seed
                  : mix_bits(stream.seed ^ (kBatchSalt + static_cast<std::uint64_t>(batch)));
    const SamplingResult part =
        keep_one ? sample_keep_one(field, bs, trace, kBatchRays, opts)
                 : sample_keep_all(field, bs, trace, kBatchRays, opts);
    pool.rays += part.report.rays;
    pool.hits += part.report.hits;
    pool.evals += part.report.evals;
    pool.flagged += part.report.flagged_rays;
    std::int64_t i = 0;
    const std::int64_t n = static_cast<std::int64_t>(part.samples.size());
    while (i < n) {
      std::int64_t j = i;
      while (j < n && part.samples[static_cast<size_t>(j)].ray_id ==
                          part.samples[static_cast<size_t>(i)].ray_id)
        ++j;
      pool.hits_per_ray.push_back(j - i);
      i = j;
    }
    pool.samples.insert(pool.samples.end(), part.samples.begin(), part.samples.end());
    if (static_cast<std::int64_t>(pool.samples.size()) >= target) return pool;
  }
  throw EmptySurfaceError();
}

int cmd_sample(const SceneArgs& scene_args, const CommonArgs& common, const std::string& mode,
               std::int64_t rays, std::int64_t samples, int voxel_res, bool normals,
               const std::string& out_path, const std::string& report_path) {
  const LoadedScene scene = load_field(scene_args);
  const RayStreamConfig stream = make_stream(scene, common);
  const TraceConfig trace = make_trace(common);
  SamplerOptions opts;
  opts.with_normals = normals;
  opts.threads = common.threads;

  std::vector<SurfaceSample> points;
  SampleRunReport run;
  if (mode == "keep-all" || mode == "keep-one") {
    const bool keep_one = mode == "keep-one";
    if (rays > 0) {
      SamplingResult result = keep_one ? sample_keep_one(*scene.scene.field, stream, trace, rays, opts)
                                       : sample_keep_all(*scene.scene.field, stream, trace, rays, opts);
      points = std::move(result.samples);
      run = result.report;
    } else {
      PooledSamples pool = pool_until(*scene.scene.field, stream, trace, opts, samples, keep_one);
      pool.samples.resize(static_cast<size_t>(samples));
      points = std::move(pool.samples);
      run.rays = pool.rays;
      run.hits = pool.hits;
      run.evals = pool.evals;
      run.flagged_rays = pool.flagged;
      run.mode = mode;
      run.seed = stream.seed;
      run.samples = samples;
    }
  } else if (mode == "resample") {
    PooledSamples pool = pool_until(*scene.scene.field, stream, trace, opts, samples, false);
    points.reserve(static_cast<size_t>(samples));
    std::vector<std::int64_t> offsets(pool.hits_per_ray.size());
    std::int64_t acc = 0;
    for (size_t i = 0; i < pool.hits_per_ray.size(); ++i) {
      offsets[i] = acc;
      acc += pool.hits_per_ray[i];
    }
    for (const auto& [slot, hit] : resample_draws(pool.hits_per_ray, samples, stream.seed))
      points.push_back(pool.samples[static_cast<size_t>(offsets[static_cast<size_t>(slot)] + hit)]);
    run.rays = pool.rays;
    run.hits = pool.hits;
    run.evals = pool.evals;
    run.flagged_rays = pool.flagged;
    run.mode = mode;
    run.seed = stream.seed;
    run.samples = samples;
  } else {  // stratified
    const VoxelGrid grid = build_voxels(*scene.scene.field, scene.scene.domain, voxel_res);
    if (grid.occupied.empty()) throw EmptySurfaceError();
    const std::int64_t per_voxel = std::max<std::int64_t>(
        1, rays / static_cast<std::int64_t>(grid.occupied.size()));
    StratifiedResult result =
        sample_stratified(*scene.scene.field, grid, stream, trace, per_voxel, opts);
    points = std::move(result.samples);
    run = result.report;
  }

  if (points.empty()) {
    std::cerr << "no surface intersections found\n";
    return kExitEmptySurface;
  }
  write_points(out_path, points);

  json extra;
  extra["mode"] = mode;
  extra["requested_rays"] = rays;
  extra["requested_samples"] = samples;
  extra["voxel_res"] = voxel_res;
  extra["normals"] = normals;
  json report = report_with_config(scene, common, extra);
  report["rays"] = run.rays;
  report["hits"] = run.hits;
  report["samples"] = static_cast<std::int64_t>(points.size());
  report["evals"] = run.evals;
  report["flagged_rays"] = run.flagged_rays;
  report["output"] = out_path;
  if (!report_path.empty()) write_report(report_path, report);
  std::cerr << "wrote " << points.size() << " samples to " << out_path << " (" << run.evals
            << " evaluations)\n";
  return 0;
}

int cmd_moments(const SceneArgs& scene_args, const CommonArgs& common, std::int64_t rays,
                bool want_volume, int voxel_res, const std::string& report_path,
                const std::string& sweep, const std::string& sweep_out) {
  const LoadedScene scene = load_field(scene_args);
  if (want_volume && scene.scene.field->signedness() == Signedness::kUnsigned) {
    std::cerr << "volume estimates need a signed field\n";
    return kExitUnsignedVolume;
  }
  const RayStreamConfig stream = make_stream(scene, common);
  const TraceConfig trace = make_trace(common);

  EstimatorReport est;
  if (voxel_res > 1) {
    const VoxelGrid grid = build_voxels(*scene.scene.field, scene.scene.domain, voxel_res);
    if (grid.occupied.empty()) throw EmptySurfaceError();
    const std::int64_t per_voxel = std::max<std::int64_t>(
        1, rays / static_cast<std::int64_t>(grid.occupied.size()));
    est = estimate_moments_stratified(*scene.scene.field, grid, stream, trace, per_voxel,
                                      common.threads);
  } else {
    est = estimate_moments(*scene.scene.field, stream, trace, rays, common.threads);
  }

  json extra;
  extra["rays"] = rays;
  extra["voxel_res"] = voxel_res;
  json report = report_with_config(scene, common, extra);
  report["estimates"] = json::parse(estimator_report_json(est));
  write_report(report_path, report);

  if (!sweep.empty()) {
    std::vector<ConvergenceRow> rows;
    std::stringstream ss(sweep);
    std::string token;
    while (std::getline(ss, token, ',')) {
      const std::int64_t m = std::stoll(token);
      const EstimatorReport r = estimate_moments(*scene.scene.field, stream, trace, m,
                                                 common.threads);
      rows.push_back({m, r.area, r.area_se});
    }
    write_convergence_csv(sweep_out.empty() ? "convergence.csv" : sweep_out, rows);
  }
  return 0;
}

int cmd_bluenoise(const std::string& in_path, const std::string& out_path, std::int64_t count,
                  double area, const SceneArgs& scene_args, const CommonArgs& common,
                  std::int64_t estimate_rays) {
  const std::vector<SurfaceSample> input = read_points(in_path);
  double surface_area = area;
  if (!(surface_area > 0)) {
    const LoadedScene scene = load_field(scene_args);
    const EstimatorReport est = estimate_moments(
        *scene.scene.field, make_stream(scene, common), make_trace(common), estimate_rays,
        common.threads);
    surface_area = est.area;
    std::cerr << "estimated surface area " << surface_area << "\n";
  }
  const auto out = blue_noise_subsample(input, count, surface_area);
  write_points(out_path, out);
  std::cerr << "kept " << out.size() << " of " << input.size() << " samples\n";
  return 0;
}

int cmd_resample_importance(const std::string& in_path, const std::string& out_path,
                            std::int64_t count, const std::string& weights_spec,
                            const SceneArgs& scene_args, const CommonArgs& common) {
  const std::vector<SurfaceSample> input = read_points(in_path);
  std::vector<Scalar> weights;
  if (weights_spec == "constant") {
    weights.assign(input.size(), 1.0);
  } else if (weights_spec == "curvature") {
    const LoadedScene scene = load_field(scene_args);
    weights.reserve(input.size());
    for (const SurfaceSample& s : input)
      weights.push_back(std::abs(mean_curvature(*scene.scene.field, s.point)));
  } else if (weights_spec.rfind("file:", 0) == 0) {
    std::ifstream in(weights_spec.substr(5));
    if (!in) throw ParseError("cannot open weights file: " + weights_spec.substr(5));
    double w;
    while (in >> w) weights.push_back(w);
    if (weights.size() != input.size())
      throw CLI::ValidationError("--weights", "weight count does not match input points");
  } else {
    throw CLI::ValidationError("--weights", "expected constant | curvature | file:PATH");
  }
  const auto out = importance_resample(input, weights, count, common.seed);
  write_points(out_path, out);
  std::cerr << "resampled " << out.size() << " points\n";
  return 0;
}

int cmd_eval(const std::string& mesh_path, const std::string& torus_spec, std::int64_t samples,
             int seeds, const std::string& methods_spec, double band, const CommonArgs& common,
             const std::string& out_path, const std::string& report_path) {
  std::vector<EvalMethod> methods;
  {
    std::stringstream ss(methods_spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (token == "ours") methods.push_back(EvalMethod::kOurs);
      else if (token == "rejection") methods.push_back(EvalMethod::kRejection);
      else if (token == "ground-truth") methods.push_back(EvalMethod::kGroundTruth);
      else throw CLI::ValidationError("--methods", "unknown method '" + token + "'");
    }
  }

  // A --mesh path may be a single file or a directory of OBJ/PLY meshes.
  struct ShapeCase {
    std::string name;
    Mesh mesh;  // empty for the analytic torus
    double torus_R = 0, torus_r = 0;
  };
  std::vector<ShapeCase> shapes;
  if (!mesh_path.empty()) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (fs::is_directory(mesh_path)) {
      for (const auto& entry : fs::directory_iterator(mesh_path)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".obj" || ext == ".ply" || ext == ".OBJ" || ext == ".PLY")
          files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw ParseError("no OBJ/PLY meshes in " + mesh_path);
    } else {
      files.push_back(mesh_path);
    }
    for (const std::string& file : files) {
      ShapeCase sc;
      sc.name = file;
      sc.mesh = load_mesh_file(file);
      shapes.push_back(std::move(sc));
    }
  } else {
    ShapeCase sc;
    sc.name = "torus";
    if (std::sscanf(torus_spec.c_str(), "%lf,%lf", &sc.torus_R, &sc.torus_r) != 2)
      throw CLI::ValidationError("--torus", "expected \"R,r\"");
    shapes.push_back(std::move(sc));
  }

  std::vector<EvalRow> rows;
  json summary;
  summary["version"] = kVersion;
  summary["samples"] = samples;
  summary["seeds"] = seeds;
  summary["band"] = band;
  for (const ShapeCase& shape : shapes) {
    FieldPtr field;
    SurfacePartition partition;
    EvalCaseConfig cfg;
    cfg.shape_name = shape.name;
    cfg.epsilon = common.epsilon;
    cfg.rejection_band = band;
    if (!shape.mesh.empty()) {
      field = std::make_shared<MeshField>(shape.mesh);
      partition = mesh_partition(shape.mesh);
      cfg.mesh = &shape.mesh;
    } else {
      field = make_torus(Vec3::Zero(), shape.torus_R, shape.torus_r);
      partition = torus_partition(shape.torus_R, shape.torus_r, 100, 100);
      const double R = shape.torus_R, r = shape.torus_r;
      cfg.analytic_sampler = [R, r](std::int64_t n, std::uint64_t seed) {
        return torus_uniform_samples(R, r, n, seed);
      };
    }
    cfg.field = field.get();
    cfg.partition = &partition;

    for (const EvalMethod m : methods)
      for (int s = 0; s < seeds; ++s) {
        rows.push_back(run_eval_method(cfg, m, samples,
                                       common.seed + static_cast<std::uint64_t>(s),
                                       common.threads));
        std::cerr << shape.name << " " << rows.back().method << " seed " << rows.back().seed
                  << ": tv=" << rows.back().tv << " evals=" << rows.back().evals << "\n";
      }
    for (const EvalMethod m : methods) {
      Scalar tv = 0, evals = 0;
      int n = 0;
      for (const EvalRow& row : rows)
        if (row.method == eval_method_name(m) && row.shape == shape.name) {
          tv += row.tv;
          evals += static_cast<Scalar>(row.evals);
          ++n;
        }
      summary["mean"][shape.name][eval_method_name(m)] = {{"tv", tv / n}, {"evals", evals / n}};
    }
  }
  write_eval_csv(out_path, rows);
  if (!report_path.empty()) write_report(report_path, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform point sampling and moment estimation on implicit surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // sample
  auto* sample = app.add_subcommand("sample", "sample points on the zero level set");
  SceneArgs sample_scene;
  CommonArgs sample_common;
  std::string sample_mode = "keep-all";
  std::int64_t sample_rays = 0, sample_samples = 0;
  int sample_voxel_res = 16;
  bool sample_normals = false;
  std::string sample_out, sample_report;
  add_scene_options(sample, sample_scene);
  add_common_options(sample, sample_common);
  sample->add_option("--mode", sample_mode, "sampling mode")
      ->check(CLI::IsMember({"keep-all", "resample", "keep-one", "stratified"}));
  auto* rays_opt = sample->add_option("--rays", sample_rays, "number of rays to cast");
  auto* samples_opt =
      sample->add_option("--samples", sample_samples, "number of samples to produce");
  rays_opt->excludes(samples_opt);
  sample->add_option("--voxel-res", sample_voxel_res, "voxel resolution for stratified mode");
  sample->add_flag("--normals", sample_normals, "attach gradient normals");
  sample->add_option("-o,--out", sample_out, "output point set (.xyz/.ply)")->required();
  sample->add_option("--report", sample_report, "JSON run report path");

  // moments
  auto* moments = app.add_subcommand("moments", "estimate area, volume, and centroids");
  SceneArgs moments_scene;
  CommonArgs moments_common;
  std::int64_t moments_rays = 1000000;
  bool moments_volume = false;
  int moments_voxel_res = 1;
  std::string moments_report, moments_sweep, moments_sweep_out;
  add_scene_options(moments, moments_scene);
  add_common_options(moments, moments_common);
  moments->add_option("--rays", moments_rays, "number of rays");
  moments->add_flag("--volume", moments_volume, "require volume estimates (signed fields only)");
  moments->add_option("--voxel-res", moments_voxel_res, "stratify over a voxel grid when > 1");
  moments->add_option("--report", moments_report, "JSON report path (stdout if omitted)");
  moments->add_option("--sweep", moments_sweep, "comma-separated ray counts for a convergence CSV");
  moments->add_option("--sweep-out", moments_sweep_out, "convergence CSV path");

  // bluenoise
  auto* bluenoise = app.add_subcommand("bluenoise", "subsample a point set to blue noise");
  SceneArgs bn_scene;
  CommonArgs bn_common;
  std::string bn_in, bn_out;
  std::int64_t bn_count = 0, bn_estimate_rays = 200000;
  double bn_area = 0;
  add_scene_options(bluenoise, bn_scene);
  add_common_options(bluenoise, bn_common);
  bluenoise->add_option("--in", bn_in, "input point set")->required();
  bluenoise->add_option("-o,--out", bn_out, "output point set")->required();
  bluenoise->add_option("--count", bn_count, "target sample count")->required();
  bluenoise->add_option("--area", bn_area, "surface area (estimated from the scene if omitted)");
  bluenoise->add_option("--estimate-rays", bn_estimate_rays, "rays for the area estimate");

  // resample-importance
  auto* importance = app.add_subcommand("resample-importance", "weight-proportional resampling");
  SceneArgs imp_scene;
  CommonArgs imp_common;
  std::string imp_in, imp_out, imp_weights = "constant";
  std::int64_t imp_count = 0;
  add_scene_options(importance, imp_scene);
  add_common_options(importance, imp_common);
  importance->add_option("--in", imp_in, "input point set")->required();
  importance->add_option("-o,--out", imp_out, "output point set")->required();
  importance->add_option("--count", imp_count, "number of draws")->required();
  importance->add_option("--weights", imp_weights, "constant | curvature | file:PATH");

  // eval
  auto* eval = app.add_subcommand("eval", "uniformity/efficiency comparison harness");
  CommonArgs eval_common;
  std::string eval_mesh, eval_torus, eval_methods = "ours,rejection,ground-truth";
  std::string eval_out = "eval.csv", eval_report;
  std::int64_t eval_samples = 50000;
  int eval_seeds = 1;
  double eval_band = 1e-3;
  add_common_options(eval, eval_common);
  auto* mesh_opt = eval->add_option("--mesh", eval_mesh, "mesh shape (OBJ/PLY)");
  auto* torus_opt = eval->add_option("--torus", eval_torus, "analytic torus \"R,r\"");
  mesh_opt->excludes(torus_opt);
  eval->add_option("--samples", eval_samples, "samples per run");
  eval->add_option("--seeds", eval_seeds, "number of seeds per method");
  eval->add_option("--methods", eval_methods, "comma list of ours,rejection,ground-truth");
  eval->add_option("--band", eval_band, "rejection acceptance band |f| < band");
  eval->add_option("-o,--out", eval_out, "CSV output path");
  eval->add_option("--report", eval_report, "JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadArgs;
  }

  try {
    if (sample->parsed()) {
      if (sample_rays <= 0 && sample_samples <= 0) {
        std::cerr << "exactly one of --rays/--samples must be positive\n";
        return kExitBadArgs;
      }
      if (sample_mode == "resample" && sample_samples <= 0) {
        std::cerr << "resample mode requires --samples\n";
        return kExitBadArgs;
      }
      if (sample_mode == "stratified" && sample_rays <= 0) {
        std::cerr << "stratified mode requires --rays\n";
        return kExitBadArgs;
      }
      return cmd_sample(sample_scene, sample_common, sample_mode, sample_rays, sample_samples,
                        sample_voxel_res, sample_normals, sample_out, sample_report);
    }
    if (moments->parsed()) {
      if (moments_rays <= 0) {
        std::cerr << "--rays must be positive\n";
        return kExitBadArgs;
      }
      return cmd_moments(moments_scene, moments_common, moments_rays, moments_volume,
                         moments_voxel_res, moments_report, moments_sweep, moments_sweep_out);
    }
    if (bluenoise->parsed())
      return cmd_bluenoise(bn_in, bn_out, bn_count, bn_area, bn_scene, bn_common,
                           bn_estimate_rays);
    if (importance->parsed())
      return cmd_resample_importance(imp_in, imp_out, imp_count, imp_weights, imp_scene,
                                     imp_common);
    if (eval->parsed()) {
      if (eval_mesh.empty() && eval_torus.empty()) {
        std::cerr << "one of --mesh/--torus is required\n";
        return kExitBadArgs;
      }
      return cmd_eval(eval_mesh, eval_torus, eval_samples, eval_seeds, eval_methods, eval_band,
                      eval_common, eval_out, eval_report);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitBadArgs;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitLoadFailure;
  } catch (const EmptySurfaceError& e) {
    std::cerr << e.what() << "\n";
    return kExitEmptySurface;
  } catch (const RejectionFailureError& e) {
    std::cerr << e.what() << "\n";
    return kExitEmptySurface;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitBadArgs;
}
