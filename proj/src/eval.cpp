#include "isurf/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "isurf/mesh_field.h"
#include "isurf/rng.h"
#include "isurf/tracer.h"

namespace isurf {

namespace {
constexpr std::uint64_t kRejectSalt = 0x72656a63ull;
constexpr std::uint64_t kBatchSalt = 0x62746368ull;
constexpr std::uint64_t kGtSalt = 0x67747275ull;
}  // namespace

SurfacePartition torus_partition(Scalar R, Scalar r, int nu, int nv, const Vec3& center) {
  SurfacePartition part;
  const Scalar du = 2.0 * std::numbers::pi / nu;
  const Scalar dv = 2.0 * std::numbers::pi / nv;
  part.areas.resize(static_cast<size_t>(nu) * static_cast<size_t>(nv));
  for (int iu = 0; iu < nu; ++iu)
    for (int iv = 0; iv < nv; ++iv) {
      const Scalar v0 = iv * dv, v1 = (iv + 1) * dv;
      part.areas[static_cast<size_t>(iu) * nv + iv] =
          du * r * (R * dv + r * (std::sin(v1) - std::sin(v0)));
    }
  part.total_area = 0;
  for (Scalar a : part.areas) part.total_area += a;
  part.classify = [R, nu, nv, du, dv, center](const Vec3& p) {
    const Vec3 d = p - center;
    Scalar u = std::atan2(d.y(), d.x());
    if (u < 0) u += 2.0 * std::numbers::pi;
    const Scalar rho = std::hypot(d.x(), d.y());
    Scalar v = std::atan2(d.z(), rho - R);
    if (v < 0) v += 2.0 * std::numbers::pi;
    const int iu = std::min(nu - 1, static_cast<int>(u / du));
    const int iv = std::min(nv - 1, static_cast<int>(v / dv));
    return iu * nv + iv;
  };
  part.surface_distance = [R, r, center](const Vec3& p) {
    const Vec3 d = p - center;
    const Scalar rho = std::hypot(d.x(), d.y());
    return std::abs(std::hypot(rho - R, d.z()) - r);
  };
  return part;
}

SurfacePartition mesh_partition(const Mesh& mesh) {
  auto field = std::make_shared<MeshField>(mesh);
  SurfacePartition part;
  part.areas.resize(mesh.faces.size());
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f)
    part.areas[static_cast<size_t>(f)] = mesh.face_area(f);
  part.total_area = 0;
  for (Scalar a : part.areas) part.total_area += a;
  part.classify = [field](const Vec3& p) { return field->closest_point(p).triangle; };
  part.surface_distance = [field](const Vec3& p) { return field->closest_point(p).distance; };
  return part;
}

TvResult tv_score(const std::vector<SurfaceSample>& samples, const SurfacePartition& partition,
                  Scalar max_surface_dist) {
  TvResult result;
  std::vector<std::int64_t> counts(partition.areas.size(), 0);
  for (const SurfaceSample& s : samples) {
    if (partition.surface_distance && partition.surface_distance(s.point) > max_surface_dist) {
      ++result.unclassified;
      continue;
    }
    const int id = partition.classify(s.point);
    if (id < 0 || id >= static_cast<int>(counts.size())) {
      ++result.unclassified;
      continue;
    }
    ++counts[static_cast<size_t>(id)];
    ++result.classified;
  }
  if (result.classified == 0) {
    result.tv = 1.0;
    return result;
  }
  const Scalar n = static_cast<Scalar>(result.classified);
  Scalar tv = 0;
  for (size_t i = 0; i < counts.size(); ++i)
    tv += std::abs(static_cast<Scalar>(counts[i]) / n - partition.areas[i] / partition.total_area);
  result.tv = 0.5 * tv;
  return result;
}

std::vector<SurfaceSample> ground_truth_mesh_sampler(const Mesh& mesh, std::int64_t count,
                                                     std::uint64_t seed) {
  if (mesh.empty()) throw ParseError("ground truth sampler needs a non-empty mesh");
  std::vector<Scalar> cdf(mesh.faces.size());
  Scalar total = 0;
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    total += mesh.face_area(f);
    cdf[static_cast<size_t>(f)] = total;
  }
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng(seed ^ kGtSalt, static_cast<std::uint64_t>(i));
    const Scalar u = rng.next_double() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const size_t f = std::min(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
    const auto& tri = mesh.faces[f];
    const Vec3& a = mesh.vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<size_t>(tri[2])];
    const Scalar su = std::sqrt(rng.next_double());
    const Scalar v = rng.next_double();
    SurfaceSample s;
    s.point = (1.0 - su) * a + su * (1.0 - v) * b + su * v * c;
    s.ray_id = i;
    out.push_back(s);
  }
  return out;
}

std::vector<SurfaceSample> torus_uniform_samples(Scalar R, Scalar r, std::int64_t count,
                                                 std::uint64_t seed, const Vec3& center) {
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<size_t>(count));
  const Scalar two_pi = 2.0 * std::numbers::pi;
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng(seed ^ kGtSalt, static_cast<std::uint64_t>(i));
    const Scalar u = two_pi * rng.next_double();
    // Invert CDF(v) = (R v + r sin v) / (2 pi R) with safeguarded Newton;
    // the density R + r cos v is positive for R > r.
    const Scalar target = rng.next_double() * two_pi * R;
    Scalar v = target / R;
    for (int it = 0; it < 50; ++it) {
      const Scalar fv = R * v + r * std::sin(v) - target;
      const Scalar dfv = R + r * std::cos(v);
      const Scalar step = fv / dfv;
      v -= step;
      if (std::abs(step) < 1e-14) break;
    }
    v = std::clamp(v, 0.0, two_pi);
    SurfaceSample s;
    const Scalar rho = R + r * std::cos(v);
    s.point = center + Vec3(rho * std::cos(u), rho * std::sin(u), r * std::sin(v));
    s.ray_id = i;
    out.push_back(s);
  }
  return out;
}

RejectionResult rejection_baseline(const ImplicitField& field, const Box3& box,
                                   std::int64_t count, Scalar band, std::uint64_t seed,
                                   int newton_steps, std::int64_t max_trials) {
  RejectionResult result;
  const std::uint64_t evals_before = field.eval_count();
  for (std::int64_t t = 0;; ++t) {
    if (t >= max_trials) throw RejectionFailureError();
    CounterRng rng(seed ^ kRejectSalt, static_cast<std::uint64_t>(t));
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = rng.next_double(box.min()[a], box.max()[a]);
    ++result.trials;
    if (std::abs(field.evaluate(p)) >= band) continue;
    try {
      SurfaceSample s;
      s.point = newton_project(field, p, newton_steps);
      s.ray_id = t;
      result.samples.push_back(s);
    } catch (const DegenerateGradientError&) {
      continue;  // rare; the proposal is simply discarded
    }
    if (static_cast<std::int64_t>(result.samples.size()) >= count) break;
  }
  result.evals = field.eval_count() - evals_before;
  return result;
}

const char* eval_method_name(EvalMethod m) {
  switch (m) {
    case EvalMethod::kOurs:
      return "ours";
    case EvalMethod::kRejection:
      return "rejection";
    case EvalMethod::kGroundTruth:
      return "ground-truth";
  }
  return "unknown";
}

EvalRow run_eval_method(const EvalCaseConfig& cfg, EvalMethod method, std::int64_t count,
                        std::uint64_t seed, int threads) {
  EvalRow row;
  row.method = eval_method_name(method);
  row.shape = cfg.shape_name;
  row.samples = count;
  row.seed = seed;
  std::vector<SurfaceSample> samples;
  switch (method) {
    case EvalMethod::kOurs: {
      if (!cfg.field) throw std::invalid_argument("eval case has no field");
      RayStreamConfig stream;
      stream.seed = seed;
      stream.box = cfg.box;
      TraceConfig trace;
      trace.epsilon = cfg.epsilon;
      SamplerOptions opts;
      opts.threads = threads;
      // Initial budget from the known area (hit rate 2A/A_bound), topped up
      // with independently seeded batches when short.
      const Scalar rate =
          std::max(1e-6, 2.0 * cfg.partition->total_area / bound_surface_area(stream));
      std::int64_t rays = static_cast<std::int64_t>(1.05 * static_cast<Scalar>(count) / rate) + 1;
      std::uint64_t evals = 0;
      for (int batch = 0; batch < 64; ++batch) {
        RayStreamConfig bs = stream;
        bs.seed = batch == 0 ? seed : mix_bits(seed ^ (kBatchSalt + static_cast<std::uint64_t>(batch)));
        SamplingResult part = sample_keep_all(*cfg.field, bs, trace, rays, opts);
        evals += part.report.evals;
        samples.insert(samples.end(), part.samples.begin(), part.samples.end());
        if (static_cast<std::int64_t>(samples.size()) >= count) break;
        rays = std::max<std::int64_t>(rays / 4, 4096);
      }
      if (static_cast<std::int64_t>(samples.size()) < count) throw EmptySurfaceError();
      samples.resize(static_cast<size_t>(count));
      row.evals = evals;
      break;
    }
    case EvalMethod::kRejection: {
      if (!cfg.field) throw std::invalid_argument("eval case has no field");
      RejectionResult r = rejection_baseline(*cfg.field, cfg.box, count, cfg.rejection_band, seed);
      samples = std::move(r.samples);
      row.evals = r.evals;
      break;
    }
    case EvalMethod::kGroundTruth: {
      if (cfg.analytic_sampler) {
        samples = cfg.analytic_sampler(count, seed);
      } else if (cfg.mesh) {
        samples = ground_truth_mesh_sampler(*cfg.mesh, count, seed);
      } else {
        throw std::invalid_argument("eval case has no ground-truth sampler");
      }
      row.evals = 0;
      break;
    }
  }
  row.tv = tv_score(samples, *cfg.partition, cfg.classify_tolerance).tv;
  return row;
}

void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write csv: " + path);
  out << "method,shape,samples,tv,evals,seed\n";
  out.precision(17);
  for (const EvalRow& r : rows)
    out << r.method << "," << r.shape << "," << r.samples << "," << r.tv << "," << r.evals << ","
        << r.seed << "\n";
}

}  // namespace isurf
