#include "isurf/moments.h"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "isurf/parallel.h"
#include "isurf/rng.h"

namespace isurf {

namespace {
constexpr std::int64_t kChunk = 4096;
constexpr std::uint64_t kVoxelSalt = 0x766f7831ull;
}  // namespace

Scalar area_from_counts(std::int64_t hits, std::int64_t rays, Scalar bound_area) {
  if (rays <= 0) throw std::invalid_argument("area estimate needs at least one ray");
  return 0.5 * bound_area * static_cast<Scalar>(hits) / static_cast<Scalar>(rays);
}

Scalar volume_from_chords(Scalar chord_sum, std::int64_t rays, Scalar bound_area) {
  if (rays <= 0) throw std::invalid_argument("volume estimate needs at least one ray");
  return 0.25 * bound_area * chord_sum / static_cast<Scalar>(rays);
}

void MomentAccumulator::add(const Ray& ray, const TraceResult& tr) {
  ++rays_;
  evals_ += tr.evals;
  if (tr.terminated == TraceTermination::kMaxSteps) ++flagged_;
  const Scalar k = static_cast<Scalar>(tr.hits.size());
  hits_ += static_cast<std::int64_t>(tr.hits.size());
  k2_.add(k * k);
  Vec3 xsum = Vec3::Zero();
  for (const Hit& h : tr.hits) xsum += h.point;
  const Scalar sigma = tr.chord_length();
  if (sigma > 0) ++chord_rays_;
  sigma_.add(sigma);
  sigma2_.add(sigma * sigma);
  Vec3 tmoment = Vec3::Zero();
  for (const Chord& c : tr.chords) tmoment += c.length() * ray.at(0.5 * (c.t_start + c.t_end));
  for (int a = 0; a < 3; ++a) {
    x_[a].add(xsum[a]);
    x2_[a].add(xsum[a] * xsum[a]);
    xk_[a].add(xsum[a] * k);
    t_[a].add(tmoment[a]);
    t2_[a].add(tmoment[a] * tmoment[a]);
    tsig_[a].add(tmoment[a] * sigma);
  }
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  rays_ += o.rays_;
  hits_ += o.hits_;
  chord_rays_ += o.chord_rays_;
  flagged_ += o.flagged_;
  evals_ += o.evals_;
  k2_.merge(o.k2_);
  sigma_.merge(o.sigma_);
  sigma2_.merge(o.sigma2_);
  for (int a = 0; a < 3; ++a) {
    x_[a].merge(o.x_[a]);
    x2_[a].merge(o.x2_[a]);
    xk_[a].merge(o.xk_[a]);
    t_[a].merge(o.t_[a]);
    t2_[a].merge(o.t2_[a]);
    tsig_[a].merge(o.tsig_[a]);
  }
}

EstimatorReport MomentAccumulator::report(Signedness sgn) const {
  EstimatorReport r;
  r.rays = rays_;
  r.hits = hits_;
  r.evals = evals_;
  r.flagged_rays = flagged_;
  r.chord_rays = chord_rays_;
  if (rays_ <= 0) throw std::invalid_argument("no rays accumulated");
  const Scalar m = static_cast<Scalar>(rays_);
  const Scalar ca = 0.5 * bound_area_;
  const Scalar kbar = static_cast<Scalar>(hits_) / m;
  r.area = ca * kbar;
  if (rays_ > 1) {
    const Scalar var_k = std::max(0.0, (k2_.value() - m * kbar * kbar) / (m - 1));
    r.area_se = ca * std::sqrt(var_k / m);
  }
  if (sgn == Signedness::kSigned) {
    const Scalar cv = 0.25 * bound_area_;
    const Scalar sbar = sigma_.value() / m;
    r.has_volume = true;
    r.volume = cv * sbar;
    if (rays_ > 1) {
      const Scalar var_s = std::max(0.0, (sigma2_.value() - m * sbar * sbar) / (m - 1));
      r.volume_se = cv * std::sqrt(var_s / m);
    }
    if (chord_rays_ > 0) r.mean_chord_hitting = sigma_.value() / static_cast<Scalar>(chord_rays_);
    if (sigma_.value() > 0) {
      r.has_solid_centroid = true;
      for (int a = 0; a < 3; ++a) {
        const Scalar c = t_[a].value() / sigma_.value();
        r.solid_centroid[a] = c;
        if (rays_ > 1) {
          // Ratio-estimator linearization: Var(t_i - c sigma_i).
          const Scalar var_d = std::max(
              0.0, (t2_[a].value() - 2 * c * tsig_[a].value() + c * c * sigma2_.value()) / (m - 1));
          r.solid_centroid_se[a] = std::sqrt(var_d / m) / sbar;
        }
      }
    }
  }
  if (hits_ > 0) {
    r.has_shell_centroid = true;
    for (int a = 0; a < 3; ++a) {
      const Scalar c = x_[a].value() / static_cast<Scalar>(hits_);
      r.shell_centroid[a] = c;
      if (rays_ > 1) {
        const Scalar var_d = std::max(
            0.0, (x2_[a].value() - 2 * c * xk_[a].value() + c * c * k2_.value()) / (m - 1));
        r.shell_centroid_se[a] = std::sqrt(var_d / m) / kbar;
      }
    }
  }
  return r;
}

EstimatorReport estimate_moments(const ImplicitField& field, const RayStreamConfig& stream,
                                 const TraceConfig& trace, std::int64_t ray_count, int threads) {
  const std::vector<Ray> rays = uniform_rays(stream, ray_count);
  const Scalar bound_area = bound_surface_area(stream);
  const std::int64_t n = static_cast<std::int64_t>(rays.size());
  const std::int64_t n_chunks = n == 0 ? 0 : (n + kChunk - 1) / kChunk;
  std::vector<MomentAccumulator> accs(static_cast<size_t>(n_chunks),
                                      MomentAccumulator(bound_area));
  parallel_chunks(n, kChunk, threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    MomentAccumulator& acc = accs[static_cast<size_t>(c)];
    for (std::int64_t i = b; i < e; ++i) {
      const Ray& ray = rays[static_cast<size_t>(i)];
      acc.add(ray, trace_all(field, ray, trace));
    }
  });
  MomentAccumulator total(bound_area);
  for (const MomentAccumulator& acc : accs) total.merge(acc);
  return total.report(field.signedness());
}

EstimatorReport estimate_moments_stratified(const ImplicitField& field, const VoxelGrid& grid,
                                            const RayStreamConfig& stream,
                                            const TraceConfig& trace,
                                            std::int64_t rays_per_voxel, int threads) {
  struct Stratum {
    std::int64_t hits = 0, chord_rays = 0, flagged = 0;
    std::uint64_t evals = 0;
    Scalar k2 = 0, sigma = 0, sigma2 = 0;
    Vec3 x = Vec3::Zero(), t = Vec3::Zero();
  };
  const std::int64_t n_vox = static_cast<std::int64_t>(grid.occupied.size());
  std::vector<Stratum> strata(static_cast<size_t>(n_vox));
  parallel_chunks(n_vox, 1, threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    (void)c;
    for (std::int64_t v = b; v < e; ++v) {
      Stratum& st = strata[static_cast<size_t>(v)];
      const std::int32_t vid = grid.occupied[static_cast<size_t>(v)];
      RayStreamConfig local = stream;
      local.box = grid.voxel_bounds(vid);
      local.seed = mix_bits(stream.seed ^ (kVoxelSalt + static_cast<std::uint64_t>(vid)));
      for (const Ray& ray : uniform_rays(local, rays_per_voxel)) {
        const TraceResult tr = trace_all(field, ray, trace);
        st.evals += tr.evals;
        st.hits += static_cast<std::int64_t>(tr.hits.size());
        const Scalar k = static_cast<Scalar>(tr.hits.size());
        st.k2 += k * k;
        const Scalar sigma = tr.chord_length();
        if (sigma > 0) ++st.chord_rays;
        st.sigma += sigma;
        st.sigma2 += sigma * sigma;
        if (tr.terminated == TraceTermination::kMaxSteps) ++st.flagged;
        for (const Hit& h : tr.hits) st.x += h.point;
        for (const Chord& ch : tr.chords)
          st.t += ch.length() * ray.at(0.5 * (ch.t_start + ch.t_end));
      }
    }
  });

  EstimatorReport r;
  const Scalar s = grid.edge;
  const Scalar ca = 3.0 * s * s;   // half the voxel box area
  const Scalar cv = 1.5 * s * s;   // quarter of the voxel box area
  const Scalar mv = static_cast<Scalar>(rays_per_voxel);
  Scalar area_var = 0, vol_var = 0;
  Vec3 x_all = Vec3::Zero();
  Vec3 vol_moment = Vec3::Zero();  // estimate of the integral of x over the solid
  std::int64_t hits_all = 0;
  for (const Stratum& st : strata) {
    r.evals += st.evals;
    r.flagged_rays += st.flagged;
    r.chord_rays += st.chord_rays;
    hits_all += st.hits;
    const Scalar kbar = static_cast<Scalar>(st.hits) / mv;
    r.area += ca * kbar;
    if (rays_per_voxel > 1) {
      const Scalar var_k = std::max(0.0, (st.k2 - mv * kbar * kbar) / (mv - 1));
      area_var += ca * ca * var_k / mv;
    }
    const Scalar sbar = st.sigma / mv;
    r.volume += cv * sbar;
    if (rays_per_voxel > 1) {
      const Scalar var_s = std::max(0.0, (st.sigma2 - mv * sbar * sbar) / (mv - 1));
      vol_var += cv * cv * var_s / mv;
    }
    x_all += st.x;
    vol_moment += (cv / mv) * st.t;
  }
  r.rays = n_vox * rays_per_voxel;
  r.hits = hits_all;
  r.area_se = std::sqrt(area_var);
  r.has_volume = field.signedness() == Signedness::kSigned;
  if (!r.has_volume) {
    r.volume = 0;
  } else {
    // Occupied voxels only see the near-surface shell; unoccupied voxels
    // carry no surface, so their centers' signs decide whether they sit
    // entirely inside the solid and contribute their full cube volume.
    const int res = grid.resolution;
    std::int32_t id = 0;
    for (int iz = 0; iz < res; ++iz)
      for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix, ++id) {
          if (grid.occupancy[static_cast<size_t>(id)]) continue;
          const Vec3 center =
              grid.domain.min() + grid.edge * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
          ++r.evals;
          if (field.evaluate(center) < 0) {
            r.volume += s * s * s;
            vol_moment += s * s * s * center;
          }
        }
    r.volume_se = std::sqrt(vol_var);
    if (r.volume > 0) {
      r.has_solid_centroid = true;
      r.solid_centroid = vol_moment / r.volume;
    }
  }
  if (hits_all > 0) {
    r.has_shell_centroid = true;
    r.shell_centroid = x_all / static_cast<Scalar>(hits_all);
  }
  return r;
}

std::string estimator_report_json(const EstimatorReport& r) {
  nlohmann::json j;
  j["rays"] = r.rays;
  j["hits"] = r.hits;
  j["evals"] = r.evals;
  j["flagged_rays"] = r.flagged_rays;
  j["area"] = r.area;
  j["area_stderr"] = r.area_se;
  if (r.has_volume) {
    j["volume"] = r.volume;
    j["volume_stderr"] = r.volume_se;
    j["mean_chord_hitting"] = r.mean_chord_hitting;
    j["chord_rays"] = r.chord_rays;
  }
  if (r.has_shell_centroid) {
    j["shell_centroid"] = {r.shell_centroid.x(), r.shell_centroid.y(), r.shell_centroid.z()};
    j["shell_centroid_stderr"] = {r.shell_centroid_se.x(), r.shell_centroid_se.y(),
                                  r.shell_centroid_se.z()};
  }
  if (r.has_solid_centroid) {
    j["solid_centroid"] = {r.solid_centroid.x(), r.solid_centroid.y(), r.solid_centroid.z()};
    j["solid_centroid_stderr"] = {r.solid_centroid_se.x(), r.solid_centroid_se.y(),
                                  r.solid_centroid_se.z()};
  }
  return j.dump(2);
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write csv: " + path);
  out << "rays,estimate,stderr\n";
  out.precision(17);
  for (const ConvergenceRow& row : rows)
    out << row.rays << "," << row.estimate << "," << row.stderr_ << "\n";
}

}  // namespace isurf
