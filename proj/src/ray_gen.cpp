#include "isurf/ray_gen.h"

#include <array>
#include <cmath>
#include <numbers>

#include "isurf/rng.h"

namespace isurf {

namespace {

constexpr std::uint64_t kDirSalt = 0x75726179ull;    // proposal draws
constexpr std::uint64_t kRetrySalt = 0x72657472ull;  // LDS retry rotations
constexpr std::uint64_t kCpSalt = 0x63707274ull;     // per-seed rotation
constexpr std::uint64_t kPermSalt = 0x7065726dull;   // digit permutations

constexpr std::array<int, 4> kHaltonBases = {2, 3, 5, 7};

Vec3 direction_from_square(double u, double v) {
  const double z = 1.0 - 2.0 * u;
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * v;
  return Vec3(s * std::cos(phi), s * std::sin(phi), z);
}

// Half of the bounding volume's diagonal: 2*sqrt(3)-sided offset square for
// the [-1,1]^3 cube, generalized by diagonal so the square always covers the
// volume's projection.
Scalar offset_half_width(const RayStreamConfig& cfg) { return 0.5 * cfg.box.diagonal().norm(); }

struct Quad {
  double u[4];
};

Quad uniform_quad(std::uint64_t seed, std::int64_t index) {
  CounterRng rng(seed ^ kDirSalt, static_cast<std::uint64_t>(index));
  Quad q;
  for (double& x : q.u) x = rng.next_double();
  return q;
}

Quad lds_quad(std::uint64_t seed, std::int64_t index, int retry) {
  Quad q;
  CounterRng cp(seed ^ kCpSalt, 0);
  // Retry rotations must be independent per index: a rotation shared across
  // the stream would land retried points on a shifted copy of the failure
  // set instead of covering the acceptance region uniformly.
  CounterRng rot(mix_bits(seed ^ kRetrySalt) ^ mix_bits(static_cast<std::uint64_t>(index)),
                 static_cast<std::uint64_t>(retry));
  for (int d = 0; d < 4; ++d) {
    double x = detail::scrambled_radical_inverse(static_cast<std::uint64_t>(index), d, seed);
    x += cp.next_double();
    if (retry > 0) x += rot.next_double();
    q.u[d] = x - std::floor(x);
  }
  return q;
}

}  // namespace

namespace detail {

double scrambled_radical_inverse(std::uint64_t index, int base_index, std::uint64_t seed) {
  const int base = kHaltonBases[static_cast<size_t>(base_index)];
  // Digit permutation with perm[0] = 0 (keeps the value in [0,1)), derived
  // deterministically from the seed per dimension.
  std::array<int, 8> perm{};
  for (int i = 0; i < base; ++i) perm[static_cast<size_t>(i)] = i;
  CounterRng rng(seed ^ kPermSalt, static_cast<std::uint64_t>(base_index));
  for (int i = base - 1; i > 1; --i) {
    const int j = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * perm[static_cast<size_t>(index % static_cast<std::uint64_t>(base))];
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

}  // namespace detail

Scalar bound_surface_area(const RayStreamConfig& cfg) {
  if (cfg.bound == BoundingShape::kSphere) {
    const Scalar rho = 0.5 * cfg.box.diagonal().norm();
    return 4.0 * std::numbers::pi * rho * rho;
  }
  return box_surface_area(cfg.box);
}

std::optional<Ray> make_plane_ray(const RayStreamConfig& cfg, const Vec3& d, Scalar u0, Scalar u1) {
  Vec3 n, b;
  orthonormal_frame(d, n, b);
  const Vec3 center = cfg.box.center();
  const Vec3 origin = center + u0 * n + u1 * b;
  Scalar t0, t1;
  if (cfg.bound == BoundingShape::kSphere) {
    const Scalar rho = 0.5 * cfg.box.diagonal().norm();
    if (!clip_line_to_sphere(origin, d, center, rho, t0, t1)) return std::nullopt;
  } else {
    if (!clip_line_to_box(origin, d, cfg.box, t0, t1)) return std::nullopt;
  }
  Ray ray;
  ray.origin = origin;
  ray.dir = d;
  ray.t_entry = t0;
  ray.t_exit = t1;
  return ray;
}

std::optional<Ray> sample_ray(const RayStreamConfig& cfg, std::int64_t index) {
  switch (cfg.mode) {
    case RayMode::kUniform: {
      const Quad q = uniform_quad(cfg.seed, index);
      const Vec3 d = direction_from_square(q.u[0], q.u[1]);
      if (cfg.bound == BoundingShape::kSphere) {
        // Direct disc sampling: zero rejection.
        const Scalar rho = offset_half_width(cfg);
        const Scalar rr = rho * std::sqrt(q.u[2]);
        const Scalar th = 2.0 * std::numbers::pi * q.u[3];
        return make_plane_ray(cfg, d, rr * std::cos(th), rr * std::sin(th));
      }
      const Scalar h = offset_half_width(cfg);
      return make_plane_ray(cfg, d, (2.0 * q.u[2] - 1.0) * h, (2.0 * q.u[3] - 1.0) * h);
    }
    case RayMode::kLowDiscrepancy: {
      for (int retry = 0; retry < 65536; ++retry) {
        const Quad q = lds_quad(cfg.seed, index, retry);
        const Vec3 d = direction_from_square(q.u[0], q.u[1]);
        std::optional<Ray> ray;
        if (cfg.bound == BoundingShape::kSphere) {
          const Scalar rho = offset_half_width(cfg);
          const Scalar rr = rho * std::sqrt(q.u[2]);
          const Scalar th = 2.0 * std::numbers::pi * q.u[3];
          ray = make_plane_ray(cfg, d, rr * std::cos(th), rr * std::sin(th));
        } else {
          const Scalar h = offset_half_width(cfg);
          ray = make_plane_ray(cfg, d, (2.0 * q.u[2] - 1.0) * h, (2.0 * q.u[3] - 1.0) * h);
        }
        if (ray) return ray;
      }
      return std::nullopt;  // unreachable for sane bounding volumes
    }
    case RayMode::kNaiveBiased: {
      CounterRng rng(cfg.seed ^ kDirSalt, static_cast<std::uint64_t>(index));
      const double u0 = rng.next_double();
      const double u1 = rng.next_double();
      const Vec3 d = direction_from_square(u0, u1);
      Vec3 origin;
      for (int a = 0; a < 3; ++a) origin[a] = rng.next_double(cfg.box.min()[a], cfg.box.max()[a]);
      Scalar t0, t1;
      if (!clip_line_to_box(origin, d, cfg.box, t0, t1)) return std::nullopt;
      Ray ray;
      ray.origin = origin;
      ray.dir = d;
      ray.t_entry = 0.0;  // the ray emanates from its origin
      ray.t_exit = t1;
      return ray;
    }
  }
  return std::nullopt;
}

std::vector<Ray> uniform_rays(const RayStreamConfig& cfg, std::int64_t count) {
  std::vector<Ray> rays;
  if (count <= 0) return rays;
  rays.reserve(static_cast<size_t>(count));
  if (cfg.mode == RayMode::kLowDiscrepancy) {
    for (std::int64_t i = 0; i < count; ++i) {
      auto r = sample_ray(cfg, i);
      if (!r) continue;
      r->id = static_cast<std::int64_t>(rays.size());
      rays.push_back(*r);
    }
    return rays;
  }
  std::int64_t proposal = 0;
  while (static_cast<std::int64_t>(rays.size()) < count) {
    auto r = sample_ray(cfg, proposal++);
    if (!r) continue;
    r->id = static_cast<std::int64_t>(rays.size());
    rays.push_back(*r);
  }
  return rays;
}

}  // namespace isurf
