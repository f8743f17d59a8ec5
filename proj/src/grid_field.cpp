#include "isurf/grid_field.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace isurf {

GridField::GridField(const Eigen::Vector3i& dims, std::vector<float> values, const Box3& bounds,
                     Signedness sgn)
    : ImplicitField(1.0, sgn), dims_(dims), values_(std::move(values)), bounds_(bounds) {
  if ((dims_.array() < 2).any()) throw ParseError("grid needs at least 2 corners per axis");
  if (values_.size() != static_cast<size_t>(dims_.x()) * dims_.y() * dims_.z())
    throw ParseError("grid value count does not match dimensions");
  for (float v : values_)
    if (!std::isfinite(v)) throw ParseError("grid contains non-finite values");
  cell_size_ = bounds_.diagonal().cwiseQuotient((dims_ - Eigen::Vector3i::Ones()).cast<Scalar>());
  set_lipschitz(compute_lipschitz());
}

GridField::CellRef GridField::locate(const Vec3& p) const {
  CellRef c;
  const Vec3 local = (p - bounds_.min()).cwiseQuotient(cell_size_);
  const auto clamp_axis = [&](Scalar x, int n, int& idx, Scalar& frac) {
    x = std::clamp(x, 0.0, static_cast<Scalar>(n - 1));
    idx = std::min(static_cast<int>(x), n - 2);
    frac = x - idx;
  };
  clamp_axis(local.x(), dims_.x(), c.i, c.fx);
  clamp_axis(local.y(), dims_.y(), c.j, c.fy);
  clamp_axis(local.z(), dims_.z(), c.k, c.fz);
  return c;
}

Scalar GridField::eval_impl(const Vec3& p) const {
  const CellRef c = locate(p);
  auto v = [&](int di, int dj, int dk) {
    return static_cast<Scalar>(value_at(c.i + di, c.j + dj, c.k + dk));
  };
  const Scalar c00 = v(0, 0, 0) * (1 - c.fx) + v(1, 0, 0) * c.fx;
  const Scalar c10 = v(0, 1, 0) * (1 - c.fx) + v(1, 1, 0) * c.fx;
  const Scalar c01 = v(0, 0, 1) * (1 - c.fx) + v(1, 0, 1) * c.fx;
  const Scalar c11 = v(0, 1, 1) * (1 - c.fx) + v(1, 1, 1) * c.fx;
  const Scalar c0 = c00 * (1 - c.fy) + c10 * c.fy;
  const Scalar c1 = c01 * (1 - c.fy) + c11 * c.fy;
  return c0 * (1 - c.fz) + c1 * c.fz;
}

Scalar GridField::compute_lipschitz() const {
  Scalar worst = 0;
  for (int k = 0; k + 1 < dims_.z(); ++k)
    for (int j = 0; j + 1 < dims_.y(); ++j)
      for (int i = 0; i + 1 < dims_.x(); ++i) {
        auto v = [&](int di, int dj, int dk) {
          return static_cast<Scalar>(value_at(i + di, j + dj, k + dk));
        };
        Scalar ax = 0, ay = 0, az = 0;
        for (int b = 0; b < 4; ++b) {
          const int u = b & 1, w = (b >> 1) & 1;
          ax = std::max(ax, std::abs(v(1, u, w) - v(0, u, w)));
          ay = std::max(ay, std::abs(v(u, 1, w) - v(u, 0, w)));
          az = std::max(az, std::abs(v(u, w, 1) - v(u, w, 0)));
        }
        ax /= cell_size_.x();
        ay /= cell_size_.y();
        az /= cell_size_.z();
        worst = std::max(worst, std::sqrt(ax * ax + ay * ay + az * az));
      }
  return worst;
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

std::shared_ptr<GridField> load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open grid file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ISGF", 4) != 0) throw ParseError("bad grid magic in " + path);
  Eigen::Vector3i dims;
  dims.x() = static_cast<int>(read_raw<std::uint32_t>(in));
  dims.y() = static_cast<int>(read_raw<std::uint32_t>(in));
  dims.z() = static_cast<int>(read_raw<std::uint32_t>(in));
  Vec3 lo, hi;
  for (int a = 0; a < 3; ++a) lo[a] = read_raw<double>(in);
  for (int a = 0; a < 3; ++a) hi[a] = read_raw<double>(in);
  if (!in) throw ParseError("truncated grid header in " + path);
  if ((dims.array() < 2).any() || (dims.array() > 4096).any())
    throw ParseError("unreasonable grid dimensions in " + path);
  const size_t n = static_cast<size_t>(dims.x()) * dims.y() * dims.z();
  std::vector<float> values(n);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw ParseError("truncated grid data in " + path);
  return std::make_shared<GridField>(dims, std::move(values), Box3(lo, hi));
}

void save_grid(const std::string& path, const GridField& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write grid file: " + path);
  out.write("ISGF", 4);
  write_raw(out, static_cast<std::uint32_t>(grid.dims().x()));
  write_raw(out, static_cast<std::uint32_t>(grid.dims().y()));
  write_raw(out, static_cast<std::uint32_t>(grid.dims().z()));
  for (int a = 0; a < 3; ++a) write_raw(out, static_cast<double>(grid.bounds().min()[a]));
  for (int a = 0; a < 3; ++a) write_raw(out, static_cast<double>(grid.bounds().max()[a]));
  out.write(reinterpret_cast<const char*>(grid.values().data()),
            static_cast<std::streamsize>(grid.values().size() * sizeof(float)));
  if (!out) throw ParseError("failed writing grid file: " + path);
}

std::shared_ptr<GridField> bake_grid(const ImplicitField& field, const Eigen::Vector3i& dims,
                                     const Box3& bounds) {
  std::vector<float> values(static_cast<size_t>(dims.x()) * dims.y() * dims.z());
  const Vec3 step = bounds.diagonal().cwiseQuotient((dims - Eigen::Vector3i::Ones()).cast<Scalar>());
  size_t idx = 0;
  for (int k = 0; k < dims.z(); ++k)
    for (int j = 0; j < dims.y(); ++j)
      for (int i = 0; i < dims.x(); ++i) {
        const Vec3 p = bounds.min() + Vec3(i * step.x(), j * step.y(), k * step.z());
        values[idx++] = static_cast<float>(field.evaluate(p));
      }
  return std::make_shared<GridField>(dims, std::move(values), bounds, field.signedness());
}

}  // namespace isurf
