#include "isurf/pointset_io.h"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace isurf {

namespace {

bool all_have_normals(const std::vector<SurfaceSample>& samples) {
  for (const SurfaceSample& s : samples)
    if (!s.has_normal) return false;
  return !samples.empty();
}

std::string lower_ext(const std::string& path) {
  const size_t dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

void write_xyz(const std::string& path, const std::vector<SurfaceSample>& samples) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write point file: " + path);
  out.precision(17);
  for (const SurfaceSample& s : samples)
    out << s.point.x() << " " << s.point.y() << " " << s.point.z() << "\n";
}

std::vector<SurfaceSample> read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open point file: " + path);
  std::vector<SurfaceSample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    SurfaceSample s;
    ls >> s.point.x() >> s.point.y() >> s.point.z();
    if (!ls) throw ParseError("malformed xyz line in " + path);
    out.push_back(s);
  }
  return out;
}

void write_ply_points(const std::string& path, const std::vector<SurfaceSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write point file: " + path);
  const bool normals = all_have_normals(samples);
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << samples.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
  out << "end_header\n";
  for (const SurfaceSample& s : samples) {
    float buf[6];
    int n = 3;
    buf[0] = static_cast<float>(s.point.x());
    buf[1] = static_cast<float>(s.point.y());
    buf[2] = static_cast<float>(s.point.z());
    if (normals) {
      buf[3] = static_cast<float>(s.normal.x());
      buf[4] = static_cast<float>(s.normal.y());
      buf[5] = static_cast<float>(s.normal.z());
      n = 6;
    }
    out.write(reinterpret_cast<const char*>(buf), n * static_cast<std::streamsize>(sizeof(float)));
  }
  if (!out) throw ParseError("failed writing point file: " + path);
}

std::vector<SurfaceSample> read_ply_points(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open point file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw ParseError("not a PLY: " + path);
  std::int64_t count = 0;
  std::vector<std::string> props;
  bool binary_le = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = (fmt == "binary_little_endian");
    } else if (tag == "element") {
      std::string name;
      ls >> name >> count;
      if (name != "vertex") throw ParseError("point PLY must contain only vertices: " + path);
    } else if (tag == "property") {
      std::string type, name;
      ls >> type >> name;
      if (type != "float" && type != "float32")
        throw ParseError("point PLY supports float properties only: " + path);
      props.push_back(name);
    } else if (tag == "end_header") {
      break;
    }
  }
  if (!binary_le) throw ParseError("only binary little-endian PLY is supported: " + path);
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<float> buf(props.size());
  const bool has_normals = props.size() >= 6;
  for (std::int64_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw ParseError("truncated point PLY: " + path);
    SurfaceSample s;
    for (size_t p = 0; p < props.size(); ++p) {
      const float v = buf[p];
      if (props[p] == "x") s.point.x() = v;
      else if (props[p] == "y") s.point.y() = v;
      else if (props[p] == "z") s.point.z() = v;
      else if (props[p] == "nx") s.normal.x() = v;
      else if (props[p] == "ny") s.normal.y() = v;
      else if (props[p] == "nz") s.normal.z() = v;
    }
    s.has_normal = has_normals;
    out.push_back(s);
  }
  return out;
}

void write_points(const std::string& path, const std::vector<SurfaceSample>& samples) {
  const std::string ext = lower_ext(path);
  if (ext == "xyz") return write_xyz(path, samples);
  if (ext == "ply") return write_ply_points(path, samples);
  throw ParseError("unsupported point format: " + path);
}

std::vector<SurfaceSample> read_points(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "xyz") return read_xyz(path);
  if (ext == "ply") return read_ply_points(path);
  throw ParseError("unsupported point format: " + path);
}

}  // namespace isurf
