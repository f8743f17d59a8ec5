#include "isurf/mesh.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace isurf {

namespace {

void validate(const Mesh& mesh, const std::string& path) {
  if (mesh.empty()) throw ParseError("empty mesh: " + path);
  for (const Vec3& v : mesh.vertices)
    if (!v.allFinite()) throw ParseError("non-finite vertex in " + path);
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces)
    if ((f.array() < 0).any() || (f.array() >= n).any())
      throw ParseError("face index out of range in " + path);
}

int parse_obj_index(const std::string& token, int vertex_count) {
  // "7", "7/2", "7/2/3", "7//3"; negative indices count from the end.
  const size_t slash = token.find('/');
  const int raw = std::stoi(slash == std::string::npos ? token : token.substr(0, slash));
  return raw > 0 ? raw - 1 : vertex_count + raw;
}

}  // namespace

Mesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  Mesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      if (!ls) throw ParseError("malformed vertex in " + path);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ls >> token)
        idx.push_back(parse_obj_index(token, static_cast<int>(mesh.vertices.size())));
      if (idx.size() < 3) throw ParseError("degenerate face in " + path);
      for (size_t i = 1; i + 1 < idx.size(); ++i)
        mesh.faces.emplace_back(idx[0], idx[i], idx[i + 1]);
    }
  }
  validate(mesh, path);
  return mesh;
}

Mesh load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw ParseError("not a PLY: " + path);

  struct Property {
    std::string type;
    std::string name;
    bool is_list = false;
    std::string count_type;
  };
  struct Element {
    std::string name;
    std::int64_t count = 0;
    std::vector<Property> props;
  };
  std::vector<Element> elements;
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
      Element e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ParseError("property before element in " + path);
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    }
  }
  if (!binary_le) throw ParseError("only binary little-endian PLY is supported: " + path);

  auto scalar_size = [&](const std::string& t) -> size_t {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
      return 4;
    if (t == "double" || t == "float64" || t == "int64" || t == "uint64") return 8;
    throw ParseError("unknown PLY type '" + t + "' in " + path);
  };
  auto read_scalar = [&](const std::string& t) -> double {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(scalar_size(t)));
    if (t == "float" || t == "float32") {
      float f;
      std::memcpy(&f, buf, 4);
      return f;
    }
    if (t == "double" || t == "float64") {
      double d;
      std::memcpy(&d, buf, 8);
      return d;
    }
    std::int64_t v = 0;
    const size_t n = scalar_size(t);
    for (size_t i = 0; i < n; ++i) v |= static_cast<std::int64_t>(buf[i]) << (8 * i);
    if ((t == "char" || t == "int8") && (v & 0x80)) v -= 0x100;
    if ((t == "short" || t == "int16") && (v & 0x8000)) v -= 0x10000;
    if ((t == "int" || t == "int32") && (v & 0x80000000ll)) v -= 0x100000000ll;
    return static_cast<double>(v);
  };

  Mesh mesh;
  for (const Element& e : elements) {
    if (e.name == "vertex") {
      for (std::int64_t i = 0; i < e.count; ++i) {
        Vec3 v = Vec3::Zero();
        for (const Property& p : e.props) {
          const double x = read_scalar(p.type);
          if (p.name == "x") v.x() = x;
          else if (p.name == "y") v.y() = x;
          else if (p.name == "z") v.z() = x;
        }
        mesh.vertices.push_back(v);
      }
    } else if (e.name == "face") {
      for (std::int64_t i = 0; i < e.count; ++i) {
        for (const Property& p : e.props) {
          if (!p.is_list) {
            read_scalar(p.type);
            continue;
          }
          const int n = static_cast<int>(read_scalar(p.count_type));
          std::vector<int> idx(static_cast<size_t>(n));
          for (int j = 0; j < n; ++j) idx[static_cast<size_t>(j)] = static_cast<int>(read_scalar(p.type));
          if (n < 3) throw ParseError("degenerate face in " + path);
          for (int j = 1; j + 1 < n; ++j)
            mesh.faces.emplace_back(idx[0], idx[static_cast<size_t>(j)], idx[static_cast<size_t>(j) + 1]);
        }
      }
    } else {
      // Skip unknown fixed-size elements.
      for (std::int64_t i = 0; i < e.count; ++i)
        for (const Property& p : e.props) {
          if (p.is_list) throw ParseError("unsupported list element in " + path);
          read_scalar(p.type);
        }
    }
    if (!in) throw ParseError("truncated PLY data in " + path);
  }
  validate(mesh, path);
  return mesh;
}

Mesh load_mesh_file(const std::string& path) {
  const size_t dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "obj") return load_obj(path);
  if (ext == "ply") return load_ply(path);
  throw ParseError("unsupported mesh format: " + path);
}

void save_obj(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write mesh file: " + path);
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

}  // namespace isurf
