#include "isurf/scene.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isurf/primitives.h"

namespace isurf {

namespace {

using nlohmann::json;

Vec3 vec3_from(const json& j, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw ParseError(std::string(key) + " must be [x, y, z]");
  return Vec3(a[0].get<Scalar>(), a[1].get<Scalar>(), a[2].get<Scalar>());
}

Scalar number_from(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ParseError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<Scalar>();
}

FieldPtr field_from_json(const json& j);

std::vector<FieldPtr> children_from(const json& j) {
  if (!j.contains("children") || !j.at("children").is_array() || j.at("children").empty())
    throw ParseError("composite op needs a non-empty 'children' array");
  std::vector<FieldPtr> out;
  for (const auto& c : j.at("children")) out.push_back(field_from_json(c));
  return out;
}

FieldPtr field_from_json(const json& j) {
  if (!j.is_object() || !j.contains("op")) throw ParseError("field node needs an 'op'");
  const std::string op = j.at("op").get<std::string>();
  if (op == "sphere")
    return make_sphere(vec3_from(j, "center", Vec3::Zero()), number_from(j, "radius"));
  if (op == "box")
    return make_box(vec3_from(j, "center", Vec3::Zero()),
                    vec3_from(j, "half_extents", Vec3::Ones()));
  if (op == "torus")
    return make_torus(vec3_from(j, "center", Vec3::Zero()), number_from(j, "major_radius"),
                      number_from(j, "minor_radius"));
  if (op == "plane")
    return make_plane(vec3_from(j, "normal", Vec3::UnitZ()),
                      j.contains("offset") ? number_from(j, "offset") : 0.0);
  if (op == "union") return make_union(children_from(j));
  if (op == "intersection") return make_intersection(children_from(j));
  if (op == "complement") return make_complement(field_from_json(j.at("child")));
  if (op == "offset")
    return make_offset(field_from_json(j.at("child")), number_from(j, "delta"));
  if (op == "absolute") return make_abs(field_from_json(j.at("child")));
  if (op == "transform") {
    if (!j.contains("child")) throw ParseError("transform needs a 'child'");
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    if (j.contains("axis") || j.contains("angle")) {
      const Vec3 axis = vec3_from(j, "axis", Vec3::UnitZ()).normalized();
      const Scalar angle = j.contains("angle") ? number_from(j, "angle") : 0.0;
      q = Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis));
    }
    const Vec3 t = vec3_from(j, "translate", Vec3::Zero());
    const Scalar s = j.contains("scale") ? number_from(j, "scale") : 1.0;
    if (!(s > 0)) throw ParseError("transform scale must be positive");
    return std::make_shared<TransformField>(field_from_json(j.at("child")), q, t, s);
  }
  throw ParseError("unknown field op '" + op + "'");
}

}  // namespace

Scene load_scene_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene JSON parse error: ") + e.what());
  }
  Scene scene;
  if (j.is_object() && j.contains("field")) {
    scene.field = field_from_json(j.at("field"));
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      scene.domain = Box3(vec3_from(d, "min", Vec3(-1, -1, -1)), vec3_from(d, "max", Vec3(1, 1, 1)));
      if ((scene.domain.diagonal().array() <= 0).any())
        throw ParseError("scene domain must have min < max componentwise");
    }
    if (j.contains("name")) scene.name = j.at("name").get<std::string>();
  } else {
    scene.field = field_from_json(j);
  }
  return scene;
}

Scene load_scene_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Scene scene = load_scene_json_text(ss.str());
  if (scene.name == "scene") {
    const size_t slash = path.find_last_of("/\\");
    scene.name = slash == std::string::npos ? path : path.substr(slash + 1);
  }
  return scene;
}

}  // namespace isurf
