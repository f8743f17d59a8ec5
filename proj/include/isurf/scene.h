#pragma once

#include <memory>
#include <string>

#include "isurf/field.h"
#include "isurf/types.h"

namespace isurf {

struct Scene {
  FieldPtr field;
  Box3 domain = default_box();
  std::string name = "scene";
};

// Builds a field expression from the nested {"op": ..., ...} description; see
// the README for the schema. Throws ParseError on malformed input.
Scene load_scene_json_text(const std::string& text);
Scene load_scene_json(const std::string& path);

}  // namespace isurf
