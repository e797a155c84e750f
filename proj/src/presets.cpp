#include "mvo/error.hpp"
#include "mvo/scene_simulator.hpp"

namespace mvo {

namespace {

using nlohmann::json;

json desk_scene() {
  json intrinsics = {{"fu", 400.0}, {"fv", 400.0}, {"cu", 320.0}, {"cv", 240.0},
                     {"b", 0.24},   {"width", 640}, {"height", 480}, {"z_near", 0.1}};
  json camera = {{"kind", "orbit"},        {"center", {0.0, 0.0, 0.3}}, {"axis", {0.0, 0.0, 1.0}},
                 {"radius", 2.2},          {"phase", -1.5707963267948966}, {"omega", 0.0105},
                 {"bob_amplitude", 0.1},   {"bob_period", 48.0},        {"look_at", {0.0, 0.0, 0.0}}};
  json background = {{"kind", "static"}, {"center", {0.0, 0.0, 1.0}}, {"extent", {8.0, 8.0, 4.0}},
                     {"n_points", 2400}};
  // Swings act in the x-z plane, which faces the camera for the whole orbit
  // arc, and their periods are short enough that every tracklet lives
  // through a fast phase.
  json top_left = {{"kind", "swing"},   {"center", {-0.6, 0.0, 0.9}}, {"axis", {0.0, 1.0, 0.0}},
                   {"length", 0.5},     {"amplitude", 0.7},          {"period", 16.0},
                   {"phase", 0.0},      {"extent", {0.25, 0.25, 0.25}}, {"n_points", 300}};
  json top_right = {{"kind", "swing"},  {"center", {0.6, 0.0, 0.9}},  {"axis", {0.0, 1.0, 0.0}},
                    {"length", 0.5},    {"amplitude", 0.6},          {"period", 20.0},
                    {"phase", 1.0},     {"spin", 0.1},               {"extent", {0.25, 0.25, 0.25}},
                    {"n_points", 300}};
  json bottom_left = {{"kind", "swing"}, {"center", {-0.6, 0.0, 0.1}}, {"axis", {0.0, 1.0, 0.0}},
                      {"length", 0.5},   {"amplitude", 0.6},          {"period", 18.0},
                      {"phase", 2.0},    {"extent", {0.25, 0.25, 0.25}}, {"n_points", 300}};
  json bottom_right = {{"kind", "orbit"}, {"center", {0.6, 0.0, -0.4}}, {"axis", {0.0, 1.0, 0.0}},
                       {"radius", 0.25},  {"phase", 0.0},              {"omega", 0.3},
                       {"extent", {0.3, 0.3, 0.3}}, {"n_points", 300}};
  return {{"frames", 48},
          {"seed", 1},
          {"intrinsics", intrinsics},
          {"camera_motion", camera},
          {"bodies", {background, top_left, top_right, bottom_left, bottom_right}},
          {"noise_sigma", 0.5},
          {"dropout", 0.1},
          {"gap_limit", 2}};
}

}  // namespace

json preset_config(const std::string& name) {
  if (name == "desk") return desk_scene();
  if (name == "frustum_exit") {
    json j = desk_scene();
    // Top-left block leaves along a wide arc towards the camera's left edge.
    j["bodies"][1] = {{"kind", "orbit"},  {"center", {-2.0, 0.0, 0.4}}, {"axis", {0.0, 0.0, 1.0}},
                      {"radius", 1.4},    {"phase", 0.0},              {"omega", -0.04},
                      {"extent", {0.25, 0.25, 0.25}}, {"n_points", 300}};
    return j;
  }
  throw Error(ErrorCode::ConfigInvalid, "preset '" + name + "' is unknown (expected desk or frustum_exit)");
}

}  // namespace mvo
