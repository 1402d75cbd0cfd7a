#include "bimanip/env/scene_items.hpp"

#include <cmath>

namespace bimanip::env {

void add_bottle_to_scene(Scene& scene, const Pose& bottle, const BottleSpec& spec,
                         double cap_angle) {
  const Vec3 axis = bottle.q * Vec3::UnitZ();
  scene.cylinders.push_back(
      {bottle.p, axis, spec.body_radius, spec.body_height, Rgb{0.85f, 0.45f, 0.12f}});
  const Vec3 cap_center = bottle.p + axis * (0.5 * spec.body_height + 0.5 * spec.cap_height);
  scene.cylinders.push_back(
      {cap_center, axis, spec.cap_radius, spec.cap_height, Rgb{0.80f, 0.12f, 0.12f}});
  const Vec3 marker_local(0.8 * spec.cap_radius * std::cos(cap_angle),
                          0.8 * spec.cap_radius * std::sin(cap_angle), 0.5 * spec.cap_height);
  scene.spheres.push_back(
      {cap_center + bottle.q * marker_local, 0.005, Rgb{0.08f, 0.08f, 0.15f}});
}

void add_hand_to_scene(Scene& scene, const kin::HandModel& model,
                       const std::vector<Pose>& fk_world, bool left_hand) {
  const Rgb base = left_hand ? Rgb{0.25f, 0.45f, 0.85f} : Rgb{0.30f, 0.78f, 0.40f};
  for (int k = 0; k < model.n_joints(); ++k) {
    double radius = 0.0085;
    Rgb color = base;
    if (k == model.palm_link) {
      radius = 0.026;
    } else if (model.joints[static_cast<std::size_t>(k)].type == kin::JointType::Fixed) {
      radius = 0.007;
      color = Rgb{std::min(1.0f, base.r + 0.2f), std::min(1.0f, base.g + 0.2f),
                  std::min(1.0f, base.b + 0.2f)};
    }
    scene.spheres.push_back({fk_world[static_cast<std::size_t>(k)].p, radius, color});
  }
}

}  // namespace bimanip::env
