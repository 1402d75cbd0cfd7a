#include "bimanip/data/object_label.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"

namespace bimanip::data {

ObjectLabel make_object_label(const Pose& bottle_world, const Pose& camera_world,
                              const BottleSizes& sizes) {
  if (std::abs(bottle_world.q.norm() - 1.0) > 1e-3 ||
      std::abs(camera_world.q.norm() - 1.0) > 1e-3) {
    throw ValidationError("make_object_label: quaternion norm off unit by more than 1e-3");
  }
  const Pose in_camera = camera_world.inverse() * bottle_world;
  ObjectLabel label;
  label.position = in_camera.p;
  label.orientation = in_camera.q.normalized();
  label.body_radius = sizes.body_radius;
  label.body_height = sizes.body_height;
  label.cap_radius = sizes.cap_radius;
  label.cap_height = sizes.cap_height;
  return label;
}

}  // namespace bimanip::data
