#pragma once

#include "bimanip/data/frame.hpp"

namespace bimanip::data {

struct BottleSizes {
  double body_radius;
  double body_height;
  double cap_radius;
  double cap_height;
};

// Maps the world-frame bottle pose into the camera frame:
// label pose = camera_pose^-1 * bottle_pose. Quaternions off unit norm by
// more than 1e-3 are rejected.
ObjectLabel make_object_label(const Pose& bottle_world, const Pose& camera_world,
                              const BottleSizes& sizes);

}  // namespace bimanip::data
