#pragma once

#include <vector>

#include "bimanip/env/bottle.hpp"
#include "bimanip/env/renderer.hpp"
#include "bimanip/kin/hand_model.hpp"

namespace bimanip::env {

// Bottle body + cap cylinders and a rim marker that makes the cap angle
// visible to the camera.
void add_bottle_to_scene(Scene& scene, const Pose& bottle, const BottleSpec& spec,
                         double cap_angle);

// One sphere per link; palm enlarged, fingertips lightened.
void add_hand_to_scene(Scene& scene, const kin::HandModel& model,
                       const std::vector<Pose>& fk_world, bool left_hand);

}  // namespace bimanip::env
