#pragma once

#include <cstdint>
#include <string>

#include "bimanip/data/dataset.hpp"
#include "bimanip/retarget/retarget.hpp"

namespace bimanip::data {

// Synthetic stand-in for captured human manipulation data. Each trajectory
// scripts human-hand joint splines through a grasp-then-twist profile around
// a procedural bottle; streams are emitted at their native rates, aligned to
// the 30 Hz visual clock, thresholded, retargeted to the robot hands and
// rendered with the simulator's rasterizer.
struct GeneratorConfig {
  int trajectories = 2;
  int frames_per_trajectory = 30;  // visual frames before the window drop
  int future_steps = 5;            // p

  double visual_hz = 30.0;
  double tactile_hz = 200.0;
  double mocap_hz = 1000.0;

  double body_radius_range[2] = {0.030, 0.045};
  double body_height_range[2] = {0.10, 0.17};
  double cap_radius_range[2] = {0.016, 0.026};
  double cap_height_range[2] = {0.016, 0.026};

  double tactile_threshold = 0.4;  // volts
  double camera_jitter = 0.02;     // meters on eye/target per trajectory
  retarget::SolverConfig solver;

  std::string to_json() const;
  static GeneratorConfig from_json(const std::string& text);
  void validate() const;
  std::string hash() const;
};

Dataset generate_synthetic_dataset(const GeneratorConfig& cfg, std::uint64_t seed);

}  // namespace bimanip::data
