#pragma once

#include <cstdint>
#include <vector>

#include "bimanip/core/pose.hpp"

namespace bimanip::data {

constexpr int kImageSize = 224;
constexpr int kImageChannels = 3;
constexpr int kImagePixels = kImageSize * kImageSize * kImageChannels;
constexpr int kTactileDims = 40;  // 20 per hand, left then right
constexpr int kActionDims = 48;   // 24 left + 24 right robot joints

// Bottle pose in the camera frame plus its four size parameters.
struct ObjectLabel {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();  // serialized as (w, x, y, z)
  double body_radius = 0.03;
  double body_height = 0.14;
  double cap_radius = 0.02;
  double cap_height = 0.02;

  static constexpr int kDims = 11;  // 3 position + 4 quaternion + 4 sizes
  void to_flat(double* out) const;
  static ObjectLabel from_flat(const double* in);
};

// One aligned multimodal training sample. Image and action payloads are kept
// at float32 precision so the on-disk round trip is lossless.
struct Frame {
  std::vector<float> image;          // 224*224*3, HWC, values in [0,1]
  std::vector<std::uint8_t> tactile; // 40 binary values
  std::vector<float> action;         // 48 joint angles (radians)
  std::vector<float> future_actions; // p*48, next p frames' actions
  ObjectLabel object;
  double timestamp = 0.0;

  int future_steps() const { return static_cast<int>(future_actions.size()) / kActionDims; }
};

void validate_frame(const Frame& f, int expected_future_steps);

}  // namespace bimanip::data
