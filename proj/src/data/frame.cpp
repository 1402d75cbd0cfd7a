#include "bimanip/data/frame.hpp"

#include <cmath>
#include <string>

#include "bimanip/core/errors.hpp"

namespace bimanip::data {

void ObjectLabel::to_flat(double* out) const {
  out[0] = position.x();
  out[1] = position.y();
  out[2] = position.z();
  out[3] = orientation.w();
  out[4] = orientation.x();
  out[5] = orientation.y();
  out[6] = orientation.z();
  out[7] = body_radius;
  out[8] = body_height;
  out[9] = cap_radius;
  out[10] = cap_height;
}

ObjectLabel ObjectLabel::from_flat(const double* in) {
  ObjectLabel o;
  o.position = Vec3(in[0], in[1], in[2]);
  o.orientation = Quat(in[3], in[4], in[5], in[6]);
  o.body_radius = in[7];
  o.body_height = in[8];
  o.cap_radius = in[9];
  o.cap_height = in[10];
  return o;
}

void validate_frame(const Frame& f, int expected_future_steps) {
  if (f.image.size() != static_cast<std::size_t>(kImagePixels)) {
    throw DimensionError("frame image has wrong size");
  }
  if (f.tactile.size() != static_cast<std::size_t>(kTactileDims)) {
    throw DimensionError("frame tactile has wrong size");
  }
  if (f.action.size() != static_cast<std::size_t>(kActionDims)) {
    throw DimensionError("frame action has wrong size");
  }
  if (f.future_actions.size() !=
      static_cast<std::size_t>(expected_future_steps * kActionDims)) {
    throw DimensionError("frame future_actions has wrong size");
  }
  for (auto b : f.tactile) {
    if (b != 0 && b != 1) throw ValidationError("tactile values must be binary");
  }
  for (float v : f.action) {
    if (!std::isfinite(v)) throw ValidationError("non-finite action angle");
  }
  for (float v : f.future_actions) {
    if (!std::isfinite(v)) throw ValidationError("non-finite future action angle");
  }
  const double qn = f.object.orientation.norm();
  if (std::abs(qn - 1.0) > 1e-6) throw ValidationError("object quaternion not unit");
  if (!(f.object.body_radius > 0 && f.object.body_height > 0 && f.object.cap_radius > 0 &&
        f.object.cap_height > 0)) {
    throw ValidationError("object sizes must be positive");
  }
  if (!(f.object.cap_radius < f.object.body_radius)) {
    throw ValidationError("cap radius must be smaller than body radius");
  }
}

}  // namespace bimanip::data
