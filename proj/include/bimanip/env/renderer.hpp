#pragma once

#include <vector>

#include "bimanip/core/pose.hpp"

namespace bimanip::env {

struct Camera {
  Vec3 eye{-0.45, 0.0, 0.50};
  Vec3 target{0.0, 0.0, 0.10};
  Vec3 up{0.0, 0.0, 1.0};
  double vertical_fov_rad = 0.96;  // ~55 degrees
};

struct Rgb {
  float r, g, b;
};

struct SphereItem {
  Vec3 center;
  double radius;
  Rgb color;
};

// Finite closed cylinder: centered at `center`, axis `axis` (unit), total
// length `height`.
struct CylinderItem {
  Vec3 center;
  Vec3 axis;
  double radius;
  double height;
  Rgb color;
};

struct Scene {
  std::vector<SphereItem> spheres;
  std::vector<CylinderItem> cylinders;
};

// Deterministic z-buffered rasterizer over a fixed camera. The table plane
// and sky are cached at construction; per-frame work touches only the pixels
// under each primitive's projected bound.
class Renderer {
 public:
  static constexpr int kSize = 224;

  explicit Renderer(const Camera& cam, double table_z = 0.0);

  // RGB float image in [0,1], HWC layout, kSize x kSize x 3.
  std::vector<float> render(const Scene& scene) const;

  const Camera& camera() const { return cam_; }

 private:
  Camera cam_;
  double focal_px_;
  Mat3 world_to_cam_;  // rows: right, down, forward
  std::vector<float> background_;
  std::vector<float> background_depth_;
};

}  // namespace bimanip::env
