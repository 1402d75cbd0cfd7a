#include "bimanip/env/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bimanip::env {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Vec3 kLightDir = Vec3(-0.40, 0.30, 0.85).normalized();

struct Hit {
  double t = kInf;
  Vec3 normal = Vec3::UnitZ();
};

inline void shade(float* px, const Rgb& base, const Vec3& n) {
  const double lambert = 0.35 + 0.65 * std::max(0.0, n.dot(kLightDir));
  px[0] = static_cast<float>(std::min(1.0, base.r * lambert));
  px[1] = static_cast<float>(std::min(1.0, base.g * lambert));
  px[2] = static_cast<float>(std::min(1.0, base.b * lambert));
}

bool ray_sphere(const Vec3& o, const Vec3& d, const SphereItem& s, Hit& hit) {
  const Vec3 oc = o - s.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0) return false;
  const double t = -b - std::sqrt(disc);
  if (t <= 1e-6 || t >= hit.t) return false;
  hit.t = t;
  hit.normal = (o + t * d - s.center).normalized();
  return true;
}

bool ray_cylinder(const Vec3& o, const Vec3& d, const CylinderItem& cyl, Hit& hit) {
  // Work in the cylinder frame: axis along z.
  Vec3 w = cyl.axis;
  Vec3 u = std::abs(w.z()) < 0.9 ? w.cross(Vec3::UnitZ()).normalized()
                                 : w.cross(Vec3::UnitX()).normalized();
  Vec3 v = w.cross(u);
  const Vec3 rel = o - cyl.center;
  const Vec3 ol(rel.dot(u), rel.dot(v), rel.dot(w));
  const Vec3 dl(d.dot(u), d.dot(v), d.dot(w));
  const double hh = 0.5 * cyl.height;
  bool found = false;

  // Lateral surface.
  const double a = dl.x() * dl.x() + dl.y() * dl.y();
  if (a > 1e-14) {
    const double b = ol.x() * dl.x() + ol.y() * dl.y();
    const double c = ol.x() * ol.x() + ol.y() * ol.y() - cyl.radius * cyl.radius;
    const double disc = b * b - a * c;
    if (disc >= 0) {
      const double t = (-b - std::sqrt(disc)) / a;
      const double z = ol.z() + t * dl.z();
      if (t > 1e-6 && t < hit.t && std::abs(z) <= hh) {
        hit.t = t;
        const Vec3 pl = ol + t * dl;
        hit.normal = (u * pl.x() + v * pl.y()).normalized();
        found = true;
      }
    }
  }
  // End caps.
  if (std::abs(dl.z()) > 1e-14) {
    for (const double zc : {hh, -hh}) {
      const double t = (zc - ol.z()) / dl.z();
      if (t <= 1e-6 || t >= hit.t) continue;
      const double px = ol.x() + t * dl.x();
      const double py = ol.y() + t * dl.y();
      if (px * px + py * py <= cyl.radius * cyl.radius) {
        hit.t = t;
        hit.normal = zc > 0 ? w : Vec3(-w);
        found = true;
      }
    }
  }
  return found;
}

}  // namespace

Renderer::Renderer(const Camera& cam, double table_z) : cam_(cam) {
  const Vec3 fwd = (cam_.target - cam_.eye).normalized();
  const Vec3 right = fwd.cross(cam_.up).normalized();
  const Vec3 down = fwd.cross(right).normalized();
  world_to_cam_.row(0) = right.transpose();
  world_to_cam_.row(1) = down.transpose();
  world_to_cam_.row(2) = fwd.transpose();
  focal_px_ = 0.5 * kSize / std::tan(0.5 * cam_.vertical_fov_rad);

  background_.resize(kSize * kSize * 3);
  background_depth_.resize(kSize * kSize);
  const Rgb table{0.62f, 0.60f, 0.56f};
  const Rgb sky{0.08f, 0.09f, 0.12f};
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      const Vec3 dir = world_to_cam_.transpose() *
                       Vec3((x + 0.5 - 0.5 * kSize) / focal_px_,
                            (y + 0.5 - 0.5 * kSize) / focal_px_, 1.0)
                           .normalized();
      float* px = &background_[(y * kSize + x) * 3];
      double depth = kInf;
      if (dir.z() < -1e-9) {
        const double t = (table_z - cam_.eye.z()) / dir.z();
        const Vec3 p = cam_.eye + t * dir;
        if (std::abs(p.x()) < 0.6 && std::abs(p.y()) < 0.6) {
          depth = t;
          shade(px, table, Vec3::UnitZ());
          background_depth_[y * kSize + x] = static_cast<float>(depth);
          continue;
        }
      }
      px[0] = sky.r;
      px[1] = sky.g;
      px[2] = sky.b;
      background_depth_[y * kSize + x] = std::numeric_limits<float>::infinity();
    }
  }
}

std::vector<float> Renderer::render(const Scene& scene) const {
  std::vector<float> img = background_;
  std::vector<float> depth = background_depth_;

  // Conservative screen bound of a world-space AABB corner set.
  auto raster_bbox = [&](const Vec3& center, double extent, int& x0, int& x1, int& y0,
                         int& y1) -> bool {
    double umin = kInf, umax = -kInf, vmin = kInf, vmax = -kInf;
    bool any_front = false;
    for (int i = 0; i < 8; ++i) {
      const Vec3 corner = center + Vec3(i & 1 ? extent : -extent, i & 2 ? extent : -extent,
                                        i & 4 ? extent : -extent);
      const Vec3 c = world_to_cam_ * (corner - cam_.eye);
      if (c.z() < 1e-4) continue;
      any_front = true;
      const double u = 0.5 * kSize + focal_px_ * c.x() / c.z();
      const double v = 0.5 * kSize + focal_px_ * c.y() / c.z();
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    if (!any_front) return false;
    x0 = std::max(0, static_cast<int>(std::floor(umin)) - 1);
    x1 = std::min(kSize - 1, static_cast<int>(std::ceil(umax)) + 1);
    y0 = std::max(0, static_cast<int>(std::floor(vmin)) - 1);
    y1 = std::min(kSize - 1, static_cast<int>(std::ceil(vmax)) + 1);
    return x0 <= x1 && y0 <= y1;
  };

  auto raster = [&](const Vec3& center, double extent, const Rgb& color, auto&& intersect) {
    int x0, x1, y0, y1;
    if (!raster_bbox(center, extent, x0, x1, y0, y1)) return;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec3 dir = world_to_cam_.transpose() *
                         Vec3((x + 0.5 - 0.5 * kSize) / focal_px_,
                              (y + 0.5 - 0.5 * kSize) / focal_px_, 1.0)
                             .normalized();
        Hit hit;
        hit.t = depth[y * kSize + x];
        if (intersect(cam_.eye, dir, hit)) {
          depth[y * kSize + x] = static_cast<float>(hit.t);
          shade(&img[(y * kSize + x) * 3], color, hit.normal);
        }
      }
    }
  };

  for (const auto& cyl : scene.cylinders) {
    raster(cyl.center, cyl.radius + 0.5 * cyl.height, cyl.color,
           [&](const Vec3& o, const Vec3& d, Hit& h) { return ray_cylinder(o, d, cyl, h); });
  }
  for (const auto& s : scene.spheres) {
    raster(s.center, s.radius, s.color,
           [&](const Vec3& o, const Vec3& d, Hit& h) { return ray_sphere(o, d, s, h); });
  }
  return img;
}

}  // namespace bimanip::env
