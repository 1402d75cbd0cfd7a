#include "bimanip/env/bottle.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"
#include "bimanip/core/rng.hpp"

namespace bimanip::env {

namespace {

// Sampling ranges for procedural bottles (meters).
constexpr double kBodyRadius[2] = {0.030, 0.045};
constexpr double kBodyHeight[2] = {0.10, 0.17};
constexpr double kCapRadius[2] = {0.016, 0.026};
constexpr double kCapHeight[2] = {0.016, 0.026};
constexpr double kSetMargin = 0.06;  // min normalized L-inf distance train vs test

double normalized(double v, const double r[2]) { return (v - r[0]) / (r[1] - r[0]); }

double set_distance(const BottleSpec& a, const BottleSpec& b) {
  double d = std::abs(normalized(a.body_radius, kBodyRadius) - normalized(b.body_radius, kBodyRadius));
  d = std::max(d, std::abs(normalized(a.body_height, kBodyHeight) - normalized(b.body_height, kBodyHeight)));
  d = std::max(d, std::abs(normalized(a.cap_radius, kCapRadius) - normalized(b.cap_radius, kCapRadius)));
  d = std::max(d, std::abs(normalized(a.cap_height, kCapHeight) - normalized(b.cap_height, kCapHeight)));
  return d;
}

BottleSpec sample_bottle(Rng& rng) {
  BottleSpec s;
  s.body_radius = rng.uniform(kBodyRadius[0], kBodyRadius[1]);
  s.body_height = rng.uniform(kBodyHeight[0], kBodyHeight[1]);
  s.cap_radius = rng.uniform(kCapRadius[0], kCapRadius[1]);
  s.cap_height = rng.uniform(kCapHeight[0], kCapHeight[1]);
  s.k_c = 1.0 / s.cap_radius;  // rolling-without-slip gain
  return s;
}

}  // namespace

void validate_bottle(const BottleSpec& spec) {
  if (!(spec.body_radius > 0 && spec.body_height > 0 && spec.cap_radius > 0 &&
        spec.cap_height > 0 && spec.k_c > 0)) {
    throw ValidationError("bottle spec fields must be positive");
  }
  if (!(spec.cap_radius < spec.body_radius)) {
    throw ValidationError("cap radius must be smaller than body radius");
  }
}

BottleSets make_bottle_sets(std::uint64_t seed) {
  Rng rng(seed);
  BottleSets sets;
  for (int i = 0; i < 10; ++i) {
    sets.train.push_back(sample_bottle(rng));
    validate_bottle(sets.train.back());
  }
  while (sets.test.size() < 5) {
    BottleSpec candidate = sample_bottle(rng);
    bool far_enough = true;
    for (const auto& t : sets.train) {
      if (set_distance(candidate, t) < kSetMargin) {
        far_enough = false;
        break;
      }
    }
    if (far_enough) {
      validate_bottle(candidate);
      sets.test.push_back(candidate);
    }
  }
  return sets;
}

}  // namespace bimanip::env
