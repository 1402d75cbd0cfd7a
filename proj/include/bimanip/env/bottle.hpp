#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace bimanip::env {

// Procedural stand-in for a mesh bottle: two stacked cylinders plus the
// friction surrogate gain that converts tangential fingertip travel into cap
// rotation.
struct BottleSpec {
  double body_radius = 0.035;
  double body_height = 0.12;
  double cap_radius = 0.020;
  double cap_height = 0.020;
  double k_c = 50.0;  // rad of cap rotation per meter of tangential travel

  double cap_top_z() const { return body_height + cap_height; }

  // Fixed geometry used by tests and the scripted-controller fixture.
  static BottleSpec easy() { return BottleSpec{}; }
};

void validate_bottle(const BottleSpec& spec);

struct BottleSets {
  std::vector<BottleSpec> train;  // 10 ("seen")
  std::vector<BottleSpec> test;   // 5 ("unseen")
};

// Deterministic sampling from documented ranges; the two sets keep a minimum
// margin in normalized parameter space.
BottleSets make_bottle_sets(std::uint64_t seed);

}  // namespace bimanip::env
