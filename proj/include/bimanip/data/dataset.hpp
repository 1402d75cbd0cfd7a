#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bimanip/data/frame.hpp"

namespace bimanip::data {

// In-memory dataset plus the bookkeeping the manifest records. Immutable once
// loaded; safe to share across concurrent readers.
struct Dataset {
  std::vector<Frame> frames;
  std::vector<std::int64_t> trajectory_ids;  // parallel to frames
  int future_steps = 5;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::size_t size() const { return frames.size(); }
};

// Directory layout: manifest.json plus one shape-prefixed binary array per
// field (images f32, tactile u8, actions f32, future_actions f32, objects
// f32, timestamps f64, trajectory ids i64). Round trips are bit exact.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace bimanip::data
