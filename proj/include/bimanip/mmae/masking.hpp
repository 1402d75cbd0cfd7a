#pragma once

#include <cstdint>
#include <vector>

#include "bimanip/core/rng.hpp"
#include "bimanip/mmae/config.hpp"

namespace bimanip::mmae {

// Sorted masked-token indices per modality group. The CLS token is not part
// of any group and can never be masked.
struct MaskPlan {
  std::vector<int> visual;
  std::vector<int> tactile;
  std::vector<int> action;
  std::vector<int> null_tokens;
  std::uint64_t seed = 0;
};

// round(ratio * group_size), the exact count the plan must contain.
int mask_count(int group_size, double ratio);

// Uniform sampling without replacement per modality.
MaskPlan sample_mask(const ModelConfig& cfg, Rng& rng);

// All-kept plan (inference / featurization path).
MaskPlan empty_mask();

}  // namespace bimanip::mmae
