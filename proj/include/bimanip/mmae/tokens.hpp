#pragma once

#include <vector>

#include "bimanip/mmae/config.hpp"
#include "bimanip/nn/params.hpp"

namespace bimanip::mmae {

using nn::Mat;

// Positions of each modality group within the full token sequence; CLS is
// always position 0.
struct TokenLayout {
  int visual = 0, tactile = 0, action = 0, nulls = 0;
  int visual_off = 1, tactile_off = 1, action_off = 1, null_off = 1;
  int total = 1;
};

TokenLayout token_layout(const ModelConfig& cfg);

// Image (HWC float, 224x224x3) -> one row per patch, patch pixels flattened
// row-major with interleaved channels.
Mat patchify(const std::vector<float>& image, int patch_size);

// Complement of a sorted masked-index list within [0, group_size).
std::vector<int> kept_indices(int group_size, const std::vector<int>& masked);

}  // namespace bimanip::mmae
