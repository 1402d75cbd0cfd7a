#include "bimanip/mmae/tokens.hpp"

#include "bimanip/core/errors.hpp"

namespace bimanip::mmae {

TokenLayout token_layout(const ModelConfig& cfg) {
  TokenLayout l;
  l.visual = cfg.visual_token_count();
  l.tactile = cfg.tactile_token_count();
  l.action = cfg.action_token_count();
  l.nulls = cfg.null_token_count();
  l.visual_off = 1;
  l.tactile_off = l.visual_off + l.visual;
  l.action_off = l.tactile_off + l.tactile;
  l.null_off = l.action_off + l.action;
  l.total = l.null_off + l.nulls;
  return l;
}

Mat patchify(const std::vector<float>& image, int patch_size) {
  constexpr int kSize = 224;
  if (image.size() != static_cast<std::size_t>(kSize * kSize * 3)) {
    throw DimensionError("patchify: image must be 224x224x3");
  }
  const int per_side = kSize / patch_size;
  Mat out(per_side * per_side, patch_size * patch_size * 3);
  for (int py = 0; py < per_side; ++py) {
    for (int px = 0; px < per_side; ++px) {
      const int row = py * per_side + px;
      int col = 0;
      for (int dy = 0; dy < patch_size; ++dy) {
        const int y = py * patch_size + dy;
        for (int dx = 0; dx < patch_size; ++dx) {
          const int x = px * patch_size + dx;
          const std::size_t base = static_cast<std::size_t>((y * kSize + x) * 3);
          out(row, col++) = image[base];
          out(row, col++) = image[base + 1];
          out(row, col++) = image[base + 2];
        }
      }
    }
  }
  return out;
}

std::vector<int> kept_indices(int group_size, const std::vector<int>& masked) {
  std::vector<int> kept;
  kept.reserve(static_cast<std::size_t>(group_size) - masked.size());
  std::size_t m = 0;
  for (int i = 0; i < group_size; ++i) {
    if (m < masked.size() && masked[m] == i) {
      ++m;
    } else {
      kept.push_back(i);
    }
  }
  return kept;
}

}  // namespace bimanip::mmae
