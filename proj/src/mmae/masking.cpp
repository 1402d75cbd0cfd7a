#include "bimanip/mmae/masking.hpp"

#include <cmath>

namespace bimanip::mmae {

int mask_count(int group_size, double ratio) {
  return static_cast<int>(std::llround(ratio * group_size));
}

MaskPlan sample_mask(const ModelConfig& cfg, Rng& rng) {
  MaskPlan plan;
  plan.seed = rng.seed();
  plan.visual = rng.choose(cfg.visual_token_count(),
                           mask_count(cfg.visual_token_count(), cfg.mask_ratio_visual));
  plan.tactile = rng.choose(cfg.tactile_token_count(),
                            mask_count(cfg.tactile_token_count(), cfg.mask_ratio_tactile));
  plan.action = rng.choose(cfg.action_token_count(),
                           mask_count(cfg.action_token_count(), cfg.mask_ratio_action));
  plan.null_tokens = rng.choose(cfg.null_token_count(),
                                mask_count(cfg.null_token_count(), cfg.mask_ratio_null));
  return plan;
}

MaskPlan empty_mask() { return MaskPlan{}; }

}  // namespace bimanip::mmae
