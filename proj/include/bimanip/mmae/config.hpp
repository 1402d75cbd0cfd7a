#pragma once

#include <string>
#include <vector>

namespace bimanip::mmae {

enum class ActionGranularity { PerJoint, PerFinger, PerHand };
enum class Hands { Dual, RightOnly };

// Architecture and ablation switches for the masked multimodal autoencoder.
struct ModelConfig {
  std::string name = "VTAO";

  int embed_dim = 256;
  int encoder_depth = 4;
  int encoder_heads = 8;
  int decoder_depth = 2;
  int decoder_heads = 8;
  int patch_size = 16;

  double mask_ratio_visual = 0.75;
  double mask_ratio_tactile = 0.5;
  double mask_ratio_action = 0.5;
  double mask_ratio_null = 0.0;

  int future_steps = 5;  // 0 = reconstruct the current action only
  ActionGranularity granularity = ActionGranularity::PerJoint;

  bool use_visual = true;
  bool use_tactile = true;
  bool use_action = true;
  bool recon_bottle = true;  // null tokens + object head
  bool pretrained = true;    // false = random frozen encoder ("-Scr")

  Hands tactile_hands = Hands::Dual;
  Hands action_hands = Hands::Dual;

  bool separate_decoders = false;
  bool learned_pos = true;
  int null_tokens = 8;

  // ---- derived quantities ----
  int patches_per_side() const { return 224 / patch_size; }
  int visual_token_count() const { return use_visual ? patches_per_side() * patches_per_side() : 0; }
  int patch_dim() const { return patch_size * patch_size * 3; }
  int tactile_token_count() const { return use_tactile ? (tactile_hands == Hands::Dual ? 40 : 20) : 0; }
  // Indices into the 40-dim tactile vector (left 20 then right 20).
  std::vector<int> tactile_dims() const;
  // Per-token groups of indices into the 48-dim action vector (left 24, right 24).
  std::vector<std::vector<int>> action_groups() const;
  int action_token_count() const;
  // All action dims covered by the groups, ascending; defines target columns.
  std::vector<int> action_dims() const;
  int null_token_count() const { return recon_bottle ? null_tokens : 0; }
  int total_tokens() const {
    return 1 + visual_token_count() + tactile_token_count() + action_token_count() +
           null_token_count();
  }
  bool any_modality() const { return use_visual || use_tactile || use_action; }
  bool joint_pretraining() const {
    return pretrained && (use_visual + use_tactile + use_action) > 1;
  }

  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// Baseline matrix: V, T, A, VT, VTA, VTO, VTA-Scr, VTAO, Base and variants
// v1..v8. Throws ConfigError on unknown names.
ModelConfig configure_ablation(const std::string& name);
const std::vector<std::string>& ablation_names();

}  // namespace bimanip::mmae
