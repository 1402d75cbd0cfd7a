#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bimanip/data/frame.hpp"
#include "bimanip/mmae/config.hpp"
#include "bimanip/mmae/masking.hpp"
#include "bimanip/mmae/tokens.hpp"
#include "bimanip/nn/ops.hpp"

namespace bimanip::mmae {

using nn::GradStore;
using nn::Mat;
using nn::ParamStore;

struct LossWeights {
  double image = 1.0;
  double tactile = 2.0;
  double bottle = 5.0;
  double action = 2.0;
};

struct LossBreakdown {
  double total = 0, image = 0, tactile = 0, bottle = 0, action = 0;
};

// Per-sample model inputs, already shaped for the active modalities.
struct Inputs {
  Mat patches;               // visual_tokens x patch_dim
  Eigen::VectorXd tactile;   // tactile_tokens
  Eigen::VectorXd action;    // full 48-dim current action
};

struct Targets {
  Mat patches;
  Eigen::VectorXd tactile;
  Mat action_stack;          // (1 + p) x action_dims
  Eigen::VectorXd object;    // 11
};

struct Reconstruction {
  Mat visual;                 // visual_tokens x patch_dim
  Eigen::VectorXd tactile;    // tactile_tokens (regressed logits)
  Mat actions;                // (1 + p) x action_dims
  Eigen::VectorXd object;     // 11, quaternion part normalized
  Eigen::VectorXd object_raw; // head output before normalization
};

// Masked visual-tactile-action autoencoder with object regression. All
// forward/backward passes are per sample; batching is a loop (parallelizable)
// with gradients reduced in index order.
class MultimodalAutoencoder {
 public:
  struct Tape;

  MultimodalAutoencoder(ModelConfig cfg, std::uint64_t init_seed);

  const ModelConfig& config() const { return cfg_; }
  const TokenLayout& layout() const { return layout_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  std::uint64_t init_seed() const { return init_seed_; }
  std::uint64_t digest() const { return store_.digest(); }

  Inputs inputs_from_frame(const data::Frame& frame) const;
  Inputs inputs_from_obs(const std::vector<float>& image,
                         const std::vector<std::uint8_t>& tactile40,
                         const Eigen::VectorXd& action48) const;
  Targets targets_from_frame(const data::Frame& frame) const;

  // Full embedded token sequence (CLS row 0), before masking.
  Mat tokenize(const Inputs& in) const;

  // Masked tokens are dropped before the encoder; row order is CLS then the
  // kept tokens of each group.
  Mat encode(const Inputs& in, const MaskPlan& plan, Tape* tape = nullptr) const;

  Reconstruction decode(const Mat& latents, const MaskPlan& plan, Tape* tape) const;

  LossBreakdown loss(const Reconstruction& recon, const Targets& targets,
                     const MaskPlan& plan, const LossWeights& weights) const;

  // forward + loss (+ backward when grads is non-null). Returns the loss.
  LossBreakdown train_sample(const data::Frame& frame, const MaskPlan& plan,
                             const LossWeights& weights, GradStore* grads,
                             Reconstruction* recon_out = nullptr) const;

  // Zero-mask encoding; returns the CLS latent (the RL feature).
  Eigen::VectorXd cls_feature(const Inputs& in) const;

  struct Tape {
    MaskPlan plan;
    Inputs inputs;
    std::vector<int> keep;  // full-sequence indices fed to the encoder
    std::vector<nn::BlockCache> enc_caches;
    nn::LayerNormCache enc_ln_cache;
    // One entry per decoder stack (1 shared or 4 separate).
    std::vector<std::vector<nn::BlockCache>> dec_caches;
    std::vector<nn::LayerNormCache> dec_ln_caches;
    std::vector<Mat> dec_out;
    Mat object_feat;  // pooled null latents (1 x D)
  };

 private:
  struct DecoderStack {
    std::vector<nn::BlockRef> blocks;
    nn::LayerNormRef ln;
  };

  enum DecoderRole { kVisual = 0, kTactile = 1, kAction = 2, kObject = 3 };
  const DecoderStack& stack_for(DecoderRole role) const;
  int stack_index(DecoderRole role) const;

  Mat sinusoidal_pos(int rows) const;
  void backward(const Tape& tape, const Targets& targets, const LossBreakdown& lb,
                const Reconstruction& recon, const LossWeights& weights,
                GradStore& grads) const;

  ModelConfig cfg_;
  TokenLayout layout_;
  std::uint64_t init_seed_;
  ParamStore store_;

  int cls_ = -1, mask_token_ = -1, null_tokens_ = -1;
  nn::LinearRef patch_embed_;
  int tac_w_ = -1, tac_b_ = -1;
  std::vector<nn::LinearRef> act_embed_;
  int pos_enc_ = -1, pos_dec_ = -1;  // learned position tables (full sequence)
  Mat sin_pos_;                      // used when learned_pos == false

  std::vector<nn::BlockRef> enc_blocks_;
  nn::LayerNormRef enc_ln_;
  std::vector<DecoderStack> decoders_;

  nn::LinearRef head_visual_, head_tactile_, head_object_;
  std::vector<nn::LinearRef> head_action_;
};

// Self-describing checkpoint: config + metadata JSON followed by weights.
struct CheckpointMeta {
  ModelConfig config;
  std::uint64_t init_seed = 0;
  int epoch = 0;
  std::vector<LossBreakdown> history;
};

void save_checkpoint(const MultimodalAutoencoder& net, const CheckpointMeta& meta,
                     const std::string& path);
std::unique_ptr<MultimodalAutoencoder> load_checkpoint(const std::string& path,
                                                       CheckpointMeta* meta = nullptr);

}  // namespace bimanip::mmae
