#include "bimanip/mmae/net.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include <json.hpp>

#include "bimanip/core/errors.hpp"

namespace bimanip::mmae {

namespace {

constexpr double kNormFloor = 1e-15;  // residual norms below this get no gradient

Eigen::VectorXd normalize_object(const Eigen::VectorXd& raw) {
  Eigen::VectorXd out = raw;
  const double n = raw.segment(3, 4).norm();
  out.segment(3, 4) /= std::max(n, 1e-12);
  return out;
}

}  // namespace

MultimodalAutoencoder::MultimodalAutoencoder(ModelConfig cfg, std::uint64_t init_seed)
    : cfg_(std::move(cfg)), init_seed_(init_seed) {
  cfg_.validate();
  layout_ = token_layout(cfg_);
  const int D = cfg_.embed_dim;

  cls_ = store_.add("cls", 1, D);
  mask_token_ = store_.add("mask_token", 1, D);
  if (cfg_.use_visual) patch_embed_ = nn::add_linear(store_, "patch_embed", cfg_.patch_dim(), D);
  if (cfg_.use_tactile) {
    tac_w_ = store_.add("tactile_embed.w", 1, D);
    tac_b_ = store_.add("tactile_embed.b", 1, D);
  }
  if (cfg_.use_action) {
    const auto groups = cfg_.action_groups();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      act_embed_.push_back(nn::add_linear(store_, "action_embed.g" + std::to_string(i),
                                          static_cast<int>(groups[i].size()), D));
    }
  }
  if (cfg_.recon_bottle) null_tokens_ = store_.add("null_tokens", cfg_.null_token_count(), D);

  if (cfg_.learned_pos) {
    pos_enc_ = store_.add("pos_enc", layout_.total, D);
    pos_dec_ = store_.add("pos_dec", layout_.total, D);
  } else {
    sin_pos_ = sinusoidal_pos(layout_.total);
  }

  for (int d = 0; d < cfg_.encoder_depth; ++d) {
    enc_blocks_.push_back(nn::add_block(store_, "enc." + std::to_string(d), D));
  }
  enc_ln_ = nn::add_layernorm(store_, "enc.ln", D);

  const int n_stacks = cfg_.separate_decoders
                           ? (cfg_.use_visual + cfg_.use_tactile + cfg_.use_action +
                              cfg_.recon_bottle)
                           : 1;
  for (int sidx = 0; sidx < n_stacks; ++sidx) {
    DecoderStack stack;
    for (int d = 0; d < cfg_.decoder_depth; ++d) {
      stack.blocks.push_back(nn::add_block(
          store_, "dec" + std::to_string(sidx) + "." + std::to_string(d), D));
    }
    stack.ln = nn::add_layernorm(store_, "dec" + std::to_string(sidx) + ".ln", D);
    decoders_.push_back(std::move(stack));
  }

  if (cfg_.use_visual) head_visual_ = nn::add_linear(store_, "head.visual", D, cfg_.patch_dim());
  if (cfg_.use_tactile) head_tactile_ = nn::add_linear(store_, "head.tactile", D, 1);
  if (cfg_.use_action) {
    const auto groups = cfg_.action_groups();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      head_action_.push_back(
          nn::add_linear(store_, "head.action.g" + std::to_string(i), D,
                         (1 + cfg_.future_steps) * static_cast<int>(groups[i].size())));
    }
  }
  if (cfg_.recon_bottle) head_object_ = nn::add_linear(store_, "head.object", D, 11);

  Rng rng(init_seed_);
  store_.init_normal(rng, 0.02);
  // Tokens and position tables are 1-or-few-row matrices the generic init
  // skips; give them the same scale.
  auto init_rows = [&](int idx) {
    if (idx < 0) return;
    Mat& m = store_.value(idx);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, 0.02);
  };
  init_rows(cls_);
  init_rows(mask_token_);
  init_rows(null_tokens_);
  init_rows(tac_w_);
  init_rows(pos_enc_);
  init_rows(pos_dec_);
  // Bias the object head toward a unit quaternion so the normalization in the
  // loss starts well-conditioned.
  if (cfg_.recon_bottle) {
    Mat& b = store_.value(head_object_.b);
    b.setZero();
    b(0, 3) = 1.0;
    b(0, 7) = 0.05;
    b(0, 8) = 0.05;
    b(0, 9) = 0.05;
    b(0, 10) = 0.05;
  }
}

int MultimodalAutoencoder::stack_index(DecoderRole role) const {
  if (!cfg_.separate_decoders) return 0;
  int idx = 0;
  if (role == kVisual) return cfg_.use_visual ? idx : -1;
  idx += cfg_.use_visual ? 1 : 0;
  if (role == kTactile) return cfg_.use_tactile ? idx : -1;
  idx += cfg_.use_tactile ? 1 : 0;
  if (role == kAction) return cfg_.use_action ? idx : -1;
  idx += cfg_.use_action ? 1 : 0;
  return cfg_.recon_bottle ? idx : -1;
}

const MultimodalAutoencoder::DecoderStack& MultimodalAutoencoder::stack_for(
    DecoderRole role) const {
  return decoders_[static_cast<std::size_t>(stack_index(role))];
}

Mat MultimodalAutoencoder::sinusoidal_pos(int rows) const {
  const int D = cfg_.embed_dim;
  Mat pos(rows, D);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < D; k += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(k) / D);
      pos(r, k) = std::sin(r * freq);
      if (k + 1 < D) pos(r, k + 1) = std::cos(r * freq);
    }
  }
  return pos;
}

Inputs MultimodalAutoencoder::inputs_from_frame(const data::Frame& frame) const {
  std::vector<std::uint8_t> tact = frame.tactile;
  Eigen::VectorXd action(48);
  for (int i = 0; i < 48; ++i) action[i] = frame.action[static_cast<std::size_t>(i)];
  return inputs_from_obs(frame.image, tact, action);
}

Inputs MultimodalAutoencoder::inputs_from_obs(const std::vector<float>& image,
                                              const std::vector<std::uint8_t>& tactile40,
                                              const Eigen::VectorXd& action48) const {
  Inputs in;
  if (cfg_.use_visual) in.patches = patchify(image, cfg_.patch_size);
  if (cfg_.use_tactile) {
    const auto dims = cfg_.tactile_dims();
    in.tactile.resize(static_cast<Eigen::Index>(dims.size()));
    for (std::size_t i = 0; i < dims.size(); ++i) {
      in.tactile[static_cast<Eigen::Index>(i)] =
          static_cast<double>(tactile40[static_cast<std::size_t>(dims[i])]);
    }
  }
  if (cfg_.use_action) {
    if (action48.size() != 48) throw DimensionError("inputs_from_obs: action must be 48-dim");
    in.action = action48;
  }
  return in;
}

Targets MultimodalAutoencoder::targets_from_frame(const data::Frame& frame) const {
  Targets t;
  if (cfg_.use_visual) t.patches = patchify(frame.image, cfg_.patch_size);
  if (cfg_.use_tactile) {
    const auto dims = cfg_.tactile_dims();
    t.tactile.resize(static_cast<Eigen::Index>(dims.size()));
    for (std::size_t i = 0; i < dims.size(); ++i) {
      t.tactile[static_cast<Eigen::Index>(i)] =
          static_cast<double>(frame.tactile[static_cast<std::size_t>(dims[i])]);
    }
  }
  if (cfg_.use_action) {
    const int p = cfg_.future_steps;
    if (frame.future_steps() < p) {
      throw DimensionError("frame provides fewer future actions than the model expects");
    }
    const auto dims = cfg_.action_dims();
    t.action_stack.resize(1 + p, static_cast<Eigen::Index>(dims.size()));
    for (std::size_t c = 0; c < dims.size(); ++c) {
      t.action_stack(0, static_cast<Eigen::Index>(c)) =
          frame.action[static_cast<std::size_t>(dims[c])];
      for (int s = 0; s < p; ++s) {
        t.action_stack(1 + s, static_cast<Eigen::Index>(c)) =
            frame.future_actions[static_cast<std::size_t>(s * 48 + dims[c])];
      }
    }
  }
  if (cfg_.recon_bottle) {
    t.object.resize(11);
    double flat[data::ObjectLabel::kDims];
    frame.object.to_flat(flat);
    for (int i = 0; i < 11; ++i) t.object[i] = flat[i];
  }
  return t;
}

Mat MultimodalAutoencoder::tokenize(const Inputs& in) const {
  const int D = cfg_.embed_dim;
  Mat x(layout_.total, D);
  x.row(0) = store_.value(cls_).row(0);

  if (cfg_.use_visual) {
    if (in.patches.rows() != layout_.visual || in.patches.cols() != cfg_.patch_dim()) {
      throw DimensionError("tokenize: patch matrix has the wrong shape");
    }
    x.middleRows(layout_.visual_off, layout_.visual) =
        nn::linear_fwd(store_, patch_embed_, in.patches);
  }
  if (cfg_.use_tactile) {
    if (in.tactile.size() != layout_.tactile) {
      throw DimensionError("tokenize: tactile vector has the wrong length");
    }
    for (int i = 0; i < layout_.tactile; ++i) {
      x.row(layout_.tactile_off + i) =
          in.tactile[i] * store_.value(tac_w_).row(0) + store_.value(tac_b_).row(0);
    }
  }
  if (cfg_.use_action) {
    if (in.action.size() != 48) throw DimensionError("tokenize: action vector must be 48-dim");
    const auto groups = cfg_.action_groups();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      Mat vals(1, static_cast<Eigen::Index>(groups[i].size()));
      for (std::size_t k = 0; k < groups[i].size(); ++k) {
        vals(0, static_cast<Eigen::Index>(k)) = in.action[groups[i][k]];
      }
      x.row(layout_.action_off + static_cast<int>(i)) =
          nn::linear_fwd(store_, act_embed_[i], vals).row(0);
    }
  }
  if (cfg_.recon_bottle) {
    x.middleRows(layout_.null_off, layout_.nulls) = store_.value(null_tokens_);
  }

  if (cfg_.learned_pos) {
    x += store_.value(pos_enc_);
  } else {
    x += sin_pos_;
  }
  return x;
}

Mat MultimodalAutoencoder::encode(const Inputs& in, const MaskPlan& plan, Tape* tape) const {
  const Mat x_full = tokenize(in);

  std::vector<int> keep;
  keep.push_back(0);
  auto push_kept = [&](int offset, int count, const std::vector<int>& masked) {
    for (int i : kept_indices(count, masked)) keep.push_back(offset + i);
  };
  push_kept(layout_.visual_off, layout_.visual, plan.visual);
  push_kept(layout_.tactile_off, layout_.tactile, plan.tactile);
  push_kept(layout_.action_off, layout_.action, plan.action);
  push_kept(layout_.null_off, layout_.nulls, plan.null_tokens);

  Mat h(static_cast<Eigen::Index>(keep.size()), cfg_.embed_dim);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    h.row(static_cast<Eigen::Index>(r)) = x_full.row(keep[r]);
  }

  if (tape) {
    tape->plan = plan;
    tape->inputs = in;
    tape->keep = keep;
    tape->enc_caches.resize(enc_blocks_.size());
  }
  for (std::size_t d = 0; d < enc_blocks_.size(); ++d) {
    h = nn::block_fwd(store_, enc_blocks_[d], cfg_.encoder_heads, h,
                      tape ? &tape->enc_caches[d] : nullptr);
  }
  h = nn::layernorm_fwd(store_, enc_ln_, h, tape ? &tape->enc_ln_cache : nullptr);
  return h;
}

Reconstruction MultimodalAutoencoder::decode(const Mat& latents, const MaskPlan& plan,
                                             Tape* tape) const {
  const int D = cfg_.embed_dim;
  // Rebuild the full sequence: kept positions carry encoder latents, masked
  // positions the shared mask token; decoder position codes go everywhere.
  std::vector<int> keep;
  if (tape) {
    keep = tape->keep;
  } else {
    keep.push_back(0);
    auto push_kept = [&](int offset, int count, const std::vector<int>& masked) {
      for (int i : kept_indices(count, masked)) keep.push_back(offset + i);
    };
    push_kept(layout_.visual_off, layout_.visual, plan.visual);
    push_kept(layout_.tactile_off, layout_.tactile, plan.tactile);
    push_kept(layout_.action_off, layout_.action, plan.action);
    push_kept(layout_.null_off, layout_.nulls, plan.null_tokens);
  }
  if (latents.rows() != static_cast<Eigen::Index>(keep.size())) {
    throw DimensionError("decode: latent count does not match the mask plan");
  }

  Mat y0(layout_.total, D);
  for (int t = 0; t < layout_.total; ++t) y0.row(t) = store_.value(mask_token_).row(0);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    y0.row(keep[r]) = latents.row(static_cast<Eigen::Index>(r));
  }
  if (cfg_.learned_pos) {
    y0 += store_.value(pos_dec_);
  } else {
    y0 += sin_pos_;
  }

  const int n_stacks = static_cast<int>(decoders_.size());
  std::vector<Mat> outs(static_cast<std::size_t>(n_stacks));
  if (tape) {
    tape->dec_caches.assign(static_cast<std::size_t>(n_stacks), {});
    tape->dec_ln_caches.assign(static_cast<std::size_t>(n_stacks), {});
    tape->dec_out.assign(static_cast<std::size_t>(n_stacks), Mat());
  }
  for (int sidx = 0; sidx < n_stacks; ++sidx) {
    Mat y = y0;
    auto& stack = decoders_[static_cast<std::size_t>(sidx)];
    if (tape) tape->dec_caches[static_cast<std::size_t>(sidx)].resize(stack.blocks.size());
    for (std::size_t d = 0; d < stack.blocks.size(); ++d) {
      y = nn::block_fwd(store_, stack.blocks[d], cfg_.decoder_heads, y,
                        tape ? &tape->dec_caches[static_cast<std::size_t>(sidx)][d] : nullptr);
    }
    y = nn::layernorm_fwd(store_, stack.ln, y,
                          tape ? &tape->dec_ln_caches[static_cast<std::size_t>(sidx)] : nullptr);
    outs[static_cast<std::size_t>(sidx)] = std::move(y);
    if (tape) tape->dec_out[static_cast<std::size_t>(sidx)] = outs[static_cast<std::size_t>(sidx)];
  }

  Reconstruction recon;
  if (cfg_.use_visual) {
    const Mat rows = outs[static_cast<std::size_t>(stack_index(kVisual))].middleRows(
        layout_.visual_off, layout_.visual);
    recon.visual = nn::linear_fwd(store_, head_visual_, rows);
  }
  if (cfg_.use_tactile) {
    const Mat rows = outs[static_cast<std::size_t>(stack_index(kTactile))].middleRows(
        layout_.tactile_off, layout_.tactile);
    recon.tactile = nn::linear_fwd(store_, head_tactile_, rows).col(0);
  }
  if (cfg_.use_action) {
    const auto groups = cfg_.action_groups();
    const auto dims = cfg_.action_dims();
    std::vector<int> col_of(48, -1);
    for (std::size_t c = 0; c < dims.size(); ++c) col_of[static_cast<std::size_t>(dims[c])] = static_cast<int>(c);
    const int p = cfg_.future_steps;
    recon.actions.setZero(1 + p, static_cast<Eigen::Index>(dims.size()));
    const Mat& src = outs[static_cast<std::size_t>(stack_index(kAction))];
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const Mat row = src.row(layout_.action_off + static_cast<int>(i));
      const Mat out = nn::linear_fwd(store_, head_action_[i], row);
      const int g = static_cast<int>(groups[i].size());
      for (int s = 0; s <= p; ++s) {
        for (int k = 0; k < g; ++k) {
          recon.actions(s, col_of[static_cast<std::size_t>(groups[i][static_cast<std::size_t>(k)])]) =
              out(0, s * g + k);
        }
      }
    }
  }
  if (cfg_.recon_bottle) {
    const Mat& src = outs[static_cast<std::size_t>(stack_index(kObject))];
    Mat feat = src.middleRows(layout_.null_off, layout_.nulls).colwise().mean();
    recon.object_raw = nn::linear_fwd(store_, head_object_, feat).row(0).transpose();
    recon.object = normalize_object(recon.object_raw);
    if (tape) tape->object_feat = std::move(feat);
  }
  return recon;
}

LossBreakdown MultimodalAutoencoder::loss(const Reconstruction& recon, const Targets& targets,
                                          const MaskPlan& plan,
                                          const LossWeights& weights) const {
  LossBreakdown lb;
  if (cfg_.use_visual && !plan.visual.empty()) {
    double ss = 0;
    for (int i : plan.visual) ss += (recon.visual.row(i) - targets.patches.row(i)).squaredNorm();
    lb.image = std::sqrt(ss);
  }
  if (cfg_.use_tactile && !plan.tactile.empty()) {
    double ss = 0;
    for (int i : plan.tactile) {
      const double d = recon.tactile[i] - targets.tactile[i];
      ss += d * d;
    }
    lb.tactile = std::sqrt(ss);
  }
  if (cfg_.use_action) {
    lb.action = (recon.actions - targets.action_stack).norm();
  }
  if (cfg_.recon_bottle) {
    lb.bottle = (recon.object - targets.object).norm();
  }
  lb.total = weights.image * lb.image + weights.tactile * lb.tactile +
             weights.bottle * lb.bottle + weights.action * lb.action;
  if (!std::isfinite(lb.total)) {
    throw TrainingError("non-finite loss (img=" + std::to_string(lb.image) +
                        " tac=" + std::to_string(lb.tactile) + " bot=" +
                        std::to_string(lb.bottle) + " act=" + std::to_string(lb.action) + ")");
  }
  return lb;
}

LossBreakdown MultimodalAutoencoder::train_sample(const data::Frame& frame,
                                                  const MaskPlan& plan,
                                                  const LossWeights& weights,
                                                  GradStore* grads,
                                                  Reconstruction* recon_out) const {
  const Inputs in = inputs_from_frame(frame);
  const Targets targets = targets_from_frame(frame);
  Tape tape;
  Tape* tp = grads ? &tape : nullptr;
  const Mat latents = encode(in, plan, tp);
  const Reconstruction recon = decode(latents, plan, tp);
  const LossBreakdown lb = loss(recon, targets, plan, weights);
  if (grads) backward(tape, targets, lb, recon, weights, *grads);
  if (recon_out) *recon_out = recon;
  return lb;
}

void MultimodalAutoencoder::backward(const Tape& tape, const Targets& targets,
                                     const LossBreakdown& lb, const Reconstruction& recon,
                                     const LossWeights& weights, GradStore& grads) const {
  const int D = cfg_.embed_dim;
  const int n_stacks = static_cast<int>(decoders_.size());
  std::vector<Mat> d_dec(static_cast<std::size_t>(n_stacks),
                         Mat::Zero(layout_.total, D));

  // Head gradients. Each L is a Euclidean norm, so dL/dr = r / ||r||.
  if (cfg_.use_visual && lb.image > kNormFloor) {
    Mat d_vis = Mat::Zero(layout_.visual, cfg_.patch_dim());
    const double s = weights.image / lb.image;
    for (int i : tape.plan.visual) {
      d_vis.row(i) = s * (recon.visual.row(i) - targets.patches.row(i));
    }
    const Mat rows = tape.dec_out[static_cast<std::size_t>(stack_index(kVisual))].middleRows(
        layout_.visual_off, layout_.visual);
    d_dec[static_cast<std::size_t>(stack_index(kVisual))].middleRows(layout_.visual_off,
                                                                     layout_.visual) +=
        nn::linear_bwd(store_, grads, head_visual_, rows, d_vis);
  }
  if (cfg_.use_tactile && lb.tactile > kNormFloor) {
    Mat d_tac = Mat::Zero(layout_.tactile, 1);
    const double s = weights.tactile / lb.tactile;
    for (int i : tape.plan.tactile) {
      d_tac(i, 0) = s * (recon.tactile[i] - targets.tactile[i]);
    }
    const Mat rows = tape.dec_out[static_cast<std::size_t>(stack_index(kTactile))].middleRows(
        layout_.tactile_off, layout_.tactile);
    d_dec[static_cast<std::size_t>(stack_index(kTactile))].middleRows(layout_.tactile_off,
                                                                      layout_.tactile) +=
        nn::linear_bwd(store_, grads, head_tactile_, rows, d_tac);
  }
  if (cfg_.use_action && lb.action > kNormFloor) {
    const Mat d_actions =
        (weights.action / lb.action) * (recon.actions - targets.action_stack);
    const auto groups = cfg_.action_groups();
    const auto dims = cfg_.action_dims();
    std::vector<int> col_of(48, -1);
    for (std::size_t c = 0; c < dims.size(); ++c) col_of[static_cast<std::size_t>(dims[c])] = static_cast<int>(c);
    const int p = cfg_.future_steps;
    const int sa = stack_index(kAction);
    const Mat& src = tape.dec_out[static_cast<std::size_t>(sa)];
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const int g = static_cast<int>(groups[i].size());
      Mat d_out(1, (1 + p) * g);
      for (int s = 0; s <= p; ++s) {
        for (int k = 0; k < g; ++k) {
          d_out(0, s * g + k) = d_actions(
              s, col_of[static_cast<std::size_t>(groups[i][static_cast<std::size_t>(k)])]);
        }
      }
      const Mat row = src.row(layout_.action_off + static_cast<int>(i));
      d_dec[static_cast<std::size_t>(sa)].row(layout_.action_off + static_cast<int>(i)) +=
          nn::linear_bwd(store_, grads, head_action_[i], row, d_out);
    }
  }
  if (cfg_.recon_bottle && lb.bottle > kNormFloor) {
    Eigen::VectorXd d_obj = (weights.bottle / lb.bottle) * (recon.object - targets.object);
    // Through the quaternion normalization: d_raw = (I - qq^T) d / ||q_raw||.
    const Eigen::Vector4d q_raw = recon.object_raw.segment(3, 4);
    const double n = std::max(q_raw.norm(), 1e-12);
    const Eigen::Vector4d q_hat = q_raw / n;
    const Eigen::Vector4d d_q = d_obj.segment(3, 4);
    d_obj.segment(3, 4) = (d_q - q_hat * q_hat.dot(d_q)) / n;

    const int so = stack_index(kObject);
    const Mat d_feat = nn::linear_bwd(store_, grads, head_object_, tape.object_feat,
                                      d_obj.transpose());
    for (int i = 0; i < layout_.nulls; ++i) {
      d_dec[static_cast<std::size_t>(so)].row(layout_.null_off + i) +=
          d_feat.row(0) / static_cast<double>(layout_.nulls);
    }
  }

  // Decoder stacks back to the restored sequence.
  Mat d_y0 = Mat::Zero(layout_.total, D);
  for (int sidx = 0; sidx < n_stacks; ++sidx) {
    Mat d = nn::layernorm_bwd(store_, grads, decoders_[static_cast<std::size_t>(sidx)].ln,
                              tape.dec_ln_caches[static_cast<std::size_t>(sidx)],
                              d_dec[static_cast<std::size_t>(sidx)]);
    auto& stack = decoders_[static_cast<std::size_t>(sidx)];
    for (std::size_t b = stack.blocks.size(); b-- > 0;) {
      d = nn::block_bwd(store_, grads, stack.blocks[b], cfg_.decoder_heads,
                        tape.dec_caches[static_cast<std::size_t>(sidx)][b], d);
    }
    d_y0 += d;
  }

  if (cfg_.learned_pos) grads.grad(pos_dec_) += d_y0;
  std::vector<bool> is_kept(static_cast<std::size_t>(layout_.total), false);
  for (int t : tape.keep) is_kept[static_cast<std::size_t>(t)] = true;
  Mat d_latents(static_cast<Eigen::Index>(tape.keep.size()), D);
  for (std::size_t r = 0; r < tape.keep.size(); ++r) {
    d_latents.row(static_cast<Eigen::Index>(r)) = d_y0.row(tape.keep[r]);
  }
  for (int t = 0; t < layout_.total; ++t) {
    if (!is_kept[static_cast<std::size_t>(t)]) grads.grad(mask_token_).row(0) += d_y0.row(t);
  }

  // Encoder.
  Mat d = nn::layernorm_bwd(store_, grads, enc_ln_, tape.enc_ln_cache, d_latents);
  for (std::size_t b = enc_blocks_.size(); b-- > 0;) {
    d = nn::block_bwd(store_, grads, enc_blocks_[b], cfg_.encoder_heads, tape.enc_caches[b], d);
  }

  // Scatter back to the full sequence and into the embeddings.
  Mat d_full = Mat::Zero(layout_.total, D);
  for (std::size_t r = 0; r < tape.keep.size(); ++r) {
    d_full.row(tape.keep[r]) = d.row(static_cast<Eigen::Index>(r));
  }
  if (cfg_.learned_pos) grads.grad(pos_enc_) += d_full;

  grads.grad(cls_).row(0) += d_full.row(0);
  if (cfg_.use_visual) {
    const auto kept = kept_indices(layout_.visual, tape.plan.visual);
    Mat d_rows(static_cast<Eigen::Index>(kept.size()), D);
    Mat in_rows(static_cast<Eigen::Index>(kept.size()), cfg_.patch_dim());
    for (std::size_t r = 0; r < kept.size(); ++r) {
      d_rows.row(static_cast<Eigen::Index>(r)) = d_full.row(layout_.visual_off + kept[r]);
      in_rows.row(static_cast<Eigen::Index>(r)) = tape.inputs.patches.row(kept[r]);
    }
    nn::linear_bwd(store_, grads, patch_embed_, in_rows, d_rows);
  }
  if (cfg_.use_tactile) {
    for (int i : kept_indices(layout_.tactile, tape.plan.tactile)) {
      const auto row = d_full.row(layout_.tactile_off + i);
      grads.grad(tac_w_).row(0) += tape.inputs.tactile[i] * row;
      grads.grad(tac_b_).row(0) += row;
    }
  }
  if (cfg_.use_action) {
    const auto groups = cfg_.action_groups();
    for (int i : kept_indices(layout_.action, tape.plan.action)) {
      const auto& group = groups[static_cast<std::size_t>(i)];
      Mat vals(1, static_cast<Eigen::Index>(group.size()));
      for (std::size_t k = 0; k < group.size(); ++k) {
        vals(0, static_cast<Eigen::Index>(k)) = tape.inputs.action[group[k]];
      }
      nn::linear_bwd(store_, grads, act_embed_[static_cast<std::size_t>(i)], vals,
                     d_full.row(layout_.action_off + i));
    }
  }
  if (cfg_.recon_bottle) {
    for (int i : kept_indices(layout_.nulls, tape.plan.null_tokens)) {
      grads.grad(null_tokens_).row(i) += d_full.row(layout_.null_off + i);
    }
  }
}

Eigen::VectorXd MultimodalAutoencoder::cls_feature(const Inputs& in) const {
  const Mat latents = encode(in, empty_mask(), nullptr);
  return latents.row(0).transpose();
}

// ---- checkpoint io ----

namespace {
constexpr char kCkptMagic[4] = {'B', 'M', 'C', 'K'};
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_checkpoint(const MultimodalAutoencoder& net, const CheckpointMeta& meta,
                     const std::string& path) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(net.config().to_json());
  j["init_seed"] = meta.init_seed;
  j["epoch"] = meta.epoch;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : meta.history) {
    hist.push_back({h.total, h.image, h.tactile, h.bottle, h.action});
  }
  j["history"] = hist;
  const std::string header = j.dump();

  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot write checkpoint: " + path);
  std::fwrite(kCkptMagic, 1, 4, f.get());
  const std::uint64_t len = header.size();
  std::fwrite(&len, 8, 1, f.get());
  std::fwrite(header.data(), 1, header.size(), f.get());
  net.params().save_stream(f.get());
}

std::unique_ptr<MultimodalAutoencoder> load_checkpoint(const std::string& path,
                                                       CheckpointMeta* meta) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kCkptMagic, 4) != 0) {
    throw IntegrityError("bad checkpoint magic: " + path);
  }
  std::uint64_t len = 0;
  if (std::fread(&len, 8, 1, f.get()) != 1 || len > (1ull << 30)) {
    throw IntegrityError("corrupt checkpoint header: " + path);
  }
  std::string header(len, '\0');
  if (std::fread(header.data(), 1, len, f.get()) != len) {
    throw IntegrityError("checkpoint header truncated: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint header: ") + e.what());
  }
  const ModelConfig cfg = ModelConfig::from_json(j.at("config").dump());
  const std::uint64_t init_seed = j.at("init_seed").get<std::uint64_t>();
  auto net = std::make_unique<MultimodalAutoencoder>(cfg, init_seed);
  net->params().load_stream(f.get(), path);
  if (meta) {
    meta->config = cfg;
    meta->init_seed = init_seed;
    meta->epoch = j.value("epoch", 0);
    meta->history.clear();
    for (const auto& h : j.at("history")) {
      LossBreakdown lb;
      lb.total = h.at(0);
      lb.image = h.at(1);
      lb.tactile = h.at(2);
      lb.bottle = h.at(3);
      lb.action = h.at(4);
      meta->history.push_back(lb);
    }
  }
  return net;
}

}  // namespace bimanip::mmae
