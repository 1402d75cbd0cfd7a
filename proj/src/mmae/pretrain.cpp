#include "bimanip/mmae/pretrain.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"

namespace bimanip::mmae {

PretrainResult pretrain(MultimodalAutoencoder& net, const data::Dataset& dataset,
                        const PretrainConfig& cfg) {
  if (dataset.frames.empty()) throw ValidationError("pretrain: empty dataset");
  const int n = static_cast<int>(dataset.frames.size());
  const int batch = std::min(cfg.batch_size, n);
  int steps = cfg.steps;
  if (steps < 0) {
    if (cfg.epochs <= 0) throw ConfigError("pretrain: need steps or epochs");
    steps = cfg.epochs * ((n + batch - 1) / batch);
  }

  Rng rng(cfg.seed);
  Rng order_rng = rng.child(1);
  Rng mask_rng_root = rng.child(2);

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::size_t cursor = order.size();  // forces a shuffle on first use

  nn::AdamW opt(net.params(), cfg.optim);
  PretrainResult result;
  result.history.reserve(static_cast<std::size_t>(steps));

  // Rolling copy for divergence recovery.
  ParamStore last_good = net.params();
  int last_good_step = 0;

  std::vector<GradStore> worker_grads;
  std::vector<LossBreakdown> sample_losses(static_cast<std::size_t>(batch));

  for (int step = 0; step < steps; ++step) {
    std::vector<int> indices(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      if (cursor >= order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      indices[static_cast<std::size_t>(b)] = order[cursor++];
    }
    std::vector<MaskPlan> plans(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      Rng mask_rng = mask_rng_root.child(static_cast<std::uint64_t>(step) * 1000003ull +
                                         static_cast<std::uint64_t>(b));
      plans[static_cast<std::size_t>(b)] = sample_mask(net.config(), mask_rng);
    }

    while (static_cast<int>(worker_grads.size()) < batch) {
      worker_grads.emplace_back(net.params());
    }
    std::vector<std::uint8_t> sample_failed(static_cast<std::size_t>(batch), 0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < batch; ++b) {
      try {
        worker_grads[static_cast<std::size_t>(b)].zero();
        sample_losses[static_cast<std::size_t>(b)] = net.train_sample(
            dataset.frames[static_cast<std::size_t>(indices[static_cast<std::size_t>(b)])],
            plans[static_cast<std::size_t>(b)], cfg.weights,
            &worker_grads[static_cast<std::size_t>(b)]);
      } catch (const Error&) {
        sample_failed[static_cast<std::size_t>(b)] = 1;
      }
    }

    LossBreakdown mean;
    bool finite = true;
    for (auto flag : sample_failed) {
      if (flag) finite = false;
    }
    GradStore grads(net.params());
    for (int b = 0; b < batch && finite; ++b) {
      const auto& lb = sample_losses[static_cast<std::size_t>(b)];
      mean.total += lb.total;
      mean.image += lb.image;
      mean.tactile += lb.tactile;
      mean.bottle += lb.bottle;
      mean.action += lb.action;
      grads.add(worker_grads[static_cast<std::size_t>(b)]);
      finite = std::isfinite(lb.total);
    }
    const double inv_b = 1.0 / batch;
    mean.total *= inv_b;
    mean.image *= inv_b;
    mean.tactile *= inv_b;
    mean.bottle *= inv_b;
    mean.action *= inv_b;
    grads.scale(inv_b);

    if (!finite || !grads.all_finite()) {
      if (!cfg.checkpoint_path.empty()) {
        // Restore and persist the last healthy parameters before bailing.
        net.params() = last_good;
        CheckpointMeta meta;
        meta.config = net.config();
        meta.init_seed = net.init_seed();
        meta.epoch = last_good_step;
        meta.history = result.history;
        save_checkpoint(net, meta, cfg.checkpoint_path);
      }
      throw TrainingError("pretrain: diverged at step " + std::to_string(step) +
                          " (last good step " + std::to_string(last_good_step) + ")");
    }

    opt.step(net.params(), grads);
    result.history.push_back(mean);
    result.steps_run = step + 1;

    if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step + 1 == steps)) {
      last_good = net.params();
      last_good_step = step + 1;
      if (cfg.on_log) cfg.on_log(step, mean);
    }
  }

  if (!cfg.checkpoint_path.empty()) {
    CheckpointMeta meta;
    meta.config = net.config();
    meta.init_seed = net.init_seed();
    meta.epoch = result.steps_run;
    meta.history = result.history;
    save_checkpoint(net, meta, cfg.checkpoint_path);
  }
  return result;
}

}  // namespace bimanip::mmae
