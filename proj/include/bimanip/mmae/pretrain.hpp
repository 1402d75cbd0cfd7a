#pragma once

#include <functional>
#include <string>

#include "bimanip/data/dataset.hpp"
#include "bimanip/mmae/net.hpp"
#include "bimanip/nn/adamw.hpp"

namespace bimanip::mmae {

struct PretrainConfig {
  int steps = 2000;       // optimizer steps; -1 derives from epochs
  int epochs = -1;        // used when steps < 0
  int batch_size = 8;
  nn::AdamWConfig optim;  // lr 2e-5 default
  LossWeights weights;
  std::uint64_t seed = 0;
  int log_every = 50;
  std::string checkpoint_path;  // empty = do not write
  std::function<void(int, const LossBreakdown&)> on_log;
};

struct PretrainResult {
  std::vector<LossBreakdown> history;  // one entry per step
  int steps_run = 0;
};

// Minibatch masked-autoencoding training. Deterministic for a fixed seed:
// batches, masks and the gradient reduction order are all derived from it.
// On divergence (non-finite loss) the last good checkpoint is written and
// TrainingError is thrown.
PretrainResult pretrain(MultimodalAutoencoder& net, const data::Dataset& dataset,
                        const PretrainConfig& cfg);

}  // namespace bimanip::mmae
