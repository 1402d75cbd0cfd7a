#pragma once

#include <memory>

#include "bimanip/env/environment.hpp"
#include "bimanip/mmae/net.hpp"

namespace bimanip::rl {

// Frozen-encoder observation featurizer: runs tokenize -> encode with zero
// masking and concatenates the CLS latent with raw proprioception. A null
// encoder (the "Base" baseline) yields proprioception only.
class Featurizer {
 public:
  explicit Featurizer(std::shared_ptr<const mmae::MultimodalAutoencoder> encoder)
      : encoder_(std::move(encoder)) {}

  int feature_dim() const { return encoder_ ? encoder_->config().embed_dim : 0; }
  int obs_dim() const { return feature_dim() + env::kProprioDim; }

  // obs rows: [h_cls | P]; A_obs is the 48 joint angles inside P.
  Eigen::VectorXd operator()(const env::Observation& obs, const Eigen::VectorXd& proprio) const;

  std::uint64_t encoder_digest() const { return encoder_ ? encoder_->digest() : 0; }
  const mmae::MultimodalAutoencoder* encoder() const { return encoder_.get(); }

 private:
  std::shared_ptr<const mmae::MultimodalAutoencoder> encoder_;
};

}  // namespace bimanip::rl
