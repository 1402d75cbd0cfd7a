#include "bimanip/rl/featurize.hpp"

#include "bimanip/core/errors.hpp"

namespace bimanip::rl {

Eigen::VectorXd Featurizer::operator()(const env::Observation& obs,
                                       const Eigen::VectorXd& proprio) const {
  if (proprio.size() != env::kProprioDim) {
    throw DimensionError("featurize: proprioception must have 109 entries");
  }
  Eigen::VectorXd out(obs_dim());
  if (encoder_) {
    const Eigen::VectorXd action = proprio.head(48);
    const auto inputs = encoder_->inputs_from_obs(obs.image, obs.tactile, action);
    out.head(feature_dim()) = encoder_->cls_feature(inputs);
  }
  out.tail(env::kProprioDim) = proprio;
  return out;
}

}  // namespace bimanip::rl
