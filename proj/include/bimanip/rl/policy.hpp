#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bimanip/nn/mlp.hpp"

namespace bimanip::rl {

using nn::Mat;

struct PolicyConfig {
  int feature_dim = 256;   // frozen-encoder CLS width (0 when no encoder)
  int proprio_dim = 109;
  int phi_dim = 128;       // width of the learned proprioception embedding
  std::vector<int> hidden = {256, 256};
  int action_dim = 46;
  double init_log_std = -0.5;

  std::string to_json() const;
  static PolicyConfig from_json(const std::string& text);
};

// Gaussian actor plus value critic over [h_cls, phi(P)]. phi is a plain
// linear layer; the log-std is state independent.
class ActorCritic {
 public:
  ActorCritic(PolicyConfig cfg, std::uint64_t seed);

  const PolicyConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }

  struct Cache {
    Mat proprio;  // B x proprio_dim
    Mat actor_in, critic_in;
    nn::Mlp::Cache actor_mlp, critic_mlp;
  };

  // obs rows are [h_cls | P]. Returns action means (B x A); values out-param.
  Mat forward(const Mat& obs, Eigen::VectorXd* values, Cache* cache = nullptr) const;

  Eigen::VectorXd log_std() const { return store_.value(log_std_).row(0).transpose(); }

  // logp of given actions under N(mean, exp(log_std)).
  Eigen::VectorXd log_prob(const Mat& means, const Mat& actions) const;
  double entropy() const;  // summed over action dims

  // Accumulates parameter gradients from d(mean), d(value), d(log_std).
  void backward(nn::GradStore& grads, const Cache& cache, const Mat& d_means,
                const Eigen::VectorXd& d_values,
                const Eigen::VectorXd& d_log_std) const;

  void save(const std::string& path, const std::string& extra_json = "{}") const;
  static std::unique_ptr<ActorCritic> load(const std::string& path,
                                           std::string* extra_json = nullptr);

 private:
  PolicyConfig cfg_;
  nn::ParamStore store_;
  nn::LinearRef actor_phi_, critic_phi_;
  nn::Mlp actor_, critic_;
  int log_std_ = -1;
};

}  // namespace bimanip::rl
