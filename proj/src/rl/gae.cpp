#include "bimanip/rl/gae.hpp"

#include "bimanip/core/errors.hpp"

namespace bimanip::rl {

GaeResult compute_gae(const Eigen::MatrixXd& rewards, const Eigen::MatrixXd& values,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& dones,
                      const Eigen::VectorXd& last_values, double gamma, double lambda) {
  const Eigen::Index T = rewards.rows(), N = rewards.cols();
  if (values.rows() != T || values.cols() != N || dones.rows() != T || dones.cols() != N ||
      last_values.size() != N) {
    throw DimensionError("compute_gae: inconsistent rollout shapes");
  }
  GaeResult out;
  out.advantages.setZero(T, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    double next_adv = 0.0;
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const double not_done = dones(t, n) ? 0.0 : 1.0;
      const double next_value = t + 1 < T ? values(t + 1, n) : last_values(n);
      const double delta = rewards(t, n) + gamma * next_value * not_done - values(t, n);
      next_adv = delta + gamma * lambda * not_done * next_adv;
      out.advantages(t, n) = next_adv;
    }
  }
  out.returns = out.advantages + values;
  return out;
}

}  // namespace bimanip::rl
