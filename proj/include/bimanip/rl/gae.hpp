#pragma once

#include <Eigen/Dense>

namespace bimanip::rl {

struct GaeResult {
  Eigen::MatrixXd advantages;  // T x N
  Eigen::MatrixXd returns;     // advantages + values
};

// Generalized advantage estimation over a T x N rollout. dones(t, n) = 1
// means the transition at step t ended episode n (no bootstrap across it);
// last_values bootstraps the tail.
GaeResult compute_gae(const Eigen::MatrixXd& rewards, const Eigen::MatrixXd& values,
                      const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& dones,
                      const Eigen::VectorXd& last_values, double gamma, double lambda);

}  // namespace bimanip::rl
