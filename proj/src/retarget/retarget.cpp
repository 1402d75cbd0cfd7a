#include "bimanip/retarget/retarget.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"
#include "bimanip/kin/kinematics.hpp"

namespace bimanip::retarget {

namespace {

std::vector<int> target_links(const HandModel& m) {
  std::vector<int> links = m.fingertip_links;
  links.insert(links.end(), m.segment_keypoints.begin(), m.segment_keypoints.end());
  return links;
}

Eigen::VectorXd clamp_vec(const HandModel& m, const Eigen::VectorXd& q) {
  JointAngles tmp{q};
  return kin::clamp_to_limits(m, tmp).values;
}

}  // namespace

double objective(const HandModel& robot, const HandModel& human, const JointAngles& q_robot,
                 const JointAngles& q_human) {
  const auto vr = kin::target_vectors(robot, q_robot);
  const auto vh = kin::target_vectors(human, q_human);
  double sum = 0.0;
  for (std::size_t i = 0; i < vr.vectors.size(); ++i) {
    sum += (vr.vectors[i] - vh.vectors[i]).squaredNorm();
  }
  return sum;
}

Eigen::VectorXd objective_gradient(const HandModel& robot, const HandModel& human,
                                   const JointAngles& q_robot, const JointAngles& q_human) {
  const auto fk = kin::forward_kinematics(robot, q_robot);
  const auto vh = kin::target_vectors(human, q_human);
  const auto links = target_links(robot);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(robot.n_dof);
  Eigen::Matrix3Xd jac;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Vec3 residual = kin::link_pose(fk, links[i]).p - vh.vectors[i];
    kin::position_jacobian(robot, fk, links[i], jac);
    grad.noalias() += 2.0 * (jac.transpose() * residual);
  }
  return grad;
}

JointAngles retarget_frame(const HandModel& robot, const HandModel& human,
                           const JointAngles& q_human, const JointAngles& q_init,
                           const SolverConfig& cfg, SolveStats* stats) {
  const auto vh = kin::target_vectors(human, q_human);
  auto eval = [&](const Eigen::VectorXd& q) {
    const auto vr = kin::target_vectors(robot, JointAngles{q});
    double sum = 0.0;
    for (std::size_t i = 0; i < vr.vectors.size(); ++i) {
      sum += (vr.vectors[i] - vh.vectors[i]).squaredNorm();
    }
    return sum;
  };

  Eigen::VectorXd x = clamp_vec(robot, q_init.values);
  double f = eval(x);
  if (!std::isfinite(f)) {
    throw SolverError("retarget_frame: non-finite objective at the initial point");
  }
  Eigen::VectorXd g = objective_gradient(robot, human, JointAngles{x}, q_human);

  SolveStats st;
  st.initial_objective = f;

  Eigen::VectorXd x_prev, g_prev;
  double t = 0.0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    // Stationarity measured by the projected gradient step.
    const Eigen::VectorXd pg = x - clamp_vec(robot, x - g);
    st.grad_norm = pg.norm();
    if (st.grad_norm < cfg.grad_tol) break;

    // Barzilai-Borwein initial step, safeguarded by Armijo backtracking below.
    if (it == 0) {
      t = 0.05 / std::max(g.lpNorm<Eigen::Infinity>(), 1e-12);
    } else {
      const Eigen::VectorXd dx = x - x_prev;
      const Eigen::VectorXd dg = g - g_prev;
      const double denom = dx.dot(dg);
      t = denom > 1e-18 ? dx.squaredNorm() / denom : t * 2.0;
    }
    t = std::min(std::max(t, 1e-10), 1e4);

    double f_new = f;
    Eigen::VectorXd x_new = x;
    bool accepted = false;
    while (true) {
      x_new = clamp_vec(robot, x - t * g);
      const Eigen::VectorXd step = x - x_new;
      if (step.norm() < cfg.step_tol) break;
      f_new = eval(x_new);
      if (!std::isfinite(f_new)) {
        throw SolverError("retarget_frame: non-finite objective at iteration " +
                          std::to_string(it) + " (step " + std::to_string(t) + ")");
      }
      if (f_new <= f - cfg.armijo_c * g.dot(step)) {
        accepted = true;
        break;
      }
      t *= cfg.shrink;
    }
    if (!accepted) break;  // step shrank below step_tol

    x_prev = x;
    g_prev = g;
    x = x_new;
    f = f_new;
    g = objective_gradient(robot, human, JointAngles{x}, q_human);
  }

  st.iterations = it;
  st.final_objective = f;
  if (stats) *stats = st;
  return JointAngles{x};
}

std::vector<JointAngles> retarget_trajectory(const HandModel& robot, const HandModel& human,
                                             const std::vector<JointAngles>& traj,
                                             const SolverConfig& cfg) {
  if (traj.empty()) throw ValidationError("retarget_trajectory: empty trajectory");
  std::vector<JointAngles> out;
  out.reserve(traj.size());
  JointAngles warm = kin::rest_pose(robot);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    try {
      warm = retarget_frame(robot, human, traj[t], warm, cfg);
    } catch (const SolverError& e) {
      throw SolverError("frame " + std::to_string(t) + ": " + e.what());
    }
    out.push_back(warm);
  }
  return out;
}

}  // namespace bimanip::retarget
