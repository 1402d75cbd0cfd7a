#pragma once

#include <vector>

#include "bimanip/kin/hand_model.hpp"

namespace bimanip::retarget {

using kin::HandModel;
using kin::JointAngles;

struct SolverConfig {
  int max_iters = 200;
  double grad_tol = 1e-6;   // projected-gradient norm
  double step_tol = 1e-8;   // accepted step length
  double armijo_c = 1e-4;
  double shrink = 0.5;
};

struct SolveStats {
  int iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double grad_norm = 0.0;
};

// Sum of squared differences between the two hands' wrist-to-fingertip and
// wrist-to-segment vectors.
double objective(const HandModel& robot, const HandModel& human, const JointAngles& q_robot,
                 const JointAngles& q_human);

// Gradient of the objective w.r.t. the robot joint angles, via FK position
// jacobians of the ten target links.
Eigen::VectorXd objective_gradient(const HandModel& robot, const HandModel& human,
                                   const JointAngles& q_robot, const JointAngles& q_human);

JointAngles retarget_frame(const HandModel& robot, const HandModel& human,
                           const JointAngles& q_human, const JointAngles& q_init,
                           const SolverConfig& cfg = {}, SolveStats* stats = nullptr);

// Frame t warm-starts from frame t-1 (frame 0 from the robot rest pose).
std::vector<JointAngles> retarget_trajectory(const HandModel& robot, const HandModel& human,
                                             const std::vector<JointAngles>& traj,
                                             const SolverConfig& cfg = {});

}  // namespace bimanip::retarget
