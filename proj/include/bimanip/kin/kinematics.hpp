#pragma once

#include <vector>

#include "bimanip/kin/hand_model.hpp"

namespace bimanip::kin {

// Wrist-frame pose of every link, in joint order. The implicit wrist root is
// the identity and is not part of the returned vector; index with the joint
// index, or link_pose() below which folds in the -1 root convention.
std::vector<Pose> forward_kinematics(const HandModel& model, const JointAngles& q);

inline const Pose& link_pose(const std::vector<Pose>& fk, int joint_index) {
  static const Pose kRoot{};
  return joint_index < 0 ? kRoot : fk[static_cast<std::size_t>(joint_index)];
}

VectorSet target_vectors(const HandModel& model, const JointAngles& q);

// Elementwise projection into the joint-limit box. Throws ValidationError on
// non-finite input.
JointAngles clamp_to_limits(const HandModel& model, const JointAngles& q);

// Mid-range configuration (midpoint of every limit interval).
JointAngles rest_pose(const HandModel& model);

// Apply tendon coupling: follower angles are overwritten by their drivers.
void apply_coupling(const HandModel& model, JointAngles& q);

// d(link origin)/d(q_j) for all revolute joints, one 3-vector per dof.
// Used by the retargeting objective gradient.
void position_jacobian(const HandModel& model, const std::vector<Pose>& fk,
                       int link_joint, Eigen::Matrix3Xd& jac);

}  // namespace bimanip::kin
