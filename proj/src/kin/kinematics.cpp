#include "bimanip/kin/kinematics.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"

namespace bimanip::kin {

std::vector<Pose> forward_kinematics(const HandModel& model, const JointAngles& q) {
  if (q.values.size() != model.n_dof) {
    throw DimensionError("forward_kinematics: got " + std::to_string(q.values.size()) +
                         " angles, model " + model.name + " has " +
                         std::to_string(model.n_dof) + " dof");
  }
  std::vector<Pose> fk(static_cast<std::size_t>(model.n_joints()));
  for (int k = 0; k < model.n_joints(); ++k) {
    const JointSpec& j = model.joints[static_cast<std::size_t>(k)];
    const Pose& parent = link_pose(fk, j.parent);
    Pose local;
    local.p = j.offset;
    if (j.type == JointType::Revolute) {
      local.q = quat_from_axis_angle(j.axis, q.values[model.dof_index[static_cast<std::size_t>(k)]]);
    }
    fk[static_cast<std::size_t>(k)] = parent * local;
  }
  return fk;
}

VectorSet target_vectors(const HandModel& model, const JointAngles& q) {
  const auto fk = forward_kinematics(model, q);
  VectorSet out;
  out.vectors.reserve(10);
  for (int idx : model.fingertip_links) out.vectors.push_back(link_pose(fk, idx).p);
  for (int idx : model.segment_keypoints) out.vectors.push_back(link_pose(fk, idx).p);
  return out;
}

JointAngles clamp_to_limits(const HandModel& model, const JointAngles& q) {
  if (q.values.size() != model.n_dof) {
    throw DimensionError("clamp_to_limits: dof mismatch for model " + model.name);
  }
  if (!q.values.allFinite()) {
    throw ValidationError("clamp_to_limits: non-finite joint angles");
  }
  JointAngles out = q;
  for (int k = 0; k < model.n_joints(); ++k) {
    const int d = model.dof_index[static_cast<std::size_t>(k)];
    if (d < 0) continue;
    const JointSpec& j = model.joints[static_cast<std::size_t>(k)];
    out.values[d] = std::min(std::max(out.values[d], j.lo), j.hi);
  }
  return out;
}

JointAngles rest_pose(const HandModel& model) {
  JointAngles q;
  q.values.setZero(model.n_dof);
  for (int k = 0; k < model.n_joints(); ++k) {
    const int d = model.dof_index[static_cast<std::size_t>(k)];
    if (d < 0) continue;
    const JointSpec& j = model.joints[static_cast<std::size_t>(k)];
    q.values[d] = 0.5 * (j.lo + j.hi);
  }
  return q;
}

void apply_coupling(const HandModel& model, JointAngles& q) {
  for (const auto& [f, d] : model.coupled) {
    const int fd = model.dof_index[static_cast<std::size_t>(f)];
    const int dd = model.dof_index[static_cast<std::size_t>(d)];
    const JointSpec& j = model.joints[static_cast<std::size_t>(f)];
    q.values[fd] = std::min(std::max(q.values[dd], j.lo), j.hi);
  }
}

void position_jacobian(const HandModel& model, const std::vector<Pose>& fk,
                       int link_joint, Eigen::Matrix3Xd& jac) {
  jac.setZero(3, model.n_dof);
  if (link_joint < 0) return;
  const Vec3 p_link = link_pose(fk, link_joint).p;
  for (int j = link_joint; j >= 0; j = model.joints[static_cast<std::size_t>(j)].parent) {
    const JointSpec& spec = model.joints[static_cast<std::size_t>(j)];
    if (spec.type != JointType::Revolute) continue;
    const Pose& pj = fk[static_cast<std::size_t>(j)];
    const Vec3 world_axis = pj.q * spec.axis;
    jac.col(model.dof_index[static_cast<std::size_t>(j)]) = world_axis.cross(p_link - pj.p);
  }
}

}  // namespace bimanip::kin
