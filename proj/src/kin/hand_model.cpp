#include "bimanip/kin/hand_model.hpp"

#include <cmath>
#include <set>

#include "bimanip/core/errors.hpp"

namespace bimanip::kin {

std::vector<int> HandModel::actuated_joints() const {
  std::set<int> followers;
  for (const auto& [f, d] : coupled) followers.insert(f);
  std::vector<int> out;
  for (int k = 0; k < n_joints(); ++k) {
    if (joints[static_cast<std::size_t>(k)].type == JointType::Revolute &&
        !followers.count(k)) {
      out.push_back(k);
    }
  }
  return out;
}

HandModel build_hand_model(const std::string& name, std::vector<JointSpec> joints,
                           std::vector<int> fingertips, std::vector<int> keypoints,
                           std::vector<int> tactile_links, int palm_link,
                           std::vector<std::pair<int, int>> coupled) {
  const int n = static_cast<int>(joints.size());
  HandModel m;
  m.name = name;
  m.dof_index.assign(static_cast<std::size_t>(n), -1);

  for (int k = 0; k < n; ++k) {
    const JointSpec& j = joints[static_cast<std::size_t>(k)];
    if (j.parent >= k) {
      throw StructuralError("joint " + std::to_string(k) + " (" + j.name +
                            ") has forward or self parent reference " +
                            std::to_string(j.parent));
    }
    if (j.parent < -1) {
      throw StructuralError("joint " + j.name + " has invalid parent index");
    }
    if (!j.offset.allFinite()) throw ValidationError("joint " + j.name + ": non-finite offset");
    if (j.type == JointType::Revolute) {
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw ValidationError("joint " + j.name + ": axis is not unit length");
      }
      if (!(j.lo <= j.hi)) {
        throw ValidationError("joint " + j.name + ": lo > hi");
      }
      m.dof_index[static_cast<std::size_t>(k)] = m.n_dof++;
    }
  }

  auto check_link = [&](int idx, const char* what) {
    if (idx < -1 || idx >= n) {
      throw ValidationError(std::string(what) + " index out of range: " + std::to_string(idx));
    }
  };
  if (fingertips.size() != 5) throw ValidationError("expected exactly 5 fingertip links");
  if (keypoints.size() != 5) throw ValidationError("expected exactly 5 segment keypoints");
  for (int idx : fingertips) check_link(idx, "fingertip");
  for (int idx : keypoints) check_link(idx, "segment keypoint");
  for (int idx : tactile_links) check_link(idx, "tactile link");
  if (palm_link != -1) check_link(palm_link, "palm link");

  for (const auto& [f, d] : coupled) {
    check_link(f, "coupled follower");
    check_link(d, "coupled driver");
    if (f < 0 || d < 0 || f == d ||
        joints[static_cast<std::size_t>(f)].type != JointType::Revolute ||
        joints[static_cast<std::size_t>(d)].type != JointType::Revolute) {
      throw ValidationError("invalid tendon coupling pair");
    }
  }

  m.joints = std::move(joints);
  m.fingertip_links = std::move(fingertips);
  m.segment_keypoints = std::move(keypoints);
  m.tactile_links = std::move(tactile_links);
  m.palm_link = palm_link;
  m.coupled = std::move(coupled);
  return m;
}

}  // namespace bimanip::kin
