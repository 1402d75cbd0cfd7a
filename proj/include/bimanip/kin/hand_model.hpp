#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bimanip/core/pose.hpp"

namespace bimanip::kin {

enum class JointType { Revolute, Fixed };

// One joint and the link frame it produces. The link origin sits at the joint
// (offset from the parent frame); rotation spins everything downstream.
struct JointSpec {
  std::string name;
  int parent = -1;         // joint index; -1 is the wrist root
  JointType type = JointType::Revolute;
  Vec3 axis = Vec3::UnitZ();
  Vec3 offset = Vec3::Zero();  // meters, in the parent frame
  double lo = 0.0;
  double hi = 0.0;
};

struct HandModel {
  std::string name;
  std::vector<JointSpec> joints;
  std::vector<int> fingertip_links;     // 5 joint indices (-1 allowed = wrist)
  std::vector<int> segment_keypoints;   // 5 joint indices, one mid-phalanx per finger
  std::vector<int> tactile_links;       // 20 joint indices hosting touch sensors
  int palm_link = -1;                   // palm-center frame
  std::vector<int> dof_index;           // joint index -> angle index (-1 if fixed)
  std::vector<std::pair<int, int>> coupled;  // (follower joint, driver joint)
  int n_dof = 0;

  int n_joints() const { return static_cast<int>(joints.size()); }
  // Revolute joints that are directly actuated (not tendon followers).
  std::vector<int> actuated_joints() const;
};

struct JointAngles {
  Eigen::VectorXd values;
};

// 10 wrist-frame vectors: 5 wrist->fingertip, then 5 wrist->segment keypoint.
struct VectorSet {
  std::vector<Vec3> vectors;
};

// Validates the description: topological parent order, unit axes, lo <= hi,
// exactly 5 fingertips and 5 keypoints. Throws StructuralError or
// ValidationError on malformed input.
HandModel build_hand_model(const std::string& name, std::vector<JointSpec> joints,
                           std::vector<int> fingertips, std::vector<int> keypoints,
                           std::vector<int> tactile_links = {}, int palm_link = -1,
                           std::vector<std::pair<int, int>> coupled = {});

enum class Side { Right, Left };

// Built-in models. The robot hand has 24 revolute joints (2 wrist + 4x4
// fingers + 5 little + 5 thumb, Shadow-style); the human hand has 21
// (5 thumb + 4x4 fingers). Dimensions live in builtin_hand_spec_json().
HandModel robot_hand_model(Side side = Side::Right);
HandModel human_hand_model(Side side = Side::Right);

// Model spec file round-trip (JSON schema documented in docs/hand_spec.md).
HandModel load_hand_model(const std::string& path);
void save_hand_model(const HandModel& model, const std::string& path);
std::string builtin_hand_spec_json(const std::string& name);  // "robot24" | "human21"

}  // namespace bimanip::kin
