#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bimanip/core/pose.hpp"

namespace bimanip::env {

enum class Surface { Body = 0, Cap = 1 };
enum class HandSide { Left = 0, Right = 1 };

struct Contact {
  HandSide hand;
  int link;  // joint index within the hand model
  Vec3 point;
  Surface surface;
};

// Full simulator state. step() is a pure function of (state, action), so the
// struct carries everything next-state computation needs.
struct EnvState {
  Eigen::VectorXd q;     // 48 joint angles, left 24 then right 24
  Eigen::VectorXd qvel;  // 48 joint velocities

  Pose left_wrist;
  Eigen::Matrix<double, 6, 1> left_wrist_twist = Eigen::Matrix<double, 6, 1>::Zero();
  Pose right_wrist;  // fixed after reset

  Pose bottle;
  Vec3 bottle_vel = Vec3::Zero();
  double cap_angle = 0.0;  // cumulative, radians
  double cap_vel = 0.0;    // rad/s

  int stage = 1;
  Quat q_ini = Quat::Identity();   // bottle orientation at reset
  Vec3 bottle_initial_pos = Vec3::Zero();

  std::vector<Contact> contacts;
  bool attached = false;
  Pose grab_offset;  // left palm frame -> bottle frame, captured at attach

  int step_count = 0;
  bool done = false;
  std::string outcome;  // "", "success", "drop", "horizon"
  std::vector<int> outcome_history;  // completed-episode results, 1 = success
};

struct RewardBreakdown {
  double r_hdis = 0, r_fcon = 0, r_cang = 0, r_cvel = 0, r_fdis = 0;
  double r_htdis = 0, r_bdis = 0, r_brot = 0;
  double r_left = 0, r_right = 0, total = 0;
};

struct Observation {
  std::vector<float> image;            // 224*224*3
  std::vector<std::uint8_t> tactile;   // 40, left 20 then right 20
};

struct StepInfo {
  bool success = false;
  bool dropped = false;
  bool horizon = false;
};

}  // namespace bimanip::env
