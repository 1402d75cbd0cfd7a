#pragma once

#include <memory>

#include "bimanip/env/bottle.hpp"
#include "bimanip/env/renderer.hpp"
#include "bimanip/env/state.hpp"
#include "bimanip/kin/hand_model.hpp"

namespace bimanip::env {

// Physics and layout constants of the surrogate simulator.
struct EnvParams {
  double dt = 1.0 / 30.0;
  int horizon = 300;
  double contact_eps = 0.01;       // |signed distance| <= eps counts as touch
  double finger_scale = 0.05;      // rad per step per actuated joint
  double wrist_lin_scale = 0.01;   // m per step
  double wrist_ang_scale = 0.02;   // rad per step
  double gravity = 9.81;
  double table_z = 0.0;
  int attach_min_contacts = 3;

  // Pre-grasp placement. The right wrist sits behind and above the cap so a
  // mid-flex posture puts the middle/ring fingertips on the cap rim.
  double right_reach = 0.0811;   // wrist-to-fingertip planar reach at contact flex
  double right_height = 0.065;   // wrist height above cap top
  double left_gap = 0.080;       // palm-to-bottle-surface pre-grasp gap
  double left_height = 0.070;

  double reset_joint_jitter = 0.02;  // rad, uniform, actuated joints only
};

// Eq-style reward weights; alpha for stage 1, beta for stage 2.
struct RewardParams {
  double alpha1 = -5.0, alpha2 = 0.05, alpha3 = 0.5, alpha4 = 1.1, alpha5 = 0.5;
  double beta1 = 1.0, beta2 = 1.0, beta3 = 1.0;
  double cap_angle_clamp = 7.0;
  double fdis_gain = 10.0;
  double htdis_gain = 5.0;
  double bdis_gain = 10.0;
};

constexpr int kActionDim = 46;  // 20 left + 20 right actuated + 6 left-wrist twist
constexpr int kHandDof = 24;
constexpr int kProprioDim = 109;  // 48 q + 48 qvel + wrist pose 7 + twist 6

struct StepResult {
  EnvState state;
  RewardBreakdown reward;
  bool done = false;
  StepInfo info;
};

// Bimanual bottle-cap environment. Instances are immutable after
// construction; all mutation flows through the returned EnvState, so several
// states can be stepped concurrently against one Environment.
class Environment {
 public:
  Environment(const BottleSpec& bottle, int stage, EnvParams params = {},
              RewardParams reward_params = {});

  EnvState reset(std::uint64_t seed) const;
  StepResult step(const EnvState& state, const Eigen::VectorXd& action) const;

  RewardBreakdown reward_stage1(const EnvState& state) const;
  RewardBreakdown reward_stage2(const EnvState& state) const;
  RewardBreakdown reward(const EnvState& state) const;

  Observation render_observation(const EnvState& state) const;
  static bool detect_success(const EnvState& state);

  // World-frame link poses of one hand at the state's configuration.
  std::vector<Pose> hand_fk(const EnvState& state, HandSide side) const;
  Vec3 palm_position(const EnvState& state, HandSide side) const;
  // Left palm target used by the stage-2 holding reward.
  Vec3 hold_target(const EnvState& state) const;

  std::vector<Contact> compute_contacts(const EnvState& state) const;

  const BottleSpec& bottle() const { return bottle_; }
  const EnvParams& params() const { return params_; }
  const RewardParams& reward_params() const { return reward_params_; }
  int stage() const { return stage_; }
  const kin::HandModel& hand_model(HandSide side) const {
    return side == HandSide::Left ? left_hand_ : right_hand_;
  }
  // Proprioception vector: q, qvel, left wrist pose (p, q wxyz), twist.
  Eigen::VectorXd proprioception(const EnvState& state) const;

 private:
  kin::JointAngles hand_angles(const EnvState& state, HandSide side) const;
  void right_hand_terms(const EnvState& state, RewardBreakdown& r) const;
  Scene build_scene(const EnvState& state) const;

  BottleSpec bottle_;
  int stage_;
  EnvParams params_;
  RewardParams reward_params_;
  kin::HandModel left_hand_;
  kin::HandModel right_hand_;
  std::vector<int> left_actuated_;
  std::vector<int> right_actuated_;
  std::shared_ptr<const Renderer> renderer_;
};

}  // namespace bimanip::env
