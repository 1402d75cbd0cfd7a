#include "bimanip/env/scripted.hpp"

#include <cmath>

namespace bimanip::env {

namespace {

// Cycle phases (steps): approach into contact, sweep while touching, flex
// deeper to pull the tips clear, sweep back.
constexpr int kEngage = 10;
constexpr int kSweep = 14;
constexpr int kRelease = 7;
constexpr int kReturn = 14;
constexpr int kCycle = kEngage + kSweep + kRelease + kReturn;

constexpr double kContactFlex = 1.35;   // J3 at which tips ride the cap rim
constexpr double kClearFlex = 1.68;     // J3 that pulls the tips off the rim
constexpr double kMidFlex = 0.70;       // J2 (distal follows by coupling)
constexpr double kSweepAmp = 0.35;      // J4 abduction sweep amplitude

}  // namespace

ScriptedTwistController::ScriptedTwistController(const Environment& env) : env_(env) {
  const auto& model = env_.hand_model(HandSide::Right);
  const auto actuated = model.actuated_joints();
  for (std::size_t i = 0; i < actuated.size(); ++i) {
    // Right-hand action slots start after the 20 left-hand ones.
    right_action_index_[model.joints[static_cast<std::size_t>(actuated[i])].name] =
        20 + static_cast<int>(i);
  }
}

double ScriptedTwistController::target_for(const std::string& joint, int step) const {
  // Twisting fingers: middle and ring.
  const bool twister = joint.rfind("MF", 0) == 0 || joint.rfind("RF", 0) == 0;
  if (twister) {
    const char kind = joint.back();
    const int c = step % kCycle;
    if (kind == '2') return kMidFlex;
    if (kind == '3') {
      if (c < kEngage + kSweep) return kContactFlex;
      return kClearFlex;
    }
    if (kind == '4') {
      if (c < kEngage) return -kSweepAmp;
      if (c < kEngage + kSweep) return kSweepAmp;   // contact sweep
      if (c < kEngage + kSweep + kRelease) return kSweepAmp;
      return -kSweepAmp;                            // clear return
    }
    return 0.0;
  }
  // Everything else stays lifted and out of the way.
  if (joint == "FFJ3" || joint == "LFJ3") return 0.2;
  if (joint == "FFJ2" || joint == "LFJ2") return 0.3;
  if (joint == "THJ4") return 0.2;
  if (joint == "THJ5") return -0.6;
  return 0.0;
}

Eigen::VectorXd ScriptedTwistController::action(const EnvState& state) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(kActionDim);
  const auto& model = env_.hand_model(HandSide::Right);
  const double scale = env_.params().finger_scale;
  for (const auto& [name, slot] : right_action_index_) {
    const int joint = [&] {
      for (int k = 0; k < model.n_joints(); ++k) {
        if (model.joints[static_cast<std::size_t>(k)].name == name) return k;
      }
      return -1;
    }();
    const int dof = model.dof_index[static_cast<std::size_t>(joint)];
    const double current = state.q[24 + dof];
    const double target = target_for(name, state.step_count);
    a[slot] = std::clamp((target - current) / scale, -1.0, 1.0);
  }
  return a;
}

}  // namespace bimanip::env
