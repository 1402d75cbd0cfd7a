#pragma once

#include <map>
#include <string>

#include "bimanip/env/environment.hpp"

namespace bimanip::env {

// Hand-coded unscrewing routine: the middle and ring fingers press on the cap
// rim, sweep sideways while touching, lift clear, sweep back and re-engage.
// Every sweep while in contact advances the cap; each cycle nets positive
// rotation. Used as the solvability fixture for the environment.
class ScriptedTwistController {
 public:
  explicit ScriptedTwistController(const Environment& env);

  // Maps the state to a 46-dim action (left hand and wrist stay idle).
  Eigen::VectorXd action(const EnvState& state) const;

 private:
  double target_for(const std::string& joint, int step) const;

  const Environment& env_;
  std::map<std::string, int> right_action_index_;  // joint name -> action slot
};

}  // namespace bimanip::env
