#include "bimanip/mmae/config.hpp"

#include <json.hpp>

#include "bimanip/core/errors.hpp"
#include "bimanip/kin/hand_model.hpp"

namespace bimanip::mmae {

namespace {

using nlohmann::json;

// Finger membership of the 24 per-hand dofs, derived from the robot model's
// joint names. The two wrist dofs ride with the thumb group.
std::vector<std::vector<int>> per_hand_finger_groups() {
  const auto model = kin::robot_hand_model();
  std::vector<std::vector<int>> groups(5);
  const std::vector<std::string> prefixes = {"TH", "FF", "MF", "RF", "LF"};
  for (int k = 0; k < model.n_joints(); ++k) {
    const int d = model.dof_index[static_cast<std::size_t>(k)];
    if (d < 0) continue;
    const std::string& name = model.joints[static_cast<std::size_t>(k)].name;
    if (name.rfind("WR", 0) == 0) {
      groups[0].push_back(d);
      continue;
    }
    for (std::size_t f = 0; f < prefixes.size(); ++f) {
      if (name.rfind(prefixes[f], 0) == 0) {
        groups[f].push_back(d);
        break;
      }
    }
  }
  return groups;
}

}  // namespace

std::vector<int> ModelConfig::tactile_dims() const {
  std::vector<int> dims;
  if (!use_tactile) return dims;
  const int start = tactile_hands == Hands::Dual ? 0 : 20;
  for (int i = start; i < 40; ++i) dims.push_back(i);
  return dims;
}

std::vector<std::vector<int>> ModelConfig::action_groups() const {
  std::vector<std::vector<int>> groups;
  if (!use_action) return groups;
  const std::vector<int> hand_offsets =
      action_hands == Hands::Dual ? std::vector<int>{0, 24} : std::vector<int>{24};
  for (int off : hand_offsets) {
    switch (granularity) {
      case ActionGranularity::PerJoint:
        for (int j = 0; j < 24; ++j) groups.push_back({off + j});
        break;
      case ActionGranularity::PerFinger:
        for (const auto& g : per_hand_finger_groups()) {
          std::vector<int> shifted;
          for (int j : g) shifted.push_back(off + j);
          groups.push_back(std::move(shifted));
        }
        break;
      case ActionGranularity::PerHand: {
        std::vector<int> all;
        for (int j = 0; j < 24; ++j) all.push_back(off + j);
        groups.push_back(std::move(all));
        break;
      }
    }
  }
  return groups;
}

int ModelConfig::action_token_count() const {
  return static_cast<int>(action_groups().size());
}

std::vector<int> ModelConfig::action_dims() const {
  std::vector<int> dims;
  for (const auto& g : action_groups()) dims.insert(dims.end(), g.begin(), g.end());
  std::sort(dims.begin(), dims.end());
  return dims;
}

void ModelConfig::validate() const {
  auto ratio_ok = [](double r) { return r >= 0.0 && r < 1.0; };
  if (!ratio_ok(mask_ratio_visual) || !ratio_ok(mask_ratio_tactile) ||
      !ratio_ok(mask_ratio_action) || !ratio_ok(mask_ratio_null)) {
    throw ConfigError("mask ratios must lie in [0, 1)");
  }
  if (embed_dim <= 0 || embed_dim % encoder_heads != 0 || embed_dim % decoder_heads != 0) {
    throw ConfigError("embed_dim must be divisible by the head counts");
  }
  if (224 % patch_size != 0) throw ConfigError("patch size must divide 224");
  if (future_steps < 0) throw ConfigError("future_steps must be >= 0");
  if (null_tokens <= 0) throw ConfigError("null token count must be positive");
  if (encoder_depth < 1 || decoder_depth < 1) throw ConfigError("depths must be >= 1");
  // Action groups must partition their joint set exactly.
  if (use_action) {
    const auto dims = action_dims();
    const int expect = action_hands == Hands::Dual ? 48 : 24;
    if (static_cast<int>(dims.size()) != expect) {
      throw ConfigError("action groups do not partition the joint set");
    }
    for (std::size_t i = 1; i < dims.size(); ++i) {
      if (dims[i] == dims[i - 1]) throw ConfigError("action groups overlap");
    }
  }
}

std::string ModelConfig::to_json() const {
  json j;
  j["name"] = name;
  j["embed_dim"] = embed_dim;
  j["encoder_depth"] = encoder_depth;
  j["encoder_heads"] = encoder_heads;
  j["decoder_depth"] = decoder_depth;
  j["decoder_heads"] = decoder_heads;
  j["patch_size"] = patch_size;
  j["mask_ratio_visual"] = mask_ratio_visual;
  j["mask_ratio_tactile"] = mask_ratio_tactile;
  j["mask_ratio_action"] = mask_ratio_action;
  j["mask_ratio_null"] = mask_ratio_null;
  j["future_steps"] = future_steps;
  j["granularity"] = granularity == ActionGranularity::PerJoint    ? "per_joint"
                     : granularity == ActionGranularity::PerFinger ? "per_finger"
                                                                   : "per_hand";
  j["use_visual"] = use_visual;
  j["use_tactile"] = use_tactile;
  j["use_action"] = use_action;
  j["recon_bottle"] = recon_bottle;
  j["pretrained"] = pretrained;
  j["tactile_hands"] = tactile_hands == Hands::Dual ? "dual" : "right";
  j["action_hands"] = action_hands == Hands::Dual ? "dual" : "right";
  j["separate_decoders"] = separate_decoders;
  j["learned_pos"] = learned_pos;
  j["null_tokens"] = null_tokens;
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
  ModelConfig c;
  c.name = j.value("name", c.name);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.encoder_depth = j.value("encoder_depth", c.encoder_depth);
  c.encoder_heads = j.value("encoder_heads", c.encoder_heads);
  c.decoder_depth = j.value("decoder_depth", c.decoder_depth);
  c.decoder_heads = j.value("decoder_heads", c.decoder_heads);
  c.patch_size = j.value("patch_size", c.patch_size);
  c.mask_ratio_visual = j.value("mask_ratio_visual", c.mask_ratio_visual);
  c.mask_ratio_tactile = j.value("mask_ratio_tactile", c.mask_ratio_tactile);
  c.mask_ratio_action = j.value("mask_ratio_action", c.mask_ratio_action);
  c.mask_ratio_null = j.value("mask_ratio_null", c.mask_ratio_null);
  c.future_steps = j.value("future_steps", c.future_steps);
  const std::string gran = j.value("granularity", "per_joint");
  c.granularity = gran == "per_joint"    ? ActionGranularity::PerJoint
                  : gran == "per_finger" ? ActionGranularity::PerFinger
                                         : ActionGranularity::PerHand;
  c.use_visual = j.value("use_visual", c.use_visual);
  c.use_tactile = j.value("use_tactile", c.use_tactile);
  c.use_action = j.value("use_action", c.use_action);
  c.recon_bottle = j.value("recon_bottle", c.recon_bottle);
  c.pretrained = j.value("pretrained", c.pretrained);
  c.tactile_hands = j.value("tactile_hands", "dual") == std::string("dual") ? Hands::Dual : Hands::RightOnly;
  c.action_hands = j.value("action_hands", "dual") == std::string("dual") ? Hands::Dual : Hands::RightOnly;
  c.separate_decoders = j.value("separate_decoders", c.separate_decoders);
  c.learned_pos = j.value("learned_pos", c.learned_pos);
  c.null_tokens = j.value("null_tokens", c.null_tokens);
  c.validate();
  return c;
}

ModelConfig configure_ablation(const std::string& name) {
  ModelConfig c;
  c.name = name;
  c.recon_bottle = false;
  if (name == "VTAO") {
    c.recon_bottle = true;
  } else if (name == "VTA" || name == "v1") {
    // joint visual+tactile+action pretraining, no object head
  } else if (name == "VT" || name == "v3") {
    c.use_action = false;
  } else if (name == "VTO") {
    c.use_action = false;
    c.recon_bottle = true;
  } else if (name == "V") {
    c.use_tactile = false;
    c.use_action = false;
  } else if (name == "T") {
    c.use_visual = false;
    c.use_action = false;
  } else if (name == "A") {
    c.use_visual = false;
    c.use_tactile = false;
  } else if (name == "VTA-Scr") {
    c.pretrained = false;
  } else if (name == "Base") {
    c.use_visual = false;
    c.use_tactile = false;
    c.use_action = false;
    c.pretrained = false;
  } else if (name == "v2") {
    c.action_hands = Hands::RightOnly;
  } else if (name == "v4") {
    c.use_action = false;
    c.tactile_hands = Hands::RightOnly;
  } else if (name == "v5") {
    c.future_steps = 0;  // reconstruct the current action only
  } else if (name == "v6") {
    c.future_steps = 1;
  } else if (name == "v7") {
    c.granularity = ActionGranularity::PerHand;
  } else if (name == "v8") {
    c.granularity = ActionGranularity::PerFinger;
  } else {
    throw ConfigError("unknown baseline name: " + name);
  }
  c.validate();
  return c;
}

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names = {
      "V",  "T",  "A",  "VT", "VTA", "VTO", "VTA-Scr", "VTAO",
      "v1", "v2", "v3", "v4", "v5",  "v6",  "v7",      "v8",
      "Base"};
  return names;
}

}  // namespace bimanip::mmae
