#include <fstream>
#include <map>

#include <json.hpp>

#include "bimanip/core/errors.hpp"
#include "bimanip/kin/hand_model.hpp"

namespace bimanip::kin {

namespace {

using nlohmann::json;

json model_to_json(const HandModel& m) {
  json j;
  j["name"] = m.name;
  auto jname = [&](int idx) -> json {
    return idx < 0 ? json(nullptr) : json(m.joints[static_cast<std::size_t>(idx)].name);
  };
  json joints = json::array();
  for (const auto& spec : m.joints) {
    json sj;
    sj["name"] = spec.name;
    sj["parent"] = spec.parent < 0
                       ? json(nullptr)
                       : json(m.joints[static_cast<std::size_t>(spec.parent)].name);
    sj["type"] = spec.type == JointType::Revolute ? "revolute" : "fixed";
    sj["axis"] = {spec.axis.x(), spec.axis.y(), spec.axis.z()};
    sj["offset"] = {spec.offset.x(), spec.offset.y(), spec.offset.z()};
    sj["limits"] = {spec.lo, spec.hi};
    joints.push_back(sj);
  }
  j["joints"] = joints;
  json tips = json::array(), keys = json::array(), tact = json::array();
  for (int idx : m.fingertip_links) tips.push_back(jname(idx));
  for (int idx : m.segment_keypoints) keys.push_back(jname(idx));
  for (int idx : m.tactile_links) tact.push_back(jname(idx));
  j["fingertips"] = tips;
  j["segment_keypoints"] = keys;
  j["tactile_links"] = tact;
  j["palm"] = jname(m.palm_link);
  json coupled = json::array();
  for (const auto& [f, d] : m.coupled) {
    coupled.push_back({{"joint", m.joints[static_cast<std::size_t>(f)].name},
                       {"driver", m.joints[static_cast<std::size_t>(d)].name}});
  }
  j["coupled"] = coupled;
  return j;
}

HandModel model_from_json(const json& j) {
  std::map<std::string, int> by_name;
  std::vector<JointSpec> joints;
  for (const auto& sj : j.at("joints")) {
    JointSpec spec;
    spec.name = sj.at("name").get<std::string>();
    const auto& parent = sj.at("parent");
    if (parent.is_null()) {
      spec.parent = -1;
    } else {
      auto it = by_name.find(parent.get<std::string>());
      // Unknown here means not-yet-defined; report as an ordering violation.
      spec.parent = it == by_name.end() ? static_cast<int>(joints.size()) + 1 : it->second;
    }
    const std::string type = sj.at("type").get<std::string>();
    if (type == "revolute") {
      spec.type = JointType::Revolute;
    } else if (type == "fixed") {
      spec.type = JointType::Fixed;
    } else {
      throw ValidationError("unknown joint type: " + type);
    }
    auto vec3 = [](const json& a) { return Vec3(a.at(0), a.at(1), a.at(2)); };
    spec.axis = vec3(sj.at("axis"));
    spec.offset = vec3(sj.at("offset"));
    spec.lo = sj.at("limits").at(0);
    spec.hi = sj.at("limits").at(1);
    by_name[spec.name] = static_cast<int>(joints.size());
    joints.push_back(spec);
  }
  auto resolve = [&](const json& name) -> int {
    if (name.is_null()) return -1;
    auto it = by_name.find(name.get<std::string>());
    if (it == by_name.end()) throw ValidationError("unknown link name: " + name.dump());
    return it->second;
  };
  std::vector<int> tips, keys, tact;
  for (const auto& n : j.at("fingertips")) tips.push_back(resolve(n));
  for (const auto& n : j.at("segment_keypoints")) keys.push_back(resolve(n));
  if (j.contains("tactile_links")) {
    for (const auto& n : j.at("tactile_links")) tact.push_back(resolve(n));
  }
  const int palm = j.contains("palm") ? resolve(j.at("palm")) : -1;
  std::vector<std::pair<int, int>> coupled;
  if (j.contains("coupled")) {
    for (const auto& c : j.at("coupled")) {
      coupled.emplace_back(resolve(c.at("joint")), resolve(c.at("driver")));
    }
  }
  return build_hand_model(j.at("name").get<std::string>(), std::move(joints), tips, keys,
                          tact, palm, coupled);
}

}  // namespace

HandModel load_hand_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hand spec: " + path);
  json j;
  try {
    in >> j;
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError("malformed hand spec " + path + ": " + e.what());
  }
}

void save_hand_model(const HandModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write hand spec: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

std::string builtin_hand_spec_json(const std::string& name) {
  if (name == "robot24") return model_to_json(robot_hand_model()).dump(2);
  if (name == "human21") return model_to_json(human_hand_model()).dump(2);
  throw ConfigError("unknown builtin hand spec: " + name);
}

}  // namespace bimanip::kin
