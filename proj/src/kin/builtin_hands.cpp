#include <cmath>
#include <map>

#include "bimanip/core/errors.hpp"
#include "bimanip/kin/hand_model.hpp"

namespace bimanip::kin {

namespace {

// Builder that tracks name -> index so chains read naturally.
class SpecBuilder {
 public:
  int add(const std::string& name, const std::string& parent, JointType type,
          Vec3 axis, Vec3 offset, double lo = 0.0, double hi = 0.0) {
    JointSpec j;
    j.name = name;
    j.parent = parent.empty() ? -1 : index(parent);
    j.type = type;
    j.axis = axis.norm() > 0 ? axis.normalized() : axis;
    j.offset = offset;
    j.lo = lo;
    j.hi = hi;
    const int idx = static_cast<int>(joints.size());
    by_name[name] = idx;
    joints.push_back(j);
    return idx;
  }

  int index(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ValidationError("unknown joint name: " + name);
    return it->second;
  }

  std::vector<int> indices(const std::vector<std::string>& names) const {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(index(n));
    return out;
  }

  std::vector<JointSpec> joints;
  std::map<std::string, int> by_name;
};

struct FingerDims {
  double proximal;
  double middle;
  double distal;
};

// One four-joint finger: abduction at the knuckle, three flexion joints,
// distal optionally tendon-coupled to the middle joint.
void add_finger(SpecBuilder& b, const std::string& prefix, const std::string& parent,
                const Vec3& knuckle_offset, const FingerDims& dims,
                std::vector<std::pair<std::string, std::string>>& couplings,
                bool couple_distal) {
  b.add(prefix + "J4", parent, JointType::Revolute, Vec3::UnitZ(), knuckle_offset, -0.35, 0.35);
  b.add(prefix + "J3", prefix + "J4", JointType::Revolute, Vec3::UnitY(), Vec3::Zero(), -0.26, 1.57);
  b.add(prefix + "J2", prefix + "J3", JointType::Revolute, Vec3::UnitY(),
        Vec3(dims.proximal, 0, 0), 0.0, 1.57);
  b.add(prefix + "J1", prefix + "J2", JointType::Revolute, Vec3::UnitY(),
        Vec3(dims.middle, 0, 0), 0.0, 1.57);
  b.add(prefix + "tip", prefix + "J1", JointType::Fixed, Vec3::UnitZ(),
        Vec3(dims.distal, 0, 0));
  if (couple_distal) couplings.emplace_back(prefix + "J1", prefix + "J2");
}

// Thumb: yaw + elevation at the base, then a three-segment chain along +y.
// Flexion axis -x so positive angles curl toward the palm.
void add_thumb(SpecBuilder& b, const std::string& parent, const Vec3& base_offset,
               double scale) {
  b.add("THJ5", parent, JointType::Revolute, Vec3::UnitZ(), base_offset, -1.05, 1.05);
  b.add("THJ4", "THJ5", JointType::Revolute, Vec3::UnitX(), Vec3::Zero(), 0.0, 1.22);
  b.add("THJ3", "THJ4", JointType::Revolute, -Vec3::UnitX(), Vec3(0, 0.038 * scale, 0), -0.21, 1.0);
  b.add("THJ2", "THJ3", JointType::Revolute, -Vec3::UnitX(), Vec3(0, 0.032 * scale, 0), 0.0, 1.0);
  b.add("THJ1", "THJ2", JointType::Revolute, -Vec3::UnitX(), Vec3(0, 0.030 * scale, 0), 0.0, 1.3);
  b.add("THtip", "THJ1", JointType::Fixed, Vec3::UnitZ(), Vec3(0, 0.027 * scale, 0));
}

HandModel finish(const std::string& name, SpecBuilder& b,
                 const std::vector<std::pair<std::string, std::string>>& couplings) {
  // Ordering convention: thumb, index, middle, ring, little.
  const std::vector<std::string> fingers = {"TH", "FF", "MF", "RF", "LF"};
  std::vector<std::string> tips, keys, tactile;
  for (const auto& f : fingers) {
    tips.push_back(f + "tip");
    keys.push_back(f + "J2");
  }
  // 20 sensors per hand: tip, distal, middle and proximal pad of each finger.
  for (const auto& f : fingers) tactile.push_back(f + "tip");
  for (const auto& f : fingers) tactile.push_back(f + "J1");
  for (const auto& f : fingers) tactile.push_back(f + "J2");
  for (const auto& f : fingers) tactile.push_back(f + "J3");
  std::vector<std::pair<int, int>> coupled;
  for (const auto& [fj, dj] : couplings) coupled.emplace_back(b.index(fj), b.index(dj));
  return build_hand_model(name, b.joints, b.indices(tips), b.indices(keys),
                          b.indices(tactile), b.index("palm"), coupled);
}

// Mirror across the xz plane: offsets flip y, rotation axes map a -> -Ma with
// M = diag(1,-1,1) so equal angles produce mirror-symmetric motion.
HandModel mirror(const HandModel& right) {
  HandModel left = right;
  left.name = right.name + "_left";
  for (auto& j : left.joints) {
    j.offset.y() = -j.offset.y();
    j.axis = Vec3(-j.axis.x(), j.axis.y(), -j.axis.z());
  }
  return left;
}

}  // namespace

HandModel robot_hand_model(Side side) {
  SpecBuilder b;
  std::vector<std::pair<std::string, std::string>> couplings;
  b.add("WRJ2", "", JointType::Revolute, Vec3::UnitZ(), Vec3::Zero(), -0.50, 0.30);
  b.add("WRJ1", "WRJ2", JointType::Revolute, Vec3::UnitY(), Vec3(0.010, 0, 0), -0.70, 0.50);
  b.add("palm", "WRJ1", JointType::Fixed, Vec3::UnitZ(), Vec3(0.075, 0, 0));

  const FingerDims main_dims{0.045, 0.025, 0.024};
  const FingerDims little_dims{0.040, 0.022, 0.021};
  add_finger(b, "FF", "palm", Vec3(0.016, 0.033, 0), main_dims, couplings, true);
  add_finger(b, "MF", "palm", Vec3(0.020, 0.011, 0), main_dims, couplings, true);
  add_finger(b, "RF", "palm", Vec3(0.016, -0.011, 0), main_dims, couplings, true);
  // Little finger gets an extra palm-curl metacarpal joint.
  b.add("LFJ5", "palm", JointType::Revolute, Vec3::UnitX(), Vec3(-0.014, -0.033, 0), 0.0, 0.785);
  add_finger(b, "LF", "LFJ5", Vec3(0.030, -0.002, 0), little_dims, couplings, true);
  add_thumb(b, "palm", Vec3(-0.045, 0.028, -0.006), 1.0);

  HandModel m = finish("robot24", b, couplings);
  return side == Side::Right ? m : mirror(m);
}

HandModel human_hand_model(Side side) {
  SpecBuilder b;
  std::vector<std::pair<std::string, std::string>> couplings;
  b.add("palm", "", JointType::Fixed, Vec3::UnitZ(), Vec3(0.078, 0, 0));

  const double s = 0.92;
  const FingerDims main_dims{0.045 * s, 0.025 * s, 0.024 * s};
  const FingerDims little_dims{0.036 * s, 0.020 * s, 0.019 * s};
  add_finger(b, "FF", "palm", Vec3(0.015, 0.030, 0), main_dims, couplings, false);
  add_finger(b, "MF", "palm", Vec3(0.018, 0.010, 0), main_dims, couplings, false);
  add_finger(b, "RF", "palm", Vec3(0.015, -0.010, 0), main_dims, couplings, false);
  add_finger(b, "LF", "palm", Vec3(0.010, -0.030, 0), little_dims, couplings, false);
  add_thumb(b, "palm", Vec3(-0.042, 0.026, -0.005), s);

  HandModel m = finish("human21", b, couplings);
  return side == Side::Right ? m : mirror(m);
}

}  // namespace bimanip::kin
