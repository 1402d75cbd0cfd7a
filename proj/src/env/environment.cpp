#include "bimanip/env/environment.hpp"

#include <cmath>
#include <set>

#include "bimanip/core/errors.hpp"
#include "bimanip/core/rng.hpp"
#include "bimanip/env/scene_items.hpp"
#include "bimanip/kin/kinematics.hpp"

namespace bimanip::env {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CylinderGeom {
  Vec3 center;
  Vec3 axis;  // unit
  double radius;
  double half_height;
};

// Signed distance to the closed cylinder surface: negative inside, so a thin
// shell |sd| <= eps models touch without letting deep interior points count.
double cylinder_signed_distance(const Vec3& p, const CylinderGeom& c) {
  const Vec3 rel = p - c.center;
  const double z = rel.dot(c.axis);
  const double rad = (rel - z * c.axis).norm();
  const double dr = rad - c.radius;
  const double dz = std::abs(z) - c.half_height;
  if (dr <= 0 && dz <= 0) return std::max(dr, dz);
  return std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
}

CylinderGeom body_geom(const Pose& bottle, const BottleSpec& spec) {
  return {bottle.p, bottle.q * Vec3::UnitZ(), spec.body_radius, 0.5 * spec.body_height};
}

CylinderGeom cap_geom(const Pose& bottle, const BottleSpec& spec) {
  const Vec3 axis = bottle.q * Vec3::UnitZ();
  return {bottle.p + axis * (0.5 * spec.body_height + 0.5 * spec.cap_height), axis,
          spec.cap_radius, 0.5 * spec.cap_height};
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double denom = ab.squaredNorm();
  const double t = denom > 0 ? std::clamp((p - a).dot(ab) / denom, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

int count_distinct_links(const std::vector<Contact>& contacts, HandSide hand) {
  std::set<int> links;
  for (const auto& c : contacts) {
    if (c.hand == hand) links.insert(c.link);
  }
  return static_cast<int>(links.size());
}

bool any_contact(const std::vector<Contact>& contacts, HandSide hand, Surface surface) {
  for (const auto& c : contacts) {
    if (c.hand == hand && c.surface == surface) return true;
  }
  return false;
}

}  // namespace

Environment::Environment(const BottleSpec& bottle, int stage, EnvParams params,
                         RewardParams reward_params)
    : bottle_(bottle),
      stage_(stage),
      params_(params),
      reward_params_(reward_params),
      left_hand_(kin::robot_hand_model(kin::Side::Left)),
      right_hand_(kin::robot_hand_model(kin::Side::Right)) {
  validate_bottle(bottle_);
  if (stage_ != 1 && stage_ != 2) throw ConfigError("stage must be 1 or 2");
  left_actuated_ = left_hand_.actuated_joints();
  right_actuated_ = right_hand_.actuated_joints();
  renderer_ = std::make_shared<const Renderer>(Camera{}, params_.table_z);
}

kin::JointAngles Environment::hand_angles(const EnvState& state, HandSide side) const {
  kin::JointAngles q;
  q.values = side == HandSide::Left ? state.q.head(kHandDof) : state.q.tail(kHandDof);
  return q;
}

std::vector<Pose> Environment::hand_fk(const EnvState& state, HandSide side) const {
  const kin::HandModel& model = hand_model(side);
  const Pose& wrist = side == HandSide::Left ? state.left_wrist : state.right_wrist;
  auto fk = kin::forward_kinematics(model, hand_angles(state, side));
  for (auto& pose : fk) pose = wrist * pose;
  return fk;
}

Vec3 Environment::palm_position(const EnvState& state, HandSide side) const {
  const auto fk = hand_fk(state, side);
  return kin::link_pose(fk, hand_model(side).palm_link).p;
}

Vec3 Environment::hold_target(const EnvState& state) const {
  return state.bottle_initial_pos + Vec3(0, bottle_.body_radius + 0.012, 0.015);
}

std::vector<Contact> Environment::compute_contacts(const EnvState& state) const {
  const CylinderGeom body = body_geom(state.bottle, bottle_);
  const CylinderGeom cap = cap_geom(state.bottle, bottle_);
  std::vector<Contact> out;
  for (HandSide side : {HandSide::Left, HandSide::Right}) {
    const kin::HandModel& model = hand_model(side);
    const auto fk = hand_fk(state, side);
    for (int link : model.tactile_links) {
      const Vec3 p = kin::link_pose(fk, link).p;
      if (std::abs(cylinder_signed_distance(p, body)) <= params_.contact_eps) {
        out.push_back({side, link, p, Surface::Body});
      }
      if (std::abs(cylinder_signed_distance(p, cap)) <= params_.contact_eps) {
        out.push_back({side, link, p, Surface::Cap});
      }
    }
  }
  return out;
}

EnvState Environment::reset(std::uint64_t seed) const {
  Rng rng(seed);
  EnvState s;
  s.stage = stage_;

  s.bottle.p = Vec3(0, 0, 0.5 * bottle_.body_height + params_.table_z);
  s.bottle.q = Quat::Identity();
  s.q_ini = s.bottle.q;
  s.bottle_initial_pos = s.bottle.p;

  const double cap_top = params_.table_z + bottle_.cap_top_z();
  s.right_wrist.p = Vec3(-(params_.right_reach + bottle_.cap_radius), 0.0,
                         cap_top + params_.right_height);
  s.right_wrist.q = Quat::Identity();

  s.left_wrist.p = Vec3(-0.085, bottle_.body_radius + params_.left_gap,
                        params_.table_z + params_.left_height);
  s.left_wrist.q = quat_from_axis_angle(Vec3::UnitX(), -0.5 * kPi);

  // Pre-grasp posture: fingers part-flexed, thumb slightly opposed.
  s.q.setZero(2 * kHandDof);
  s.qvel.setZero(2 * kHandDof);
  for (HandSide side : {HandSide::Left, HandSide::Right}) {
    const kin::HandModel& model = hand_model(side);
    const int base = side == HandSide::Left ? 0 : kHandDof;
    kin::JointAngles q;
    q.values.setZero(model.n_dof);
    for (int k = 0; k < model.n_joints(); ++k) {
      const int d = model.dof_index[static_cast<std::size_t>(k)];
      if (d < 0) continue;
      const std::string& name = model.joints[static_cast<std::size_t>(k)].name;
      double v = 0.0;
      if (name.size() >= 2 && name.substr(name.size() - 2) == "J3") v = 0.9;
      if (name.size() >= 2 && name.substr(name.size() - 2) == "J2") v = 0.5;
      if (name == "THJ4") v = 0.4;
      if (name == "THJ3" || name == "THJ2" || name == "THJ1") v = 0.25;
      q.values[d] = v;
    }
    for (int j : model.actuated_joints()) {
      const int d = model.dof_index[static_cast<std::size_t>(j)];
      q.values[d] += rng.uniform(-params_.reset_joint_jitter, params_.reset_joint_jitter);
    }
    q = kin::clamp_to_limits(model, q);
    kin::apply_coupling(model, q);
    s.q.segment(base, kHandDof) = q.values;
  }

  s.contacts = compute_contacts(s);
  return s;
}

StepResult Environment::step(const EnvState& state, const Eigen::VectorXd& action) const {
  if (state.done) throw Error("step: environment episode is already done");
  if (action.size() != kActionDim) {
    throw DimensionError("step: action must have 46 entries, got " +
                         std::to_string(action.size()));
  }
  if (!action.allFinite()) throw ValidationError("step: non-finite action");

  EnvState s = state;
  const double dt = params_.dt;

  const auto fk_right_prev = hand_fk(state, HandSide::Right);

  // Finger targets move by scaled, clamped action deltas; tendon followers
  // mirror their drivers.
  int a_idx = 0;
  for (HandSide side : {HandSide::Left, HandSide::Right}) {
    const kin::HandModel& model = hand_model(side);
    const auto& actuated = side == HandSide::Left ? left_actuated_ : right_actuated_;
    const int base = side == HandSide::Left ? 0 : kHandDof;
    kin::JointAngles q;
    q.values = s.q.segment(base, kHandDof);
    for (int j : actuated) {
      const int d = model.dof_index[static_cast<std::size_t>(j)];
      q.values[d] += std::clamp(action[a_idx++], -1.0, 1.0) * params_.finger_scale;
    }
    q = kin::clamp_to_limits(model, q);
    kin::apply_coupling(model, q);
    s.q.segment(base, kHandDof) = q.values;
  }
  s.qvel = (s.q - state.q) / dt;

  // Left wrist integrates a twist command in the world frame.
  Vec3 dp, dw;
  for (int i = 0; i < 3; ++i) {
    dp[i] = std::clamp(action[40 + i], -1.0, 1.0) * params_.wrist_lin_scale;
    dw[i] = std::clamp(action[43 + i], -1.0, 1.0) * params_.wrist_ang_scale;
  }
  s.left_wrist.p += dp;
  const double wn = dw.norm();
  if (wn > 1e-12) {
    s.left_wrist.q = (quat_from_axis_angle(dw / wn, wn) * s.left_wrist.q).normalized();
  }
  s.left_wrist_twist.head<3>() = dp / dt;
  s.left_wrist_twist.tail<3>() = dw / dt;

  // Bottle: stage 1 is pinned to the table. Stage 2 is carried by the left
  // palm while enough body contacts persist (from the previous step's
  // contact set), otherwise it is a projectile.
  if (stage_ == 2) {
    int body_contacts = 0;
    {
      std::set<int> links;
      for (const auto& c : state.contacts) {
        if (c.hand == HandSide::Left && c.surface == Surface::Body) links.insert(c.link);
      }
      body_contacts = static_cast<int>(links.size());
    }
    const Vec3 prev_pos = s.bottle.p;
    const auto fk_left = hand_fk(s, HandSide::Left);
    const Pose palm = kin::link_pose(fk_left, left_hand_.palm_link);
    if (body_contacts >= params_.attach_min_contacts) {
      if (!s.attached) {
        s.attached = true;
        s.grab_offset = palm.inverse() * s.bottle;
      }
      s.bottle = palm * s.grab_offset;
      s.bottle.q.normalize();
      s.bottle_vel = (s.bottle.p - prev_pos) / dt;
    } else {
      s.attached = false;
      s.bottle_vel.z() -= params_.gravity * dt;
      s.bottle.p += s.bottle_vel * dt;
    }
  } else {
    s.bottle_vel.setZero();
  }

  // Cap rotation from the tangential speed of right fingertips touching it.
  {
    const CylinderGeom cap = cap_geom(s.bottle, bottle_);
    const auto fk_right = hand_fk(s, HandSide::Right);
    double tangential_sum = 0.0;
    int touching = 0;
    for (std::size_t i = 0; i < right_hand_.fingertip_links.size(); ++i) {
      const int link = right_hand_.fingertip_links[i];
      const Vec3 p = kin::link_pose(fk_right, link).p;
      if (std::abs(cylinder_signed_distance(p, cap)) > params_.contact_eps) continue;
      const Vec3 v_tip =
          (p - kin::link_pose(fk_right_prev, link).p) / dt - s.bottle_vel;
      const Vec3 rel = p - cap.center;
      const Vec3 radial = rel - rel.dot(cap.axis) * cap.axis;
      if (radial.norm() < 1e-9) continue;
      const Vec3 phi_hat = cap.axis.cross(radial.normalized());
      tangential_sum += v_tip.dot(phi_hat);
      ++touching;
    }
    s.cap_vel = touching > 0 ? bottle_.k_c * tangential_sum / touching : 0.0;
    s.cap_angle += s.cap_vel * dt;
  }

  s.contacts = compute_contacts(s);
  s.step_count += 1;

  StepResult result;
  result.info.success = detect_success(s);
  result.info.dropped = stage_ == 2 && s.bottle.p.z() < params_.table_z;
  result.info.horizon =
      !result.info.success && !result.info.dropped && s.step_count >= params_.horizon;
  if (result.info.success || result.info.dropped || result.info.horizon) {
    s.done = true;
    s.outcome = result.info.success ? "success" : (result.info.dropped ? "drop" : "horizon");
    s.outcome_history.push_back(result.info.success ? 1 : 0);
  }

  result.reward = stage_ == 1 ? reward_stage1(s) : reward_stage2(s);
  result.done = s.done;
  result.state = std::move(s);
  return result;
}

// The right-hand reward terms are identical in both stages.
void Environment::right_hand_terms(const EnvState& state, RewardBreakdown& r) const {
  const RewardParams& rp = reward_params_;
  r.r_cang = rp.alpha3 * std::min(state.cap_angle, rp.cap_angle_clamp);
  const double c_flag = any_contact(state.contacts, HandSide::Right, Surface::Cap) ? 1.0 : 0.0;
  r.r_cvel = rp.alpha4 * c_flag * state.cap_vel;

  const auto fk_right = hand_fk(state, HandSide::Right);
  const double cap_top_z =
      (state.bottle.p + (state.bottle.q * Vec3::UnitZ()) *
                            (0.5 * bottle_.body_height + bottle_.cap_height))
          .z();
  double d_fz = 0.0;
  for (int link : right_hand_.fingertip_links) {
    d_fz += std::abs(kin::link_pose(fk_right, link).p.z() - cap_top_z);
  }
  d_fz /= static_cast<double>(right_hand_.fingertip_links.size());
  r.r_fdis = rp.alpha5 * std::exp(-rp.fdis_gain * d_fz);
}

RewardBreakdown Environment::reward_stage1(const EnvState& state) const {
  if (state.stage != 1) throw Error("reward_stage1: state is not in stage 1");
  const RewardParams& rp = reward_params_;
  RewardBreakdown r;

  const Vec3 palm = palm_position(state, HandSide::Left);
  const Vec3 axis_dir = state.bottle.q * Vec3::UnitZ();
  const Vec3 a = state.bottle.p - axis_dir * (0.5 * bottle_.body_height);
  const Vec3 b = state.bottle.p + axis_dir * (0.5 * bottle_.body_height);
  const double d_h2b = point_segment_distance(palm, a, b);
  r.r_hdis = rp.alpha1 * d_h2b;
  r.r_fcon = rp.alpha2 * count_distinct_links(state.contacts, HandSide::Left);

  right_hand_terms(state, r);

  r.r_left = r.r_hdis + r.r_fcon;
  r.r_right = r.r_cang + r.r_cvel + r.r_fdis;
  r.total = r.r_left + r.r_right;
  return r;
}

RewardBreakdown Environment::reward_stage2(const EnvState& state) const {
  if (state.stage != 2) throw Error("reward_stage2: state is not in stage 2");
  const RewardParams& rp = reward_params_;
  RewardBreakdown r;
  right_hand_terms(state, r);

  const Vec3 palm = palm_position(state, HandSide::Left);
  const double d_h2t = (palm - hold_target(state)).norm();
  r.r_htdis = rp.beta1 * std::exp(-rp.htdis_gain * d_h2t);
  const double d_o2i = (state.bottle.p - state.bottle_initial_pos).norm();
  r.r_bdis = rp.beta2 * std::exp(-rp.bdis_gain * d_o2i);
  const double d_qua = quat_angle_from_vector_part(state.bottle.q, state.q_ini);
  r.r_brot = rp.beta3 / (std::abs(d_qua) + 1.0);

  r.r_left = r.r_htdis + r.r_bdis + r.r_brot;
  r.r_right = r.r_cang + r.r_cvel + r.r_fdis;
  r.total = r.r_left + r.r_right;
  return r;
}

RewardBreakdown Environment::reward(const EnvState& state) const {
  return state.stage == 1 ? reward_stage1(state) : reward_stage2(state);
}

bool Environment::detect_success(const EnvState& state) { return state.cap_angle > kPi; }

Scene Environment::build_scene(const EnvState& state) const {
  Scene scene;
  add_bottle_to_scene(scene, state.bottle, bottle_, state.cap_angle);
  for (HandSide side : {HandSide::Left, HandSide::Right}) {
    add_hand_to_scene(scene, hand_model(side), hand_fk(state, side), side == HandSide::Left);
  }
  return scene;
}

Observation Environment::render_observation(const EnvState& state) const {
  Observation obs;
  obs.image = renderer_->render(build_scene(state));
  obs.tactile.assign(40, 0);
  int idx = 0;
  for (HandSide side : {HandSide::Left, HandSide::Right}) {
    const kin::HandModel& model = hand_model(side);
    for (int link : model.tactile_links) {
      bool touched = false;
      for (const auto& c : state.contacts) {
        if (c.hand == side && c.link == link) {
          touched = true;
          break;
        }
      }
      obs.tactile[static_cast<std::size_t>(idx++)] = touched ? 1 : 0;
    }
  }
  return obs;
}

Eigen::VectorXd Environment::proprioception(const EnvState& state) const {
  Eigen::VectorXd p(kProprioDim);
  p.head(48) = state.q;
  p.segment(48, 48) = state.qvel;
  p.segment(96, 3) = state.left_wrist.p;
  p[99] = state.left_wrist.q.w();
  p[100] = state.left_wrist.q.x();
  p[101] = state.left_wrist.q.y();
  p[102] = state.left_wrist.q.z();
  p.segment(103, 6) = state.left_wrist_twist;
  return p;
}

}  // namespace bimanip::env
