#include "bimanip/data/generator.hpp"

#include <cmath>

#include <json.hpp>

#include "bimanip/core/digest.hpp"
#include "bimanip/core/errors.hpp"
#include "bimanip/core/rng.hpp"
#include "bimanip/data/object_label.hpp"
#include "bimanip/data/streams.hpp"
#include "bimanip/env/scene_items.hpp"
#include "bimanip/kin/kinematics.hpp"

namespace bimanip::data {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

// Per-joint slow sinusoidal modulation, sampled once per trajectory.
struct JointWobble {
  double amp, freq, phase;
  double at(double tau) const { return amp * std::sin(kTwoPi * freq * tau + phase); }
};

struct HandScript {
  std::vector<JointWobble> wobble;  // per dof

  static HandScript sample(const kin::HandModel& model, Rng& rng) {
    HandScript s;
    s.wobble.resize(static_cast<std::size_t>(model.n_dof));
    for (auto& w : s.wobble) {
      w.amp = rng.uniform(0.0, 0.06);
      w.freq = rng.uniform(0.2, 0.8);
      w.phase = rng.uniform(0.0, kTwoPi);
    }
    return s;
  }
};

// Scripted human joint angles at normalized trajectory time tau in [0, 1]:
// grasp ramps in over the first 40%, the right hand then twists.
kin::JointAngles scripted_angles(const kin::HandModel& model, const HandScript& script,
                                 bool left_hand, double tau) {
  kin::JointAngles q;
  q.values.setZero(model.n_dof);
  const double grasp = smoothstep(tau / 0.4);
  const double twist_tau = std::max(0.0, (tau - 0.4) / 0.6);
  const double sweep = std::sin(kTwoPi * 2.0 * twist_tau);
  for (int k = 0; k < model.n_joints(); ++k) {
    const int d = model.dof_index[static_cast<std::size_t>(k)];
    if (d < 0) continue;
    const std::string& name = model.joints[static_cast<std::size_t>(k)].name;
    const char kind = name.back();
    double v = 0.0;
    if (left_hand) {
      if (kind == '3') v = 0.15 + 0.85 * grasp;
      if (kind == '2' || kind == '1') v = 0.10 + 0.55 * grasp;
      if (name == "THJ4") v = 0.2 + 0.5 * grasp;
      if (name == "THJ5") v = 0.3 * grasp;
    } else {
      if (kind == '3') v = 0.30 + 0.75 * grasp;
      if (kind == '2' || kind == '1') v = 0.15 + 0.45 * grasp;
      if (kind == '4') v = 0.30 * sweep * (twist_tau > 0 ? 1.0 : 0.0);
      if (name == "THJ4") v = 0.3 * grasp;
    }
    v += script.wobble[static_cast<std::size_t>(d)].at(tau);
    q.values[d] = v;
  }
  return kin::clamp_to_limits(model, q);
}

Pose camera_pose_from(const env::Camera& cam) {
  const Vec3 fwd = (cam.target - cam.eye).normalized();
  const Vec3 right = fwd.cross(cam.up).normalized();
  const Vec3 down = fwd.cross(right).normalized();
  Mat3 cam_to_world;
  cam_to_world.col(0) = right;
  cam_to_world.col(1) = down;
  cam_to_world.col(2) = fwd;
  return Pose{Quat(cam_to_world), cam.eye};
}

struct TrajectoryScene {
  BottleSizes sizes;
  Pose bottle;
  Pose left_wrist, right_wrist;
  env::Camera camera;
};

}  // namespace

void GeneratorConfig::validate() const {
  auto range_ok = [](const double r[2]) { return r[0] > 0 && r[0] <= r[1]; };
  if (trajectories <= 0 || frames_per_trajectory <= 0) {
    throw ConfigError("generator: trajectory counts must be positive");
  }
  if (future_steps < 0 || future_steps >= frames_per_trajectory) {
    throw ConfigError("generator: future_steps must lie in [0, frames_per_trajectory)");
  }
  if (!range_ok(body_radius_range) || !range_ok(body_height_range) ||
      !range_ok(cap_radius_range) || !range_ok(cap_height_range)) {
    throw ConfigError("generator: invalid size ranges");
  }
  if (cap_radius_range[0] >= body_radius_range[1]) {
    throw ConfigError("generator: cap radius range must sit below body radius range");
  }
  if (visual_hz <= 0 || tactile_hz <= 0 || mocap_hz <= 0) {
    throw ConfigError("generator: rates must be positive");
  }
}

std::string GeneratorConfig::to_json() const {
  nlohmann::json j;
  j["trajectories"] = trajectories;
  j["frames_per_trajectory"] = frames_per_trajectory;
  j["future_steps"] = future_steps;
  j["visual_hz"] = visual_hz;
  j["tactile_hz"] = tactile_hz;
  j["mocap_hz"] = mocap_hz;
  j["body_radius_range"] = {body_radius_range[0], body_radius_range[1]};
  j["body_height_range"] = {body_height_range[0], body_height_range[1]};
  j["cap_radius_range"] = {cap_radius_range[0], cap_radius_range[1]};
  j["cap_height_range"] = {cap_height_range[0], cap_height_range[1]};
  j["tactile_threshold"] = tactile_threshold;
  j["camera_jitter"] = camera_jitter;
  return j.dump(2);
}

GeneratorConfig GeneratorConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed generator config: ") + e.what());
  }
  GeneratorConfig c;
  c.trajectories = j.value("trajectories", c.trajectories);
  c.frames_per_trajectory = j.value("frames_per_trajectory", c.frames_per_trajectory);
  c.future_steps = j.value("future_steps", c.future_steps);
  c.visual_hz = j.value("visual_hz", c.visual_hz);
  c.tactile_hz = j.value("tactile_hz", c.tactile_hz);
  c.mocap_hz = j.value("mocap_hz", c.mocap_hz);
  auto load_range = [&](const char* key, double out[2]) {
    if (j.contains(key)) {
      out[0] = j.at(key).at(0);
      out[1] = j.at(key).at(1);
    }
  };
  load_range("body_radius_range", c.body_radius_range);
  load_range("body_height_range", c.body_height_range);
  load_range("cap_radius_range", c.cap_radius_range);
  load_range("cap_height_range", c.cap_height_range);
  c.tactile_threshold = j.value("tactile_threshold", c.tactile_threshold);
  c.camera_jitter = j.value("camera_jitter", c.camera_jitter);
  c.validate();
  return c;
}

std::string GeneratorConfig::hash() const {
  Digest d;
  const std::string text = to_json();
  d.update(text.data(), text.size());
  return d.hex();
}

Dataset generate_synthetic_dataset(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Rng root(seed);

  const auto human_left = kin::human_hand_model(kin::Side::Left);
  const auto human_right = kin::human_hand_model(kin::Side::Right);
  const auto robot_left = kin::robot_hand_model(kin::Side::Left);
  const auto robot_right = kin::robot_hand_model(kin::Side::Right);

  Dataset ds;
  ds.future_steps = cfg.future_steps;
  ds.seed = seed;
  ds.config_hash = cfg.hash();

  std::vector<std::vector<Frame>> per_traj(static_cast<std::size_t>(cfg.trajectories));

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < cfg.trajectories; ++t) {
    Rng rng = root.child(static_cast<std::uint64_t>(t) + 1);

    TrajectoryScene scene;
    scene.sizes.body_radius = rng.uniform(cfg.body_radius_range[0], cfg.body_radius_range[1]);
    scene.sizes.body_height = rng.uniform(cfg.body_height_range[0], cfg.body_height_range[1]);
    scene.sizes.cap_radius =
        std::min(rng.uniform(cfg.cap_radius_range[0], cfg.cap_radius_range[1]),
                 0.8 * scene.sizes.body_radius);
    scene.sizes.cap_height = rng.uniform(cfg.cap_height_range[0], cfg.cap_height_range[1]);

    scene.bottle.p = Vec3(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01),
                          0.5 * scene.sizes.body_height);
    scene.bottle.q = quat_from_axis_angle(Vec3::UnitZ(), rng.uniform(0.0, kTwoPi));

    const double cap_top = scene.sizes.body_height + scene.sizes.cap_height;
    scene.right_wrist.p = Vec3(-(0.0811 + scene.sizes.cap_radius), 0.0, cap_top + 0.065);
    scene.left_wrist.q = quat_from_axis_angle(Vec3::UnitX(), -1.5707963267948966);

    scene.camera = env::Camera{};
    for (int i = 0; i < 3; ++i) {
      scene.camera.eye[i] += rng.uniform(-cfg.camera_jitter, cfg.camera_jitter);
      scene.camera.target[i] += rng.uniform(-cfg.camera_jitter, cfg.camera_jitter);
    }
    const env::Renderer renderer(scene.camera);
    const Pose camera_pose = camera_pose_from(scene.camera);

    const HandScript script_left = HandScript::sample(human_left, rng);
    const HandScript script_right = HandScript::sample(human_right, rng);
    const double duration = cfg.frames_per_trajectory / cfg.visual_hz;

    auto left_wrist_at = [&](double tau) {
      Pose w = scene.left_wrist;
      const double approach = smoothstep(tau / 0.4);
      w.p = Vec3(-0.078, scene.sizes.body_radius + 0.16 - 0.085 * approach,
                 0.5 * scene.sizes.body_height + 0.01);
      return w;
    };

    // Mocap stream: human joint angles of both hands plus the bottle pose.
    Stream mocap;
    mocap.period = 1.0 / cfg.mocap_hz;
    const int mocap_n = static_cast<int>(duration * cfg.mocap_hz) + 1;
    for (int i = 0; i < mocap_n; ++i) {
      StreamSample s;
      s.timestamp = i / cfg.mocap_hz + rng.uniform(0.0, 0.2) / cfg.mocap_hz;
      const double tau = std::min(1.0, s.timestamp / duration);
      const auto ql = scripted_angles(human_left, script_left, true, tau);
      const auto qr = scripted_angles(human_right, script_right, false, tau);
      s.payload.resize(human_left.n_dof + human_right.n_dof);
      s.payload.head(human_left.n_dof) = ql.values;
      s.payload.tail(human_right.n_dof) = qr.values;
      mocap.samples.push_back(std::move(s));
    }

    // Tactile stream: voltages decay with sensor-to-bottle distance.
    Stream tactile;
    tactile.period = 1.0 / cfg.tactile_hz;
    const int tactile_n = static_cast<int>(duration * cfg.tactile_hz) + 1;
    for (int i = 0; i < tactile_n; ++i) {
      StreamSample s;
      s.timestamp = i / cfg.tactile_hz + rng.uniform(0.0, 0.2) / cfg.tactile_hz;
      const double tau = std::min(1.0, s.timestamp / duration);
      s.payload.resize(40);
      int idx = 0;
      for (int side = 0; side < 2; ++side) {
        const auto& model = side == 0 ? human_left : human_right;
        const auto& script = side == 0 ? script_left : script_right;
        const Pose wrist = side == 0 ? left_wrist_at(tau) : scene.right_wrist;
        const auto q = scripted_angles(model, script, side == 0, tau);
        const auto fk = kin::forward_kinematics(model, q);
        for (int link : model.tactile_links) {
          const Vec3 p = wrist.apply(kin::link_pose(fk, link).p);
          // Distance to the body cylinder's lateral surface, coarse proxy.
          const Vec3 rel = p - scene.bottle.p;
          const double radial =
              std::hypot(rel.x(), rel.y()) - scene.sizes.body_radius;
          const double dist = std::max(0.0, radial);
          s.payload[idx++] = 0.75 * std::exp(-dist / 0.012) + rng.uniform(-0.03, 0.03);
        }
      }
      tactile.samples.push_back(std::move(s));
    }

    std::vector<double> visual_ts(static_cast<std::size_t>(cfg.frames_per_trajectory));
    for (int i = 0; i < cfg.frames_per_trajectory; ++i) {
      visual_ts[static_cast<std::size_t>(i)] =
          i / cfg.visual_hz + rng.uniform(0.0, 0.1) / cfg.visual_hz;
    }

    const auto aligned = align_streams(visual_ts, tactile, mocap);

    // Retarget per visual frame, warm-starting along the trajectory.
    std::vector<Frame> frames;
    frames.reserve(visual_ts.size());
    kin::JointAngles warm_left = kin::rest_pose(robot_left);
    kin::JointAngles warm_right = kin::rest_pose(robot_right);
    for (std::size_t i = 0; i < visual_ts.size(); ++i) {
      const auto& mocap_sample =
          mocap.samples[static_cast<std::size_t>(aligned[i].mocap_index)];
      kin::JointAngles human_l{mocap_sample.payload.head(human_left.n_dof)};
      kin::JointAngles human_r{mocap_sample.payload.tail(human_right.n_dof)};
      warm_left = retarget::retarget_frame(robot_left, human_left, human_l, warm_left, cfg.solver);
      warm_right =
          retarget::retarget_frame(robot_right, human_right, human_r, warm_right, cfg.solver);

      const auto& tac_sample =
          tactile.samples[static_cast<std::size_t>(aligned[i].tactile_index)];
      const auto bits = binarize_tactile(tac_sample.payload, cfg.tactile_threshold);

      const double tau = std::min(1.0, visual_ts[i] / duration);
      env::Scene render_scene;
      add_bottle_to_scene(render_scene, scene.bottle,
                          env::BottleSpec{scene.sizes.body_radius, scene.sizes.body_height,
                                          scene.sizes.cap_radius, scene.sizes.cap_height, 1.0},
                          0.0);
      auto fk_l = kin::forward_kinematics(robot_left, warm_left);
      const Pose wl = left_wrist_at(tau);
      for (auto& pose : fk_l) pose = wl * pose;
      add_hand_to_scene(render_scene, robot_left, fk_l, true);
      auto fk_r = kin::forward_kinematics(robot_right, warm_right);
      for (auto& pose : fk_r) pose = scene.right_wrist * pose;
      add_hand_to_scene(render_scene, robot_right, fk_r, false);

      Frame f;
      f.image = renderer.render(render_scene);
      f.tactile.assign(bits.begin(), bits.end());
      f.action.resize(48);
      for (int k = 0; k < 24; ++k) {
        f.action[static_cast<std::size_t>(k)] = static_cast<float>(warm_left.values[k]);
        f.action[static_cast<std::size_t>(24 + k)] = static_cast<float>(warm_right.values[k]);
      }
      f.object = make_object_label(scene.bottle, camera_pose, scene.sizes);
      f.timestamp = visual_ts[i];
      frames.push_back(std::move(f));
    }

    // Future-action windows; the last p frames have incomplete windows and
    // are dropped.
    const int p = cfg.future_steps;
    const int usable = cfg.frames_per_trajectory - p;
    std::vector<Frame> kept;
    kept.reserve(static_cast<std::size_t>(usable));
    for (int i = 0; i < usable; ++i) {
      Frame& f = frames[static_cast<std::size_t>(i)];
      f.future_actions.resize(static_cast<std::size_t>(p) * 48);
      for (int s = 0; s < p; ++s) {
        const Frame& src = frames[static_cast<std::size_t>(i + 1 + s)];
        std::copy(src.action.begin(), src.action.end(),
                  f.future_actions.begin() + static_cast<std::ptrdiff_t>(s) * 48);
      }
      kept.push_back(std::move(f));
    }
    per_traj[static_cast<std::size_t>(t)] = std::move(kept);
  }

  for (int t = 0; t < cfg.trajectories; ++t) {
    for (auto& f : per_traj[static_cast<std::size_t>(t)]) {
      ds.frames.push_back(std::move(f));
      ds.trajectory_ids.push_back(t);
    }
  }
  return ds;
}

}  // namespace bimanip::data
