#include "bimanip/rl/policy.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include <json.hpp>

#include "bimanip/core/errors.hpp"

namespace bimanip::rl {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr char kMagic[4] = {'B', 'M', 'P', 'C'};
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

std::string PolicyConfig::to_json() const {
  nlohmann::json j;
  j["feature_dim"] = feature_dim;
  j["proprio_dim"] = proprio_dim;
  j["phi_dim"] = phi_dim;
  j["hidden"] = hidden;
  j["action_dim"] = action_dim;
  j["init_log_std"] = init_log_std;
  return j.dump();
}

PolicyConfig PolicyConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed policy config: ") + e.what());
  }
  PolicyConfig c;
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.proprio_dim = j.value("proprio_dim", c.proprio_dim);
  c.phi_dim = j.value("phi_dim", c.phi_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.action_dim = j.value("action_dim", c.action_dim);
  c.init_log_std = j.value("init_log_std", c.init_log_std);
  return c;
}

ActorCritic::ActorCritic(PolicyConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  actor_phi_ = nn::add_linear(store_, "actor.phi", cfg_.proprio_dim, cfg_.phi_dim);
  critic_phi_ = nn::add_linear(store_, "critic.phi", cfg_.proprio_dim, cfg_.phi_dim);
  std::vector<int> actor_dims = {cfg_.feature_dim + cfg_.phi_dim};
  actor_dims.insert(actor_dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  actor_dims.push_back(cfg_.action_dim);
  actor_ = nn::Mlp(store_, "actor.mlp", actor_dims);
  std::vector<int> critic_dims = {cfg_.feature_dim + cfg_.phi_dim};
  critic_dims.insert(critic_dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  critic_dims.push_back(1);
  critic_ = nn::Mlp(store_, "critic.mlp", critic_dims);
  log_std_ = store_.add("actor.log_std", 1, cfg_.action_dim);
  store_.value(log_std_).setConstant(cfg_.init_log_std);

  Rng rng(seed);
  actor_.init(store_, rng, 0.01);
  critic_.init(store_, rng, 1.0);
  auto init_phi = [&](const nn::LinearRef& ref) {
    Mat& W = store_.value(ref.W);
    const double s = 1.0 / std::sqrt(static_cast<double>(W.rows()));
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = rng.normal(0.0, s);
  };
  init_phi(actor_phi_);
  init_phi(critic_phi_);
}

Mat ActorCritic::forward(const Mat& obs, Eigen::VectorXd* values, Cache* cache) const {
  if (obs.cols() != cfg_.feature_dim + cfg_.proprio_dim) {
    throw DimensionError("policy forward: observation width mismatch");
  }
  const Mat features = obs.leftCols(cfg_.feature_dim);
  const Mat proprio = obs.rightCols(cfg_.proprio_dim);

  Mat actor_in(obs.rows(), cfg_.feature_dim + cfg_.phi_dim);
  actor_in.leftCols(cfg_.feature_dim) = features;
  actor_in.rightCols(cfg_.phi_dim) = nn::linear_fwd(store_, actor_phi_, proprio);
  Mat critic_in(obs.rows(), cfg_.feature_dim + cfg_.phi_dim);
  critic_in.leftCols(cfg_.feature_dim) = features;
  critic_in.rightCols(cfg_.phi_dim) = nn::linear_fwd(store_, critic_phi_, proprio);

  Mat means = actor_.forward(store_, actor_in, cache ? &cache->actor_mlp : nullptr);
  const Mat v = critic_.forward(store_, critic_in, cache ? &cache->critic_mlp : nullptr);
  if (values) *values = v.col(0);
  if (cache) {
    cache->proprio = proprio;
    cache->actor_in = std::move(actor_in);
    cache->critic_in = std::move(critic_in);
  }
  return means;
}

Eigen::VectorXd ActorCritic::log_prob(const Mat& means, const Mat& actions) const {
  const Eigen::VectorXd s = log_std();
  Eigen::VectorXd out(means.rows());
  for (Eigen::Index r = 0; r < means.rows(); ++r) {
    double lp = 0;
    for (Eigen::Index j = 0; j < means.cols(); ++j) {
      const double z = (actions(r, j) - means(r, j)) * std::exp(-s[j]);
      lp += -0.5 * z * z - s[j] - 0.5 * kLog2Pi;
    }
    out[r] = lp;
  }
  return out;
}

double ActorCritic::entropy() const {
  const Eigen::VectorXd s = log_std();
  double e = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) e += s[j] + 0.5 * (1.0 + kLog2Pi);
  return e;
}

void ActorCritic::backward(nn::GradStore& grads, const Cache& cache, const Mat& d_means,
                           const Eigen::VectorXd& d_values,
                           const Eigen::VectorXd& d_log_std) const {
  const Mat d_actor_in = actor_.backward(store_, grads, cache.actor_mlp, d_means);
  nn::linear_bwd(store_, grads, actor_phi_, cache.proprio,
                 d_actor_in.rightCols(cfg_.phi_dim));
  Mat dv(d_values.size(), 1);
  dv.col(0) = d_values;
  const Mat d_critic_in = critic_.backward(store_, grads, cache.critic_mlp, dv);
  nn::linear_bwd(store_, grads, critic_phi_, cache.proprio,
                 d_critic_in.rightCols(cfg_.phi_dim));
  grads.grad(log_std_).row(0) += d_log_std.transpose();
}

void ActorCritic::save(const std::string& path, const std::string& extra_json) const {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(cfg_.to_json());
  j["extra"] = nlohmann::json::parse(extra_json);
  const std::string header = j.dump();
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot write policy checkpoint: " + path);
  std::fwrite(kMagic, 1, 4, f.get());
  const std::uint64_t len = header.size();
  std::fwrite(&len, 8, 1, f.get());
  std::fwrite(header.data(), 1, header.size(), f.get());
  store_.save_stream(f.get());
}

std::unique_ptr<ActorCritic> ActorCritic::load(const std::string& path,
                                               std::string* extra_json) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open policy checkpoint: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw IntegrityError("bad policy checkpoint magic: " + path);
  }
  std::uint64_t len = 0;
  if (std::fread(&len, 8, 1, f.get()) != 1 || len > (1ull << 26)) {
    throw IntegrityError("corrupt policy checkpoint header: " + path);
  }
  std::string header(len, '\0');
  if (std::fread(header.data(), 1, len, f.get()) != len) {
    throw IntegrityError("policy checkpoint header truncated: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("malformed policy header: ") + e.what());
  }
  auto policy = std::make_unique<ActorCritic>(PolicyConfig::from_json(j.at("config").dump()), 0);
  policy->store_.load_stream(f.get(), path);
  if (extra_json) *extra_json = j.value("extra", nlohmann::json::object()).dump();
  return policy;
}

}  // namespace bimanip::rl
