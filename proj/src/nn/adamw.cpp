#include "bimanip/nn/adamw.hpp"

#include <cmath>

namespace bimanip::nn {

AdamW::AdamW(const ParamStore& store, AdamWConfig cfg) : cfg_(cfg) {
  m_.reserve(static_cast<std::size_t>(store.size()));
  v_.reserve(static_cast<std::size_t>(store.size()));
  for (int i = 0; i < store.size(); ++i) {
    m_.emplace_back(Mat::Zero(store.value(i).rows(), store.value(i).cols()));
    v_.emplace_back(Mat::Zero(store.value(i).rows(), store.value(i).cols()));
  }
}

void AdamW::step(ParamStore& store, const GradStore& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (int i = 0; i < store.size(); ++i) {
    Mat& w = store.value(i);
    const Mat& g = grads.grad(i);
    Mat& m = m_[static_cast<std::size_t>(i)];
    Mat& v = v_[static_cast<std::size_t>(i)];
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v.array().matrix() + (1.0 - cfg_.beta2) * g.array().square().matrix();
    if (cfg_.weight_decay > 0 && store.entry(i).weight_decay) {
      w -= cfg_.lr * cfg_.weight_decay * w;
    }
    w.array() -= cfg_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
  }
}

}  // namespace bimanip::nn
