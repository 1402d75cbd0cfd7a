#include "bimanip/nn/mlp.hpp"

#include <cmath>

#include "bimanip/core/errors.hpp"

namespace bimanip::nn {

Mlp::Mlp(ParamStore& store, const std::string& name, const std::vector<int>& dims) {
  if (dims.size() < 2) throw ConfigError("Mlp needs at least input and output dims");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    layers_.push_back(
        add_linear(store, name + ".fc" + std::to_string(i), dims[i], dims[i + 1]));
  }
}

Mat Mlp::forward(const ParamStore& s, const Mat& X, Cache* cache) const {
  Mat h = X;
  if (cache) {
    cache->inputs.clear();
    cache->activations.clear();
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (cache) cache->inputs.push_back(h);
    h = linear_fwd(s, layers_[i], h);
    if (i + 1 < layers_.size()) {
      h = h.array().tanh().matrix();
      if (cache) cache->activations.push_back(h);
    }
  }
  return h;
}

Mat Mlp::backward(const ParamStore& s, GradStore& g, const Cache& cache, const Mat& dY) const {
  Mat grad = dY;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 < layers_.size()) {
      // Through tanh: dy * (1 - tanh^2).
      const Mat& a = cache.activations[i];
      grad = (grad.array() * (1.0 - a.array().square())).matrix();
    }
    grad = linear_bwd(s, g, layers_[i], cache.inputs[i], grad);
  }
  return grad;
}

void Mlp::init(ParamStore& store, Rng& rng, double final_scale) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat& W = store.value(layers_[i].W);
    const double scale = (i + 1 == layers_.size() ? final_scale : 1.0) /
                         std::sqrt(static_cast<double>(W.rows()));
    for (Eigen::Index k = 0; k < W.size(); ++k) W.data()[k] = rng.normal(0.0, scale);
    store.value(layers_[i].b).setZero();
  }
}

}  // namespace bimanip::nn
