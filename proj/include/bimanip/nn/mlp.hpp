#pragma once

#include <string>
#include <vector>

#include "bimanip/nn/ops.hpp"

namespace bimanip::nn {

// Small fully connected net with tanh hidden activations and a linear output,
// used for the RL policy and value heads. Rows are batch items.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& name, const std::vector<int>& dims);

  struct Cache {
    std::vector<Mat> inputs;       // input of each layer
    std::vector<Mat> activations;  // tanh outputs (hidden layers only)
  };

  Mat forward(const ParamStore& s, const Mat& X, Cache* cache = nullptr) const;
  // Returns dX.
  Mat backward(const ParamStore& s, GradStore& g, const Cache& cache, const Mat& dY) const;

  // Scaled orthogonal-ish init: normal / sqrt(fan_in), final layer downscaled.
  void init(ParamStore& store, Rng& rng, double final_scale = 0.01) const;

 private:
  std::vector<LinearRef> layers_;
};

}  // namespace bimanip::nn
