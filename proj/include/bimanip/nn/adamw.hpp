#pragma once

#include <vector>

#include "bimanip/nn/params.hpp"

namespace bimanip::nn {

struct AdamWConfig {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled; applied only to flagged params
};

class AdamW {
 public:
  AdamW(const ParamStore& store, AdamWConfig cfg);

  void step(ParamStore& store, const GradStore& grads);
  int step_count() const { return t_; }
  AdamWConfig& config() { return cfg_; }

 private:
  AdamWConfig cfg_;
  int t_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

}  // namespace bimanip::nn
