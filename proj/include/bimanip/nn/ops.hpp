#pragma once

#include <vector>

#include "bimanip/nn/params.hpp"

namespace bimanip::nn {

// Functional transformer building blocks. Rows of every activation matrix are
// tokens (or batch items); forward fills the cache, backward consumes it and
// accumulates parameter gradients. Passing a null cache runs inference only.

struct LinearRef {
  int W = -1;  // (in x out)
  int b = -1;  // (1 x out)
};

LinearRef add_linear(ParamStore& store, const std::string& name, int in, int out);
Mat linear_fwd(const ParamStore& s, const LinearRef& ref, const Mat& X);
// Returns dX; X must be the forward input.
Mat linear_bwd(const ParamStore& s, GradStore& g, const LinearRef& ref, const Mat& X,
               const Mat& dY);

struct LayerNormRef {
  int gamma = -1;
  int beta = -1;
};

struct LayerNormCache {
  Mat xhat;
  Eigen::VectorXd inv_std;
};

LayerNormRef add_layernorm(ParamStore& store, const std::string& name, int dim);
Mat layernorm_fwd(const ParamStore& s, const LayerNormRef& ref, const Mat& X,
                  LayerNormCache* cache);
Mat layernorm_bwd(const ParamStore& s, GradStore& g, const LayerNormRef& ref,
                  const LayerNormCache& cache, const Mat& dY);

Mat gelu_fwd(const Mat& X);
Mat gelu_bwd(const Mat& X, const Mat& dY);  // X is the pre-activation

struct AttentionRef {
  LinearRef q, k, v, o;
};

struct AttentionCache {
  Mat xn;                  // attention input
  Mat q, k, v;             // projections
  std::vector<Mat> probs;  // per-head softmax
  Mat concat;              // pre-output-projection
};

AttentionRef add_attention(ParamStore& store, const std::string& name, int dim);
Mat attention_fwd(const ParamStore& s, const AttentionRef& ref, int heads, const Mat& X,
                  AttentionCache* cache);
Mat attention_bwd(const ParamStore& s, GradStore& g, const AttentionRef& ref, int heads,
                  const AttentionCache& cache, const Mat& dY);

// Pre-LN transformer block: x + Attn(LN1(x)), then x + MLP(LN2(x)) with a
// 4x hidden GELU MLP.
struct BlockRef {
  LayerNormRef ln1, ln2;
  AttentionRef attn;
  LinearRef fc1, fc2;
};

struct BlockCache {
  LayerNormCache ln1c, ln2c;
  AttentionCache attnc;
  Mat xn2;     // LN2 output (fc1 input)
  Mat h_pre;   // fc1 output (pre-GELU)
  Mat h_act;   // GELU output (fc2 input)
};

BlockRef add_block(ParamStore& store, const std::string& name, int dim);
Mat block_fwd(const ParamStore& s, const BlockRef& ref, int heads, const Mat& X,
              BlockCache* cache);
Mat block_bwd(const ParamStore& s, GradStore& g, const BlockRef& ref, int heads,
              const BlockCache& cache, const Mat& dY);

}  // namespace bimanip::nn
