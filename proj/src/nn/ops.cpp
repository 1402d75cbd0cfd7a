#include "bimanip/nn/ops.hpp"

#include <cmath>

namespace bimanip::nn {

namespace {
constexpr double kLnEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

LinearRef add_linear(ParamStore& store, const std::string& name, int in, int out) {
  LinearRef ref;
  ref.W = store.add(name + ".W", in, out, /*weight_decay=*/true);
  ref.b = store.add(name + ".b", 1, out);
  return ref;
}

Mat linear_fwd(const ParamStore& s, const LinearRef& ref, const Mat& X) {
  Mat y = X * s.value(ref.W);
  y.rowwise() += s.value(ref.b).row(0);
  return y;
}

Mat linear_bwd(const ParamStore& s, GradStore& g, const LinearRef& ref, const Mat& X,
               const Mat& dY) {
  g.grad(ref.W).noalias() += X.transpose() * dY;
  g.grad(ref.b).row(0) += dY.colwise().sum();
  return dY * s.value(ref.W).transpose();
}

LayerNormRef add_layernorm(ParamStore& store, const std::string& name, int dim) {
  LayerNormRef ref;
  ref.gamma = store.add(name + ".gamma", 1, dim);
  ref.beta = store.add(name + ".beta", 1, dim);
  store.value(ref.gamma).setOnes();
  return ref;
}

Mat layernorm_fwd(const ParamStore& s, const LayerNormRef& ref, const Mat& X,
                  LayerNormCache* cache) {
  const Eigen::Index rows = X.rows(), cols = X.cols();
  Mat xhat(rows, cols);
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = X.row(r).mean();
    const double var = (X.row(r).array() - mean).square().mean();
    const double is = 1.0 / std::sqrt(var + kLnEps);
    xhat.row(r) = (X.row(r).array() - mean) * is;
    inv_std[r] = is;
  }
  Mat y = xhat.array().rowwise() * s.value(ref.gamma).row(0).array();
  y.rowwise() += s.value(ref.beta).row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Mat layernorm_bwd(const ParamStore& s, GradStore& g, const LayerNormRef& ref,
                  const LayerNormCache& cache, const Mat& dY) {
  const Mat& xhat = cache.xhat;
  g.grad(ref.gamma).row(0) += (dY.array() * xhat.array()).colwise().sum().matrix();
  g.grad(ref.beta).row(0) += dY.colwise().sum();

  const Mat dyh = dY.array().rowwise() * s.value(ref.gamma).row(0).array();
  Mat dX(dY.rows(), dY.cols());
  for (Eigen::Index r = 0; r < dY.rows(); ++r) {
    const double m1 = dyh.row(r).mean();
    const double m2 = (dyh.row(r).array() * xhat.row(r).array()).mean();
    dX.row(r) =
        ((dyh.row(r).array() - m1) - xhat.row(r).array() * m2) * cache.inv_std[r];
  }
  return dX;
}

Mat gelu_fwd(const Mat& X) {
  return X.unaryExpr([](double x) { return x * 0.5 * (1.0 + std::erf(x * kInvSqrt2)); });
}

Mat gelu_bwd(const Mat& X, const Mat& dY) {
  Mat dX(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    const double x = X.data()[i];
    const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    dX.data()[i] = dY.data()[i] * (cdf + x * pdf);
  }
  return dX;
}

AttentionRef add_attention(ParamStore& store, const std::string& name, int dim) {
  AttentionRef ref;
  ref.q = add_linear(store, name + ".q", dim, dim);
  ref.k = add_linear(store, name + ".k", dim, dim);
  ref.v = add_linear(store, name + ".v", dim, dim);
  ref.o = add_linear(store, name + ".o", dim, dim);
  return ref;
}

Mat attention_fwd(const ParamStore& s, const AttentionRef& ref, int heads, const Mat& X,
                  AttentionCache* cache) {
  const Eigen::Index T = X.rows();
  const Eigen::Index D = X.cols();
  const Eigen::Index dh = D / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Mat q = linear_fwd(s, ref.q, X);
  Mat k = linear_fwd(s, ref.k, X);
  Mat v = linear_fwd(s, ref.v, X);
  Mat concat(T, D);
  std::vector<Mat> probs(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const auto qh = q.middleCols(h * dh, dh);
    const auto kh = k.middleCols(h * dh, dh);
    const auto vh = v.middleCols(h * dh, dh);
    Mat scores = qh * kh.transpose() * scale;
    for (Eigen::Index r = 0; r < T; ++r) {
      const double mx = scores.row(r).maxCoeff();
      scores.row(r) = (scores.row(r).array() - mx).exp();
      scores.row(r) /= scores.row(r).sum();
    }
    concat.middleCols(h * dh, dh).noalias() = scores * vh;
    probs[static_cast<std::size_t>(h)] = std::move(scores);
  }
  Mat out = linear_fwd(s, ref.o, concat);
  if (cache) {
    cache->xn = X;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->probs = std::move(probs);
    cache->concat = std::move(concat);
  }
  return out;
}

Mat attention_bwd(const ParamStore& s, GradStore& g, const AttentionRef& ref, int heads,
                  const AttentionCache& cache, const Mat& dY) {
  const Eigen::Index D = dY.cols();
  const Eigen::Index dh = D / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const Mat dConcat = linear_bwd(s, g, ref.o, cache.concat, dY);
  Mat dq(dY.rows(), D), dk(dY.rows(), D), dv(dY.rows(), D);
  for (int h = 0; h < heads; ++h) {
    const Mat& P = cache.probs[static_cast<std::size_t>(h)];
    const auto qh = cache.q.middleCols(h * dh, dh);
    const auto kh = cache.k.middleCols(h * dh, dh);
    const auto vh = cache.v.middleCols(h * dh, dh);
    const auto dOh = dConcat.middleCols(h * dh, dh);

    Mat dP = dOh * vh.transpose();
    dv.middleCols(h * dh, dh).noalias() = P.transpose() * dOh;
    // Row-wise softmax backward.
    const Eigen::VectorXd rowdot = (dP.array() * P.array()).rowwise().sum();
    Mat dS = (P.array() * (dP.array().colwise() - rowdot.array())).matrix() * scale;
    dq.middleCols(h * dh, dh).noalias() = dS * kh;
    dk.middleCols(h * dh, dh).noalias() = dS.transpose() * qh;
  }
  Mat dX = linear_bwd(s, g, ref.q, cache.xn, dq);
  dX += linear_bwd(s, g, ref.k, cache.xn, dk);
  dX += linear_bwd(s, g, ref.v, cache.xn, dv);
  return dX;
}

BlockRef add_block(ParamStore& store, const std::string& name, int dim) {
  BlockRef ref;
  ref.ln1 = add_layernorm(store, name + ".ln1", dim);
  ref.attn = add_attention(store, name + ".attn", dim);
  ref.ln2 = add_layernorm(store, name + ".ln2", dim);
  ref.fc1 = add_linear(store, name + ".fc1", dim, 4 * dim);
  ref.fc2 = add_linear(store, name + ".fc2", 4 * dim, dim);
  return ref;
}

Mat block_fwd(const ParamStore& s, const BlockRef& ref, int heads, const Mat& X,
              BlockCache* cache) {
  Mat xn1 = layernorm_fwd(s, ref.ln1, X, cache ? &cache->ln1c : nullptr);
  Mat x1 = X + attention_fwd(s, ref.attn, heads, xn1, cache ? &cache->attnc : nullptr);
  Mat xn2 = layernorm_fwd(s, ref.ln2, x1, cache ? &cache->ln2c : nullptr);
  Mat h_pre = linear_fwd(s, ref.fc1, xn2);
  Mat h_act = gelu_fwd(h_pre);
  Mat out = x1 + linear_fwd(s, ref.fc2, h_act);
  if (cache) {
    cache->xn2 = std::move(xn2);
    cache->h_pre = std::move(h_pre);
    cache->h_act = std::move(h_act);
  }
  return out;
}

Mat block_bwd(const ParamStore& s, GradStore& g, const BlockRef& ref, int heads,
              const BlockCache& cache, const Mat& dY) {
  Mat dh_act = linear_bwd(s, g, ref.fc2, cache.h_act, dY);
  Mat dh_pre = gelu_bwd(cache.h_pre, dh_act);
  Mat dxn2 = linear_bwd(s, g, ref.fc1, cache.xn2, dh_pre);
  Mat dx1 = dY + layernorm_bwd(s, g, ref.ln2, cache.ln2c, dxn2);
  Mat dxn1 = attention_bwd(s, g, ref.attn, heads, cache.attnc, dx1);
  return dx1 + layernorm_bwd(s, g, ref.ln1, cache.ln1c, dxn1);
}

}  // namespace bimanip::nn
