#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bimanip/core/rng.hpp"

namespace bimanip::nn {

using Mat = Eigen::MatrixXd;

// Flat registry of named parameter tensors. Layers hold indices into the
// store, which keeps per-sample gradient buffers cheap to create and makes
// serialization and optimizer state trivial to line up.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Mat value;
    bool weight_decay = false;
  };

  int add(const std::string& name, int rows, int cols, bool weight_decay = false);

  Mat& value(int i) { return entries_[static_cast<std::size_t>(i)].value; }
  const Mat& value(int i) const { return entries_[static_cast<std::size_t>(i)].value; }
  const Entry& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(entries_.size()); }
  std::size_t scalar_count() const;

  void init_normal(Rng& rng, double stddev);  // weights; vectors stay zero
  std::uint64_t digest() const;

  void save(const std::string& path) const;
  // Shapes and names must match the current layout.
  void load(const std::string& path);
  void save_stream(std::FILE* f) const;
  void load_stream(std::FILE* f, const std::string& what);

 private:
  std::vector<Entry> entries_;
};

// Gradient buffer aligned with a ParamStore; reduced serially in index order
// so parallel per-sample backward stays deterministic.
class GradStore {
 public:
  explicit GradStore(const ParamStore& store);

  Mat& grad(int i) { return grads_[static_cast<std::size_t>(i)]; }
  const Mat& grad(int i) const { return grads_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(grads_.size()); }

  void zero();
  void add(const GradStore& other);
  void scale(double s);
  double squared_norm() const;
  bool all_finite() const;

 private:
  std::vector<Mat> grads_;
};

}  // namespace bimanip::nn
