#include "bimanip/nn/params.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "bimanip/core/digest.hpp"
#include "bimanip/core/errors.hpp"

namespace bimanip::nn {

int ParamStore::add(const std::string& name, int rows, int cols, bool weight_decay) {
  Entry e;
  e.name = name;
  e.value = Mat::Zero(rows, cols);
  e.weight_decay = weight_decay;
  entries_.push_back(std::move(e));
  return static_cast<int>(entries_.size()) - 1;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::size_t>(e.value.size());
  return n;
}

void ParamStore::init_normal(Rng& rng, double stddev) {
  for (auto& e : entries_) {
    if (e.value.rows() == 1 || e.value.cols() == 1) continue;  // biases, tokens via callers
    for (Eigen::Index i = 0; i < e.value.size(); ++i) {
      e.value.data()[i] = rng.normal(0.0, stddev);
    }
  }
}

std::uint64_t ParamStore::digest() const {
  Digest d;
  for (const auto& e : entries_) {
    d.update(e.name.data(), e.name.size());
    d.update_f64(e.value.data(), static_cast<std::size_t>(e.value.size()));
  }
  return d.value();
}

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;
constexpr char kMagic[4] = {'B', 'M', 'P', 'S'};
}  // namespace

void ParamStore::save_stream(std::FILE* f) const {
  std::fwrite(kMagic, 1, 4, f);
  const std::uint32_t n = static_cast<std::uint32_t>(entries_.size());
  std::fwrite(&n, 4, 1, f);
  for (const auto& e : entries_) {
    const std::uint32_t len = static_cast<std::uint32_t>(e.name.size());
    std::fwrite(&len, 4, 1, f);
    std::fwrite(e.name.data(), 1, len, f);
    const std::uint64_t rows = static_cast<std::uint64_t>(e.value.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(e.value.cols());
    std::fwrite(&rows, 8, 1, f);
    std::fwrite(&cols, 8, 1, f);
    std::fwrite(e.value.data(), sizeof(double), static_cast<std::size_t>(e.value.size()), f);
  }
}

void ParamStore::load_stream(std::FILE* f, const std::string& what) {
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw IntegrityError("bad parameter blob magic: " + what);
  }
  std::uint32_t n = 0;
  if (std::fread(&n, 4, 1, f) != 1 || n != entries_.size()) {
    throw IntegrityError("parameter count mismatch: " + what);
  }
  for (auto& e : entries_) {
    std::uint32_t len = 0;
    if (std::fread(&len, 4, 1, f) != 1 || len > 4096) {
      throw IntegrityError("corrupt parameter name: " + what);
    }
    std::string name(len, '\0');
    if (std::fread(name.data(), 1, len, f) != len || name != e.name) {
      throw IntegrityError("parameter name mismatch (" + name + " vs " + e.name + ")");
    }
    std::uint64_t rows = 0, cols = 0;
    if (std::fread(&rows, 8, 1, f) != 1 || std::fread(&cols, 8, 1, f) != 1 ||
        rows != static_cast<std::uint64_t>(e.value.rows()) ||
        cols != static_cast<std::uint64_t>(e.value.cols())) {
      throw IntegrityError("parameter shape mismatch for " + e.name);
    }
    if (std::fread(e.value.data(), sizeof(double), static_cast<std::size_t>(e.value.size()),
                   f) != static_cast<std::size_t>(e.value.size())) {
      throw IntegrityError("parameter payload truncated: " + what);
    }
  }
}

void ParamStore::save(const std::string& path) const {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot write params: " + path);
  save_stream(f.get());
}

void ParamStore::load(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot read params: " + path);
  load_stream(f.get(), path);
}

GradStore::GradStore(const ParamStore& store) {
  grads_.reserve(static_cast<std::size_t>(store.size()));
  for (int i = 0; i < store.size(); ++i) {
    grads_.emplace_back(Mat::Zero(store.value(i).rows(), store.value(i).cols()));
  }
}

void GradStore::zero() {
  for (auto& g : grads_) g.setZero();
}

void GradStore::add(const GradStore& other) {
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
}

void GradStore::scale(double s) {
  for (auto& g : grads_) g *= s;
}

double GradStore::squared_norm() const {
  double sum = 0;
  for (const auto& g : grads_) sum += g.squaredNorm();
  return sum;
}

bool GradStore::all_finite() const {
  for (const auto& g : grads_) {
    if (!g.allFinite()) return false;
  }
  return true;
}

}  // namespace bimanip::nn
