#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace bimanip {

// FNV-1a over raw bytes; used to fingerprint parameter blobs and configs.
class Digest {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ull;
    }
  }

  void update_f64(const double* data, std::size_t n) { update(data, n * sizeof(double)); }

  std::uint64_t value() const { return h_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    std::uint64_t v = h_;
    for (int i = 15; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = digits[v & 0xF];
      v >>= 4;
    }
    return s;
  }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ull;
};

}  // namespace bimanip
