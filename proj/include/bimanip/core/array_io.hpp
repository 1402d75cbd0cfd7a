#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bimanip {

// Shape-prefixed little-endian binary array file.
// Layout: magic "BMAR" | u32 dtype | u32 ndim | u64 dims[ndim] | payload.
// dtype codes: 1 = f32, 2 = f64, 3 = u8, 4 = i64.
enum class Dtype : std::uint32_t { F32 = 1, F64 = 2, U8 = 3, I64 = 4 };

struct ArrayShape {
  Dtype dtype;
  std::vector<std::uint64_t> dims;
  std::uint64_t count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

void write_array_f32(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const float* data);
void write_array_f64(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const double* data);
void write_array_u8(const std::string& path, const std::vector<std::uint64_t>& dims,
                    const std::uint8_t* data);
void write_array_i64(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const std::int64_t* data);

// Readers check the magic, dtype and that the payload size matches the header;
// a short file raises IntegrityError.
ArrayShape read_array_header(const std::string& path);
std::vector<float> read_array_f32(const std::string& path, ArrayShape* shape = nullptr);
std::vector<double> read_array_f64(const std::string& path, ArrayShape* shape = nullptr);
std::vector<std::uint8_t> read_array_u8(const std::string& path, ArrayShape* shape = nullptr);
std::vector<std::int64_t> read_array_i64(const std::string& path, ArrayShape* shape = nullptr);

}  // namespace bimanip
