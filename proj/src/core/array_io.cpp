#include "bimanip/core/array_io.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "bimanip/core/errors.hpp"

namespace bimanip {

namespace {

constexpr char kMagic[4] = {'B', 'M', 'A', 'R'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

std::size_t dtype_size(Dtype t) {
  switch (t) {
    case Dtype::F32: return 4;
    case Dtype::F64: return 8;
    case Dtype::U8: return 1;
    case Dtype::I64: return 8;
  }
  throw IoError("unknown dtype code");
}

void write_array(const std::string& path, Dtype dtype,
                 const std::vector<std::uint64_t>& dims, const void* data) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fwrite(kMagic, 1, 4, f.get());
  const std::uint32_t code = static_cast<std::uint32_t>(dtype);
  const std::uint32_t ndim = static_cast<std::uint32_t>(dims.size());
  std::fwrite(&code, 4, 1, f.get());
  std::fwrite(&ndim, 4, 1, f.get());
  std::uint64_t count = 1;
  for (auto d : dims) {
    std::fwrite(&d, 8, 1, f.get());
    count *= d;
  }
  const std::size_t bytes = count * dtype_size(dtype);
  if (bytes > 0 && std::fwrite(data, 1, bytes, f.get()) != bytes) {
    throw IoError("short write: " + path);
  }
}

ArrayShape read_header(std::FILE* f, const std::string& path) {
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw IntegrityError("bad array magic: " + path);
  }
  std::uint32_t code = 0, ndim = 0;
  if (std::fread(&code, 4, 1, f) != 1 || std::fread(&ndim, 4, 1, f) != 1) {
    throw IntegrityError("truncated array header: " + path);
  }
  if (code < 1 || code > 4) throw IntegrityError("bad dtype code: " + path);
  if (ndim > 16) throw IntegrityError("implausible ndim: " + path);
  ArrayShape s;
  s.dtype = static_cast<Dtype>(code);
  s.dims.resize(ndim);
  for (auto& d : s.dims) {
    if (std::fread(&d, 8, 1, f) != 1) throw IntegrityError("truncated dims: " + path);
  }
  return s;
}

template <typename T>
std::vector<T> read_array(const std::string& path, Dtype expect, ArrayShape* out) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open: " + path);
  ArrayShape s = read_header(f.get(), path);
  if (s.dtype != expect) throw IntegrityError("dtype mismatch: " + path);
  std::vector<T> data(s.count());
  if (!data.empty() &&
      std::fread(data.data(), sizeof(T), data.size(), f.get()) != data.size()) {
    throw IntegrityError("array payload truncated: " + path);
  }
  // Trailing bytes also indicate corruption.
  char extra;
  if (std::fread(&extra, 1, 1, f.get()) == 1) {
    throw IntegrityError("array payload longer than header claims: " + path);
  }
  if (out) *out = s;
  return data;
}

}  // namespace

void write_array_f32(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const float* data) {
  write_array(path, Dtype::F32, dims, data);
}
void write_array_f64(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const double* data) {
  write_array(path, Dtype::F64, dims, data);
}
void write_array_u8(const std::string& path, const std::vector<std::uint64_t>& dims,
                    const std::uint8_t* data) {
  write_array(path, Dtype::U8, dims, data);
}
void write_array_i64(const std::string& path, const std::vector<std::uint64_t>& dims,
                     const std::int64_t* data) {
  write_array(path, Dtype::I64, dims, data);
}

ArrayShape read_array_header(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open: " + path);
  return read_header(f.get(), path);
}

std::vector<float> read_array_f32(const std::string& path, ArrayShape* shape) {
  return read_array<float>(path, Dtype::F32, shape);
}
std::vector<double> read_array_f64(const std::string& path, ArrayShape* shape) {
  return read_array<double>(path, Dtype::F64, shape);
}
std::vector<std::uint8_t> read_array_u8(const std::string& path, ArrayShape* shape) {
  return read_array<std::uint8_t>(path, Dtype::U8, shape);
}
std::vector<std::int64_t> read_array_i64(const std::string& path, ArrayShape* shape) {
  return read_array<std::int64_t>(path, Dtype::I64, shape);
}

}  // namespace bimanip
