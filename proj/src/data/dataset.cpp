#include "bimanip/data/dataset.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bimanip/core/array_io.hpp"
#include "bimanip/core/errors.hpp"

namespace bimanip::data {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kManifestVersion = 1;

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  const std::uint64_t n = ds.frames.size();
  const std::uint64_t p = static_cast<std::uint64_t>(ds.future_steps);

  std::vector<float> images(n * kImagePixels);
  std::vector<std::uint8_t> tactile(n * kTactileDims);
  std::vector<float> actions(n * kActionDims);
  std::vector<float> future(n * p * kActionDims);
  std::vector<float> objects(n * ObjectLabel::kDims);
  std::vector<double> timestamps(n);

  for (std::uint64_t i = 0; i < n; ++i) {
    const Frame& f = ds.frames[i];
    validate_frame(f, ds.future_steps);
    std::copy(f.image.begin(), f.image.end(), images.begin() + static_cast<std::ptrdiff_t>(i * kImagePixels));
    std::copy(f.tactile.begin(), f.tactile.end(), tactile.begin() + static_cast<std::ptrdiff_t>(i * kTactileDims));
    std::copy(f.action.begin(), f.action.end(), actions.begin() + static_cast<std::ptrdiff_t>(i * kActionDims));
    std::copy(f.future_actions.begin(), f.future_actions.end(),
              future.begin() + static_cast<std::ptrdiff_t>(i * p * kActionDims));
    double flat[ObjectLabel::kDims];
    f.object.to_flat(flat);
    for (int k = 0; k < ObjectLabel::kDims; ++k) {
      objects[i * ObjectLabel::kDims + static_cast<std::uint64_t>(k)] = static_cast<float>(flat[k]);
    }
    timestamps[i] = f.timestamp;
  }

  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  write_array_f32(path("images.bin"), {n, kImageSize, kImageSize, kImageChannels}, images.data());
  write_array_u8(path("tactile.bin"), {n, kTactileDims}, tactile.data());
  write_array_f32(path("actions.bin"), {n, kActionDims}, actions.data());
  write_array_f32(path("future_actions.bin"), {n, p, kActionDims}, future.data());
  write_array_f32(path("objects.bin"), {n, ObjectLabel::kDims}, objects.data());
  write_array_f64(path("timestamps.bin"), {n}, timestamps.data());
  write_array_i64(path("trajectories.bin"), {n}, ds.trajectory_ids.data());

  json manifest;
  manifest["version"] = kManifestVersion;
  manifest["frame_count"] = n;
  manifest["future_steps"] = ds.future_steps;
  manifest["seed"] = ds.seed;
  manifest["config_hash"] = ds.config_hash;
  manifest["arrays"] = {
      {"images", {{"file", "images.bin"}, {"dtype", "f32"}, {"shape", {n, kImageSize, kImageSize, kImageChannels}}}},
      {"tactile", {{"file", "tactile.bin"}, {"dtype", "u8"}, {"shape", {n, kTactileDims}}}},
      {"actions", {{"file", "actions.bin"}, {"dtype", "f32"}, {"shape", {n, kActionDims}}}},
      {"future_actions", {{"file", "future_actions.bin"}, {"dtype", "f32"}, {"shape", {n, p, kActionDims}}}},
      {"objects", {{"file", "objects.bin"}, {"dtype", "f32"}, {"shape", {n, ObjectLabel::kDims}}}},
      {"timestamps", {{"file", "timestamps.bin"}, {"dtype", "f64"}, {"shape", {n}}}},
      {"trajectories", {{"file", "trajectories.bin"}, {"dtype", "i64"}, {"shape", {n}}}},
  };
  std::ofstream out(path("manifest.json"));
  if (!out) throw IoError("cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
  const auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  std::ifstream in(path("manifest.json"));
  if (!in) throw IoError("no manifest.json in " + dir);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed manifest: ") + e.what());
  }

  Dataset ds;
  const std::uint64_t n = manifest.at("frame_count").get<std::uint64_t>();
  ds.future_steps = manifest.at("future_steps").get<int>();
  ds.seed = manifest.at("seed").get<std::uint64_t>();
  ds.config_hash = manifest.value("config_hash", "");
  const std::uint64_t p = static_cast<std::uint64_t>(ds.future_steps);

  auto expect_shape = [&](const ArrayShape& s, std::vector<std::uint64_t> want,
                          const char* name) {
    if (s.dims != want) {
      throw IntegrityError(std::string("array shape mismatch vs manifest for ") + name);
    }
  };

  ArrayShape shape;
  const auto images = read_array_f32(path("images.bin"), &shape);
  expect_shape(shape, {n, kImageSize, kImageSize, kImageChannels}, "images");
  const auto tactile = read_array_u8(path("tactile.bin"), &shape);
  expect_shape(shape, {n, kTactileDims}, "tactile");
  const auto actions = read_array_f32(path("actions.bin"), &shape);
  expect_shape(shape, {n, kActionDims}, "actions");
  const auto future = read_array_f32(path("future_actions.bin"), &shape);
  expect_shape(shape, {n, p, kActionDims}, "future_actions");
  const auto objects = read_array_f32(path("objects.bin"), &shape);
  expect_shape(shape, {n, ObjectLabel::kDims}, "objects");
  const auto timestamps = read_array_f64(path("timestamps.bin"), &shape);
  expect_shape(shape, {n}, "timestamps");
  ds.trajectory_ids = read_array_i64(path("trajectories.bin"), &shape);
  expect_shape(shape, {n}, "trajectories");

  ds.frames.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Frame& f = ds.frames[i];
    f.image.assign(images.begin() + static_cast<std::ptrdiff_t>(i * kImagePixels),
                   images.begin() + static_cast<std::ptrdiff_t>((i + 1) * kImagePixels));
    f.tactile.assign(tactile.begin() + static_cast<std::ptrdiff_t>(i * kTactileDims),
                     tactile.begin() + static_cast<std::ptrdiff_t>((i + 1) * kTactileDims));
    f.action.assign(actions.begin() + static_cast<std::ptrdiff_t>(i * kActionDims),
                    actions.begin() + static_cast<std::ptrdiff_t>((i + 1) * kActionDims));
    f.future_actions.assign(
        future.begin() + static_cast<std::ptrdiff_t>(i * p * kActionDims),
        future.begin() + static_cast<std::ptrdiff_t>((i + 1) * p * kActionDims));
    double flat[ObjectLabel::kDims];
    for (int k = 0; k < ObjectLabel::kDims; ++k) {
      flat[k] = objects[i * ObjectLabel::kDims + static_cast<std::uint64_t>(k)];
    }
    f.object = ObjectLabel::from_flat(flat);
    f.timestamp = timestamps[i];
  }
  return ds;
}

}  // namespace bimanip::data
