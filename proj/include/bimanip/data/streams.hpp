#pragma once

#include <vector>

#include <Eigen/Dense>

namespace bimanip::data {

struct StreamSample {
  double timestamp = 0.0;
  Eigen::VectorXd payload;
};

// Timestamped samples at a nominal rate; timestamps must strictly increase.
struct Stream {
  std::vector<StreamSample> samples;
  double period = 0.0;  // nominal seconds between samples
};

struct AlignedFrame {
  int tactile_index = 0;
  int mocap_index = 0;
};

// For each visual timestamp, picks the nearest sample (ties -> earlier) from
// the tactile and mocap streams. Throws CoverageError (listing frame indices)
// if any visual timestamp is farther than one period from a stream.
std::vector<AlignedFrame> align_streams(const std::vector<double>& visual_ts,
                                        const Stream& tactile, const Stream& mocap);

// Nearest index within a single stream; exposed for reuse and testing.
int nearest_sample(const std::vector<StreamSample>& samples, double t);

// 1 if voltage > threshold (strict), else 0. NaN input -> ValidationError.
std::vector<std::uint8_t> binarize_tactile(const Eigen::VectorXd& raw, double threshold = 0.4);

}  // namespace bimanip::data
