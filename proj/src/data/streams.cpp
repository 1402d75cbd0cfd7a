#include "bimanip/data/streams.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bimanip/core/errors.hpp"

namespace bimanip::data {

int nearest_sample(const std::vector<StreamSample>& samples, double t) {
  const auto it = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const StreamSample& s, double v) { return s.timestamp < v; });
  if (it == samples.begin()) return 0;
  if (it == samples.end()) return static_cast<int>(samples.size()) - 1;
  const int hi = static_cast<int>(it - samples.begin());
  const int lo = hi - 1;
  const double d_lo = t - samples[static_cast<std::size_t>(lo)].timestamp;
  const double d_hi = samples[static_cast<std::size_t>(hi)].timestamp - t;
  // Tie goes to the earlier sample.
  return d_hi < d_lo ? hi : lo;
}

std::vector<AlignedFrame> align_streams(const std::vector<double>& visual_ts,
                                        const Stream& tactile, const Stream& mocap) {
  if (visual_ts.empty()) throw ValidationError("align_streams: no visual timestamps");
  auto check_stream = [](const Stream& s, const char* name) {
    if (s.samples.empty()) throw ValidationError(std::string("align_streams: empty ") + name);
    if (s.period <= 0) throw ValidationError(std::string("align_streams: bad period for ") + name);
    for (std::size_t i = 1; i < s.samples.size(); ++i) {
      if (!(s.samples[i].timestamp > s.samples[i - 1].timestamp)) {
        throw ValidationError(std::string("align_streams: non-increasing timestamps in ") + name);
      }
    }
  };
  check_stream(tactile, "tactile stream");
  check_stream(mocap, "mocap stream");

  std::vector<AlignedFrame> out(visual_ts.size());
  std::string uncovered_tactile, uncovered_mocap;
  for (std::size_t i = 0; i < visual_ts.size(); ++i) {
    const double t = visual_ts[i];
    const int ti = nearest_sample(tactile.samples, t);
    const int mi = nearest_sample(mocap.samples, t);
    if (std::abs(tactile.samples[static_cast<std::size_t>(ti)].timestamp - t) > tactile.period) {
      uncovered_tactile += (uncovered_tactile.empty() ? "" : ",") + std::to_string(i);
    }
    if (std::abs(mocap.samples[static_cast<std::size_t>(mi)].timestamp - t) > mocap.period) {
      uncovered_mocap += (uncovered_mocap.empty() ? "" : ",") + std::to_string(i);
    }
    out[i] = AlignedFrame{ti, mi};
  }
  if (!uncovered_tactile.empty() || !uncovered_mocap.empty()) {
    std::string msg = "align_streams: visual frames outside stream coverage:";
    if (!uncovered_tactile.empty()) msg += " tactile[" + uncovered_tactile + "]";
    if (!uncovered_mocap.empty()) msg += " mocap[" + uncovered_mocap + "]";
    throw CoverageError(msg);
  }
  return out;
}

std::vector<std::uint8_t> binarize_tactile(const Eigen::VectorXd& raw, double threshold) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(raw.size()));
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i])) {
      throw ValidationError("binarize_tactile: NaN at index " + std::to_string(i));
    }
    out[static_cast<std::size_t>(i)] = raw[i] > threshold ? 1 : 0;
  }
  return out;
}

}  // namespace bimanip::data
