#pragma once

#include <deque>
#include <optional>

namespace bimanip::rl {

// Last-N episode outcomes for one environment; the running success rate is
// their mean. Empty buffer -> no rate yet.
class SuccessTracker {
 public:
  explicit SuccessTracker(int window = 10) : window_(window) {}

  void push(int outcome) {
    buffer_.push_back(outcome != 0 ? 1 : 0);
    while (static_cast<int>(buffer_.size()) > window_) buffer_.pop_front();
  }

  std::optional<double> rate() const {
    if (buffer_.empty()) return std::nullopt;
    double sum = 0;
    for (int v : buffer_) sum += v;
    return sum / static_cast<double>(buffer_.size());
  }

  int count() const { return static_cast<int>(buffer_.size()); }

 private:
  int window_;
  std::deque<int> buffer_;
};

}  // namespace bimanip::rl
