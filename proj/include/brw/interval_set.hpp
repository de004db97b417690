#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace brw {

/// Finite union of pairwise disjoint closed intervals [a_i, b_i], kept sorted.
/// Endpoints may be infinite (e.g. (-inf, t]).
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Throws ConfigError on a_i > b_i or overlapping intervals.
  explicit IntervalSet(std::vector<std::pair<double, double>> intervals);

  static IntervalSet half_line(double t) {
    return IntervalSet({{-std::numeric_limits<double>::infinity(), t}});
  }
  static IntervalSet real_line() {
    return IntervalSet({{-std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity()}});
  }

  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool contains(double x) const;
  IntervalSet shifted(double by) const;
  /// "a1:b1;a2:b2" with 17 significant digits.
  std::string serialize() const;
  static IntervalSet parse(const std::string& text);

 private:
  std::vector<std::pair<double, double>> intervals_;
};

}  // namespace brw
