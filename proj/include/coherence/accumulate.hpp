#pragma once

#include <cmath>

namespace coherence {

/// Neumaier-compensated accumulator. All entrywise sums over matrix
/// elements go through this so that reports at d = 16 stay stable to
/// ~1e-13 regardless of summation order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace coherence
