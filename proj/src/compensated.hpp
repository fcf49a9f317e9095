#pragma once

#include <cmath>

namespace mddl::detail {

/// Double-double accumulator (Knuth two-sum / fma two-product). The running
/// value is hi + lo with ~106 bits of precision.
class DoubleDouble {
 public:
  void add(double v) {
    const double s = hi_ + v;
    const double bp = s - hi_;
    const double err = (hi_ - (s - bp)) + (v - bp);
    hi_ = s;
    lo_ += err;
  }

  /// Adds a * b exactly (up to the final rounding of value()).
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    lo_ += std::fma(a, b, -p);
  }

  double value() const { return hi_ + lo_; }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

}  // namespace mddl::detail
