#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace bshadow {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

struct Minimum {
  double argmin = 0.0;
  double value = 0.0;
};

/// Minimizes f on [lo, hi]: a uniform grid of `grid_points` locates the best
/// cell, then golden-section search refines inside the neighbouring cells
/// until the bracket is narrower than `tol`.
Minimum minimize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t grid_points = 1000, double tol = 1e-10);

}  // namespace bshadow
