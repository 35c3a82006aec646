#pragma once

#include <span>
#include <vector>

namespace chf {

/// Shape-preserving piecewise cubic Hermite interpolant.
///
/// Interior slopes are the weighted harmonic mean of the adjacent secants
/// (zero at local extrema), which keeps every slope inside the
/// Fritsch-Carlson monotonicity region. End slopes use the one-sided
/// three-point formula, limited so they never change sign against the first
/// secant and never exceed three times it when the data turns over. Two nodes
/// give the straight line.
class Pchip {
 public:
  /// Throws UnsortedNodes unless x is strictly increasing with >= 2 entries.
  Pchip(std::span<const double> x, std::span<const double> y);

  /// Throws OutOfSpan outside [x.front(), x.back()].
  double operator()(double query) const;
  double derivative(double query) const;

  double front() const noexcept { return x_.front(); }
  double back() const noexcept { return x_.back(); }
  const std::vector<double>& slopes() const noexcept { return d_; }

 private:
  std::size_t interval(double query) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace chf
