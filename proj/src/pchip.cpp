#include "chf/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chf/errors.hpp"

namespace chf {
namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double end_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (sign(d) != sign(m0)) {
    d = 0.0;
  } else if (sign(m0) != sign(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
    d = 3.0 * m0;
  }
  return d;
}

}  // namespace

Pchip::Pchip(std::span<const double> x, std::span<const double> y) : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  if (x_.size() != y_.size()) throw UnsortedNodes("pchip: node coordinate and value counts differ");
  if (x_.size() < 2) throw UnsortedNodes("pchip: at least two nodes are required");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw UnsortedNodes("pchip: node coordinates must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }

  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), m(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    m[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = m[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (sign(m[i - 1]) * sign(m[i]) <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
  }
  d_[0] = end_slope(h[0], h[1], m[0], m[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t Pchip::interval(double query) const {
  if (!(query >= x_.front() && query <= x_.back())) {
    throw OutOfSpan("pchip: query " + std::to_string(query) + " outside node span [" + std::to_string(x_.front()) +
                    ", " + std::to_string(x_.back()) + "]");
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), query);
  std::size_t k = static_cast<std::size_t>(it - x_.begin());
  return k == 0 ? 0 : std::min(k - 1, x_.size() - 2);
}

double Pchip::operator()(double query) const {
  const std::size_t k = interval(query);
  if (query == x_[k]) return y_[k];
  if (query == x_[k + 1]) return y_[k + 1];
  const double h = x_[k + 1] - x_[k];
  const double t = (query - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double Pchip::derivative(double query) const {
  const std::size_t k = interval(query);
  const double h = x_[k + 1] - x_[k];
  const double t = (query - x_[k]) / h;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / h;
  const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
  const double dh11 = 3.0 * t2 - 2.0 * t;
  return dh00 * y_[k] + dh10 * d_[k] + dh01 * y_[k + 1] + dh11 * d_[k + 1];
}

}  // namespace chf
