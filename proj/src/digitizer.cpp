#include "chf/digitizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "chf/errors.hpp"
#include "chf/pchip.hpp"
#include "text.hpp"

namespace chf {
namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lower + upper);
}

std::vector<CurvePoint> sorted_unique(std::vector<CurvePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.z < b.z || (a.z == b.z && a.q < b.q);
  });
  std::vector<CurvePoint> out;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < pts.size() && pts[j].z == pts[i].z) sum += pts[j++].q;
    out.push_back({pts[i].z, sum / static_cast<double>(j - i)});
    i = j;
  }
  return out;
}

/// Index of the next point to drop, if any.
std::optional<std::size_t> worst_point(const std::vector<CurvePoint>& p, const OutlierPolicy& policy) {
  const std::size_t n = p.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= policy.half_window ? i - policy.half_window : 0;
    const std::size_t hi = std::min(n, i + policy.half_window + 1);
    std::vector<double> window;
    for (std::size_t j = lo; j < hi; ++j) window.push_back(p[j].q);
    r[i] = std::abs(p[i].q - median(std::move(window)));
  }
  const double mad = 1.4826 * median(r);
  std::vector<double> dq(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) dq[i] = std::abs(p[i + 1].q - p[i].q);

  std::size_t worst = 0;
  double worst_ratio = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= policy.spread_half_window ? i - policy.spread_half_window : 0;
    const std::size_t hi = std::min(n - 1, i + policy.spread_half_window);
    const double spread = median(std::vector<double>(dq.begin() + lo, dq.begin() + hi));
    const double ratio = r[i] / std::max({mad, spread, 1e-300});
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = i;
    }
  }
  if (!(worst_ratio > policy.k)) return std::nullopt;
  return worst;
}

std::vector<CurvePoint> filtered_points(const RawCurve& curve, const OutlierPolicy& policy) {
  auto p = sorted_unique(curve.points);
  if (p.size() < 4) throw TooFewPoints(fmt::format("outlier filter needs at least 4 points, got {}", p.size()));
  const auto budget = static_cast<std::size_t>(std::floor(policy.max_fraction * static_cast<double>(p.size())));
  for (std::size_t removed = 0; removed < budget && p.size() > 4; ++removed) {
    auto worst = worst_point(p, policy);
    if (!worst) break;
    p.erase(p.begin() + static_cast<std::ptrdiff_t>(*worst));
  }
  return p;
}

}  // namespace

std::vector<CurvePoint> parse_points(std::string_view text) {
  std::vector<CurvePoint> pts;
  text::for_each_line(text, [&](long line_no, std::string_view line) {
    auto tok = text::split(line, true);
    std::optional<double> z, q;
    if (tok.size() == 2) {
      z = text::to_double(tok[0]);
      q = text::to_double(tok[1]);
    }
    if (!z || !q || !std::isfinite(*z) || !std::isfinite(*q)) {
      throw FormatError(fmt::format("point file line {}: expected 'z, q'", line_no));
    }
    pts.push_back({*z, *q});
  });
  return pts;
}

std::vector<CurvePoint> read_points(const std::filesystem::path& path) { return parse_points(text::read_file(path)); }

RawCurve filter_outliers(const RawCurve& curve, const OutlierPolicy& policy) {
  RawCurve out = curve;
  out.points = filtered_points(curve, policy);
  return out;
}

std::size_t count_outliers(const RawCurve& curve, const OutlierPolicy& policy) {
  return sorted_unique(curve.points).size() - filtered_points(curve, policy).size();
}

double pchip_eval(std::span<const CurvePoint> nodes, double query) {
  std::vector<double> z, q;
  for (const auto& p : nodes) {
    z.push_back(p.z);
    q.push_back(p.q);
  }
  return Pchip(z, q)(query);
}

AxialProfile resample_profile(const RawCurve& curve, const ResamplePolicy& policy) {
  if (!(curve.length > 0.0)) throw SpanError("resample: heated length must be positive");
  if (policy.n_nodes < 2) throw MeshError("resample: need at least 2 nodes");
  auto pts = sorted_unique(curve.points);
  if (pts.size() < 2) throw TooFewPoints("resample: need at least 2 points");
  for (const auto& p : pts) {
    if (p.z < 0.0 || p.z > 1.01 * curve.length) {
      throw OutOfSpan(fmt::format("resample: point z = {} m outside the heated length {} m", p.z, curve.length));
    }
  }
  const double covered = std::min(pts.back().z, curve.length) - pts.front().z;
  if (covered < policy.min_span_fraction * curve.length) {
    throw SpanError(fmt::format("resample: points cover {:.1f}% of the heated length, need {:.1f}%",
                                100.0 * covered / curve.length, 100.0 * policy.min_span_fraction));
  }

  auto breaks = policy.breakpoints;
  std::sort(breaks.begin(), breaks.end());
  std::vector<Pchip> pieces;
  {
    std::size_t start = 0;
    for (std::size_t b = 0; b <= breaks.size(); ++b) {
      std::size_t end = start;
      while (end < pts.size() && (b == breaks.size() || pts[end].z < breaks[b])) ++end;
      if (end - start < 2) {
        throw TooFewPoints(fmt::format("resample: piece {} between breakpoints has fewer than 2 points", b));
      }
      std::vector<double> z, q;
      for (std::size_t i = start; i < end; ++i) {
        z.push_back(pts[i].z);
        q.push_back(pts[i].q);
      }
      pieces.emplace_back(z, q);
      start = end;
    }
  }

  const std::size_t n = policy.n_nodes;
  const double h = curve.length / static_cast<double>(n - 1);
  AxialProfile prof;
  prof.wall_power.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = i + 1 == n ? curve.length : static_cast<double>(i) * h;
    const std::size_t piece =
        static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), z) - breaks.begin());
    const Pchip& f = pieces[piece];
    prof.wall_power[i] = f(std::clamp(z, f.front(), f.back()));
  }
  double sum = 0.5 * (prof.wall_power.front() + prof.wall_power.back());
  for (std::size_t i = 1; i + 1 < n; ++i) sum += prof.wall_power[i];
  const double mean = sum / static_cast<double>(n - 1);
  if (!(mean > 0.0)) throw SingularProfile("resample: profile has non-positive mean");
  const bool flat = std::all_of(curve.points.begin(), curve.points.end(),
                                [&](const CurvePoint& p) { return p.q == curve.points.front().q; });
  if (flat) {
    // A flat curve is exactly uniform; dividing by the rounded mean is not.
    std::fill(prof.wall_power.begin(), prof.wall_power.end(), 1.0);
  } else {
    for (double& v : prof.wall_power) v /= mean;
  }

  prof.wall_mesh.assign(n, h);
  prof.continuous = policy.continuous;
  prof.shape = policy.shape;
  prof.shape_label = std::string(to_string(policy.shape));
  return prof;
}

EnergyBalance energy_balance_check(const AxialProfile& profile, double q_av, double perimeter, double declared_power,
                                   double threshold) {
  EnergyBalance r;
  r.computed_power = q_av * perimeter * profile.integral();
  r.discrepancy = std::abs(r.computed_power - declared_power) / declared_power;
  // Slack of a few ulps so a discrepancy that is exactly the threshold in
  // decimal still passes after rounding.
  r.pass = r.discrepancy <= threshold * (1.0 + 1e-12);
  return r;
}

}  // namespace chf
