#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "chf/test_case.hpp"

namespace chf {

struct CurvePoint {
  double z = 0.0;  ///< [m]
  double q = 0.0;  ///< normalized flux [-]
};

/// Clicked points of one published axial-flux figure.
struct RawCurve {
  std::vector<CurvePoint> points;
  std::optional<double> declared_power;  ///< [W]
  double perimeter = 0.0;                ///< heated perimeter [m]
  double length = 0.0;                   ///< heated length [m]
};

/// Reads "z, q" lines (commas or whitespace; '#' comments).
std::vector<CurvePoint> parse_points(std::string_view text);
std::vector<CurvePoint> read_points(const std::filesystem::path& path);

/// Worst-first removal of points far from a moving-median baseline. A
/// point's score is its residual over the larger of 1.4826 * median residual
/// and the median |dq| between neighbouring points within
/// `spread_half_window`, so steep but smooth flanks are not mistaken for
/// clicks.
struct OutlierPolicy {
  double k = 3.5;
  std::size_t half_window = 2;
  std::size_t spread_half_window = 4;
  double max_fraction = 0.2;
};

/// Sorts by z, averages points with identical z, then filters. Throws
/// TooFewPoints for fewer than 4 (distinct) points.
RawCurve filter_outliers(const RawCurve& curve, const OutlierPolicy& policy = {});

/// Number of points filter_outliers would drop (after duplicate averaging).
std::size_t count_outliers(const RawCurve& curve, const OutlierPolicy& policy = {});

/// Shape-preserving cubic at `query`; throws UnsortedNodes / OutOfSpan.
double pchip_eval(std::span<const CurvePoint> nodes, double query);

struct ResamplePolicy {
  std::size_t n_nodes = 40;
  bool continuous = true;
  /// Positions [m] where the curve jumps; each piece is interpolated on its own.
  std::vector<double> breakpoints;
  ProfileShape shape = ProfileShape::other;
  double min_span_fraction = 0.95;
};

/// Uniform-mesh profile over [0, length] with weighted mean exactly 1. Queries
/// outside the clicked span take the nearest end value. Throws SpanError when
/// the points cover less than min_span_fraction of the length.
AxialProfile resample_profile(const RawCurve& curve, const ResamplePolicy& policy = {});

struct EnergyBalance {
  bool pass = false;
  double discrepancy = 0.0;  ///< |computed - declared| / declared
  double computed_power = 0.0;
};

/// Compares q_av * perimeter * int wall_power dz with the declared power.
/// Passes when the discrepancy is at most the threshold.
EnergyBalance energy_balance_check(const AxialProfile& profile, double q_av, double perimeter, double declared_power,
                                   double threshold = 0.02);

}  // namespace chf
