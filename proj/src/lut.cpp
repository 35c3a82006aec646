#include "chf/lut.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <map>

#include "chf/correlations.hpp"
#include "chf/errors.hpp"
#include "text.hpp"

namespace chf {
namespace {

double unit_scale(std::string_view quantity, std::string_view unit) {
  if (quantity == "pressure") {
    if (unit == "Pa") return 1.0;
    if (unit == "kPa") return 1.0e3;
    if (unit == "MPa") return 1.0e6;
    if (unit == "bar") return 1.0e5;
  } else if (quantity == "mass_flux") {
    if (unit == "kg/m2/s" || unit == "kg/(m2*s)") return 1.0;
  } else if (quantity == "quality") {
    if (unit == "-") return 1.0;
  } else if (quantity == "chf") {
    if (unit == "W/m2") return 1.0;
    if (unit == "kW/m2") return 1.0e3;
    if (unit == "MW/m2") return 1.0e6;
  }
  throw FormatError(fmt::format("lookup table: unsupported unit '{}' for {}", unit, quantity));
}

void check_axis(const std::vector<double>& axis, std::string_view name) {
  if (axis.size() < 2) throw GridError(fmt::format("lookup table: {} axis needs at least two entries", name));
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw GridError(fmt::format("lookup table: {} axis not strictly increasing at entry {}", name, i));
    }
  }
}

std::size_t axis_index(const std::vector<double>& axis, double v) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - v) <= 1e-12 * std::max(1.0, std::abs(v))) return i;
  }
  return axis.size();
}

/// Cell index and fractional position; nullopt if outside the axis.
std::optional<std::pair<std::size_t, double>> locate(const std::vector<double>& axis, double v) {
  if (!(v >= axis.front() && v <= axis.back())) return std::nullopt;
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t k = static_cast<std::size_t>(it - axis.begin());
  k = k == 0 ? 0 : std::min(k - 1, axis.size() - 2);
  return std::pair{k, (v - axis[k]) / (axis[k + 1] - axis[k])};
}

double lerp(double a, double b, double t) { return (1.0 - t) * a + t * b; }

/// (1 - exp(-u)) / C and (u - (1 - exp(-u))) / C^2 with u = C * width, for the
/// constant and linear parts of the exponential kernel over one segment.
std::pair<double, double> kernel_moments(double c, double width) {
  if (c < 1e-14) return {width, 0.5 * width * width};
  const double u = c * width;
  const double m0 = -std::expm1(-u) / c;
  double m1;
  if (u < 1e-3) {
    m1 = (u * u / 2.0 - u * u * u / 6.0 + u * u * u * u / 24.0 - u * u * u * u * u / 120.0) / (c * c);
  } else {
    m1 = (u + std::expm1(-u)) / (c * c);
  }
  return {m0, m1};
}

}  // namespace

LutTable parse_table(std::string_view text) {
  LutTable t;
  bool have_format = false;
  double p_scale = 1.0, g_scale = 1.0, chf_scale = 1.0;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> rows;

  text::for_each_line(text, [&](long line_no, std::string_view line) {
    auto tok = text::split(line, true);
    auto num = [&](std::string_view s) {
      auto v = text::to_double(s);
      if (!v || std::isnan(*v)) throw FormatError(fmt::format("lookup table line {}: bad number '{}'", line_no, s));
      return *v;
    };
    if (!have_format) {
      if (tok.size() != 3 || tok[0] != "format" || tok[1] != "chf-lut") {
        throw FormatError(fmt::format("lookup table line {}: expected 'format chf-lut 1'", line_no));
      }
      if (tok[2] != "1") throw FormatError(fmt::format("lookup table: unsupported version {}", tok[2]));
      have_format = true;
      return;
    }
    if (tok[0] == "axis") {
      if (tok.size() < 4) throw FormatError(fmt::format("lookup table line {}: axis line too short", line_no));
      const double scale = unit_scale(tok[1], tok[2]);
      std::vector<double>* axis = nullptr;
      if (tok[1] == "pressure") {
        axis = &t.pressure_axis;
        p_scale = scale;
      } else if (tok[1] == "mass_flux") {
        axis = &t.mass_flux_axis;
        g_scale = scale;
      } else {
        axis = &t.quality_axis;
      }
      if (!axis->empty()) throw GridError(fmt::format("lookup table line {}: {} axis declared twice", line_no, tok[1]));
      for (std::size_t i = 3; i < tok.size(); ++i) axis->push_back(num(tok[i]) * scale);
      check_axis(*axis, tok[1]);
      return;
    }
    if (tok[0] == "unit") {
      if (tok.size() != 3 || tok[1] != "chf") throw FormatError(fmt::format("lookup table line {}: expected 'unit chf <unit>'", line_no));
      chf_scale = unit_scale("chf", tok[2]);
      return;
    }
    if (t.pressure_axis.empty() || t.mass_flux_axis.empty() || t.quality_axis.empty()) {
      throw FormatError(fmt::format("lookup table line {}: data row before all three axes", line_no));
    }
    if (tok.size() != t.quality_axis.size() + 2) {
      throw FormatError(fmt::format("lookup table line {}: expected {} columns, found {}", line_no,
                                    t.quality_axis.size() + 2, tok.size()));
    }
    const double p = num(tok[0]) * p_scale;
    const double g = num(tok[1]) * g_scale;
    const std::size_t ip = axis_index(t.pressure_axis, p);
    const std::size_t ig = axis_index(t.mass_flux_axis, g);
    if (ip == t.pressure_axis.size() || ig == t.mass_flux_axis.size()) {
      throw GridError(fmt::format("lookup table line {}: ({}, {}) is not on the axes", line_no, tok[0], tok[1]));
    }
    std::vector<double> values;
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const double v = num(tok[i]) * chf_scale;
      if (!(v >= 0.0)) throw GridError(fmt::format("lookup table line {}: negative CHF value", line_no));
      values.push_back(v);
    }
    if (!rows.emplace(std::pair{ip, ig}, std::move(values)).second) {
      throw GridError(fmt::format("lookup table line {}: duplicate row for ({}, {})", line_no, tok[0], tok[1]));
    }
  });

  if (!have_format) throw FormatError("lookup table: empty file");
  if (t.pressure_axis.empty() || t.mass_flux_axis.empty() || t.quality_axis.empty()) {
    throw FormatError("lookup table: missing axis declaration");
  }
  t.values.assign(t.pressure_axis.size() * t.mass_flux_axis.size() * t.quality_axis.size(), 0.0);
  for (std::size_t ip = 0; ip < t.pressure_axis.size(); ++ip) {
    for (std::size_t ig = 0; ig < t.mass_flux_axis.size(); ++ig) {
      auto it = rows.find({ip, ig});
      if (it == rows.end()) {
        throw GridError(fmt::format("lookup table: missing row for pressure {} Pa, mass flux {} kg/m2/s",
                                    t.pressure_axis[ip], t.mass_flux_axis[ig]));
      }
      for (std::size_t ix = 0; ix < t.quality_axis.size(); ++ix) t.at(ip, ig, ix) = it->second[ix];
    }
  }
  return t;
}

LutTable load_table(const std::filesystem::path& path) { return parse_table(text::read_file(path)); }

std::string format_table(const LutTable& t) {
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt::format(" {}", x);
    return s;
  };
  std::string out = "format chf-lut 1\n";
  out += "axis pressure Pa" + join(t.pressure_axis) + "\n";
  out += "axis mass_flux kg/m2/s" + join(t.mass_flux_axis) + "\n";
  out += "axis quality -" + join(t.quality_axis) + "\n";
  out += "unit chf W/m2\n";
  for (std::size_t ip = 0; ip < t.pressure_axis.size(); ++ip) {
    for (std::size_t ig = 0; ig < t.mass_flux_axis.size(); ++ig) {
      out += fmt::format("{} {}", t.pressure_axis[ip], t.mass_flux_axis[ig]);
      for (std::size_t ix = 0; ix < t.quality_axis.size(); ++ix) out += fmt::format(" {}", t.at(ip, ig, ix));
      out += '\n';
    }
  }
  return out;
}

double lookup_base(const LutTable& t, double pressure, double mass_flux, double quality, QualityPolicy policy) {
  if (policy == QualityPolicy::clamp) quality = std::clamp(quality, t.quality_axis.front(), t.quality_axis.back());
  auto lp = locate(t.pressure_axis, pressure);
  auto lg = locate(t.mass_flux_axis, mass_flux);
  auto lx = locate(t.quality_axis, quality);
  if (!lp || !lg || !lx) {
    throw OutOfTable(fmt::format("lookup outside table: P = {} Pa, G = {} kg/m2/s, x = {}", pressure, mass_flux, quality),
                     pressure, mass_flux, quality);
  }
  const auto [ip, tp] = *lp;
  const auto [ig, tg] = *lg;
  const auto [ix, tx] = *lx;
  auto along_x = [&](std::size_t a, std::size_t b) { return lerp(t.at(a, b, ix), t.at(a, b, ix + 1), tx); };
  const double c0 = lerp(along_x(ip, ig), along_x(ip, ig + 1), tg);
  const double c1 = lerp(along_x(ip + 1, ig), along_x(ip + 1, ig + 1), tg);
  return lerp(c0, c1, tp);
}

double diameter_correction(double chf_8mm, double diameter) {
  if (!(diameter >= 0.002 && diameter <= 0.05)) {
    throw OutOfRange(fmt::format("diameter {} m outside the correction range [0.002, 0.05] m", diameter));
  }
  return chf_8mm * std::sqrt(0.008 / diameter);
}

double tong_c_coefficient(double quality, double mass_flux) {
  const auto& k = CorrelationCoefficients::bundled();
  const double one_minus_x = std::max(1.0 - quality, 0.0);
  return k.get("tong", "c_coef") * std::pow(one_minus_x, k.get("tong", "x_exp")) /
         std::pow(mass_flux, k.get("tong", "g_exp"));
}

double shape_factor(std::span<const double> nodes, std::span<const double> flux, bool continuous, double z,
                    double origin, double c) {
  if (nodes.size() != flux.size() || nodes.size() < 2) throw MeshError("shape_factor: mismatched or short profile");
  z = std::clamp(z, nodes.front(), nodes.back());
  origin = std::clamp(origin, nodes.front(), nodes.back());

  const std::size_t n = nodes.size();
  double local;
  {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
    std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (k >= n - 1) {
      local = flux[n - 1];
    } else {
      const double t = (z - nodes[k]) / (nodes[k + 1] - nodes[k]);
      local = continuous ? lerp(flux[k], flux[k + 1], t) : (t < 0.5 ? flux[k] : flux[k + 1]);
    }
  }
  if (local == 0.0) throw SingularProfile(fmt::format("shape factor undefined: zero heat flux at z = {} m", z));
  if (!(z > origin)) return 1.0;

  double integral = 0.0;
  auto add_segment = [&](double a, double b, double qa, double qb) {
    if (!(b > a)) return;
    const auto [m0, m1] = kernel_moments(c, b - a);
    const double decay = std::exp(-c * (z - b));
    integral += decay * (qa * m0 + (qb - qa) / (b - a) * m1);
  };

  if (continuous) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double a = std::max(nodes[k], origin);
      const double b = std::min(nodes[k + 1], z);
      if (!(b > a)) continue;
      const double span = nodes[k + 1] - nodes[k];
      const double qa = lerp(flux[k], flux[k + 1], (a - nodes[k]) / span);
      const double qb = lerp(flux[k], flux[k + 1], (b - nodes[k]) / span);
      add_segment(a, b, qa, qb);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double left = k == 0 ? nodes[0] : 0.5 * (nodes[k - 1] + nodes[k]);
      const double right = k == n - 1 ? nodes[n - 1] : 0.5 * (nodes[k] + nodes[k + 1]);
      add_segment(std::max(left, origin), std::min(right, z), flux[k], flux[k]);
    }
  }
  const double window = c < 1e-14 ? (z - origin) : -std::expm1(-c * (z - origin)) / c;
  return integral / (local * window);
}

namespace {

struct NodalState {
  std::vector<double> z;
  std::vector<double> rise;  // enthalpy rise per unit power multiplier
  double h_in = 0.0;
  SaturationState sat;
};

NodalState nodal_state(const TestCase& c, const WaterProperties& water) {
  NodalState s;
  const QualityProfile base = enthalpy_profile(c, water, 1.0);
  s.z = base.z;
  s.h_in = base.h.front();
  s.rise.resize(base.h.size());
  for (std::size_t i = 0; i < base.h.size(); ++i) s.rise[i] = base.h[i] - s.h_in;
  s.sat = water.saturation_state(c.pressure);
  return s;
}

double factor_at(const TestCase& c, const NodalState& s, const std::vector<double>& x, double z,
                 const AxialFactorConfig& cfg) {
  if (!cfg.enabled) return 1.0;
  const double x_local = interpolate_nodal(s.z, x, z);
  if (cfg.unity_when_subcooled && x_local <= 0.0) return 1.0;
  double origin = s.z.front();
  if (cfg.integrate_from_boiling_start) {
    QualityProfile qp;
    qp.z = s.z;
    qp.x = x;
    origin = boiling_length(qp).value_or(s.z.front());
  }
  const double coeff = cfg.constant_c ? *cfg.constant_c : tong_c_coefficient(x_local, c.mass_flux);
  return shape_factor(s.z, c.profile.wall_power, c.profile.continuous, z, origin, coeff);
}

std::vector<double> qualities(const NodalState& s, double lambda) {
  std::vector<double> x(s.z.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (s.h_in + lambda * s.rise[i] - s.sat.h_f) / s.sat.h_fg;
  return x;
}

struct Evaluation {
  double min_chfr = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  std::vector<ChfrPoint> chfr;
};

Evaluation evaluate(const TestCase& c, const NodalState& s, const LocalChfModel& model, const AxialFactorConfig& cfg,
                    double lambda) {
  const auto x = qualities(s, lambda);
  Evaluation e;
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    const double q = lambda * c.heat_flux_avg * c.profile.wall_power[i];
    if (!(q > 0.0)) continue;
    const double chf = model(c.pressure, c.mass_flux, x[i], s.z[i]);
    const double f = factor_at(c, s, x, s.z[i], cfg);
    const double ratio = chf / (f * q);
    e.chfr.push_back({s.z[i], ratio});
    if (ratio < e.min_chfr) {
      e.min_chfr = ratio;
      e.argmin = e.chfr.size() - 1;
    }
  }
  if (e.chfr.empty()) throw SingularProfile(fmt::format("test {}: no heated node", c.test_id));
  return e;
}

}  // namespace

double axial_correction_factor(const TestCase& c, double z, const AxialFactorConfig& cfg, const WaterProperties& water) {
  const NodalState s = nodal_state(c, water);
  return factor_at(c, s, qualities(s, 1.0), z, cfg);
}

CriticalPowerResult critical_power_search(const TestCase& c, const LocalChfModel& model, const CriticalPowerConfig& cfg,
                                          const WaterProperties& water) {
  const NodalState s = nodal_state(c, water);
  std::optional<OutOfTable> table_error;

  // Returns nullopt when the table cannot be queried at this multiplier.
  auto f = [&](double lambda) -> std::optional<Evaluation> {
    try {
      return evaluate(c, s, model, cfg.axial, lambda);
    } catch (const OutOfTable& e) {
      table_error = e;
      return std::nullopt;
    }
  };

  double lo = cfg.lambda_low;
  double hi = cfg.lambda_high;
  auto at_lo = f(lo);
  for (int i = 0; i < 40 && (!at_lo || at_lo->min_chfr <= 1.0); ++i) {
    if (at_lo) hi = lo;
    lo *= 0.25;
    at_lo = f(lo);
  }
  if (!at_lo) throw *table_error;
  if (at_lo->min_chfr <= 1.0) {
    throw NoConvergence(fmt::format("test {}: CHFR below 1 even at power multiplier {}", c.test_id, lo));
  }

  auto at_hi = f(hi);
  for (int i = 0; i < 60 && at_hi && at_hi->min_chfr > 1.0; ++i) {
    lo = hi;
    at_lo = at_hi;
    hi *= 2.0;
    at_hi = f(hi);
  }
  if (at_hi && at_hi->min_chfr > 1.0) {
    throw NoConvergence(fmt::format("test {}: CHFR stays above 1 up to power multiplier {}", c.test_id, hi));
  }

  CriticalPowerResult result;
  std::optional<Evaluation> found;
  double lambda = hi;
  bool hi_valid = at_hi.has_value();
  // Stop once CHFR is within tolerance and the bracket is narrow enough that
  // the answer no longer depends on where the search started.
  for (int it = 0; it < cfg.max_iterations; ++it) {
    result.iterations = it + 1;
    const double mid = 0.5 * (lo + hi);
    auto e = f(mid);
    if (!e) {
      hi = mid;
      continue;
    }
    if (std::abs(e->min_chfr - 1.0) <= cfg.tolerance && hi - lo <= cfg.lambda_resolution * mid) {
      found = std::move(e);
      lambda = mid;
      break;
    }
    if (e->min_chfr > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      hi_valid = true;
    }
  }
  if (!found) {
    if (!hi_valid && table_error) throw *table_error;
    throw NoConvergence(fmt::format("test {}: critical power bisection did not converge in {} iterations", c.test_id,
                                    cfg.max_iterations));
  }

  result.power_multiplier = lambda;
  result.critical_power = lambda * c.power;
  result.chf_location = found->chfr[found->argmin].z;
  result.profile_of_chfr = std::move(found->chfr);
  if (auto measured = f(1.0)) {
    result.min_chfr_at_measured_power = measured->min_chfr;
  } else {
    result.min_chfr_at_measured_power = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

CriticalPowerResult predict_critical_power(const TestCase& c, const LutTable& table, const CriticalPowerConfig& cfg,
                                           const WaterProperties& water) {
  const double kd = cfg.diameter_correction ? diameter_correction(1.0, c.diameter) : 1.0;
  LocalChfModel model = [&](double p, double g, double x, double) {
    return lookup_base(table, p, g, x, cfg.quality_policy) * kd;
  };
  return critical_power_search(c, model, cfg, water);
}

double direct_local_chf(const TestCase& c, const LutTable& table, double z, const CriticalPowerConfig& cfg,
                        const WaterProperties& water) {
  const NodalState s = nodal_state(c, water);
  const auto x = qualities(s, 1.0);
  const double kd = cfg.diameter_correction ? diameter_correction(1.0, c.diameter) : 1.0;
  const double base = lookup_base(table, c.pressure, c.mass_flux, interpolate_nodal(s.z, x, z), cfg.quality_policy);
  return base * kd / factor_at(c, s, x, z, cfg.axial);
}

}  // namespace chf
