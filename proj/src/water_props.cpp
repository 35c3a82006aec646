#include "chf/water_props.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "text.hpp"

namespace chf {
namespace embedded {
extern const std::string_view water_saturation;
extern const std::string_view water_subcooled;
}  // namespace embedded

namespace {

struct SaturationColumns {
  std::vector<double> pressure, t_sat, h_f, h_fg;
};

void expect_format(std::string_view line, std::string_view name, long line_no) {
  auto tokens = text::split(line);
  if (tokens.size() != 3 || tokens[0] != "format" || tokens[1] != name) {
    throw FormatError(fmt::format("water table line {}: expected 'format {} 1'", line_no, name));
  }
  if (tokens[2] != "1") throw VersionError(fmt::format("water table: unsupported {} version {}", name, tokens[2]));
}

double number(std::string_view token, long line_no) {
  auto v = text::to_double(token);
  if (!v) throw FormatError(fmt::format("water table line {}: bad number '{}'", line_no, token));
  return *v;
}

SaturationColumns parse_saturation(std::string_view table) {
  SaturationColumns cols;
  int header = 0;
  text::for_each_line(table, [&](long line_no, std::string_view line) {
    if (header == 0) {
      expect_format(line, "water-saturation", line_no);
      ++header;
      return;
    }
    if (header == 1) {
      if (!line.starts_with("columns")) throw FormatError("water saturation table: missing columns header");
      ++header;
      return;
    }
    auto tokens = text::split(line);
    if (tokens.size() != 4) throw FormatError(fmt::format("water saturation table line {}: expected 4 columns", line_no));
    cols.pressure.push_back(number(tokens[0], line_no));
    cols.t_sat.push_back(number(tokens[1], line_no));
    cols.h_f.push_back(number(tokens[2], line_no));
    cols.h_fg.push_back(number(tokens[3], line_no));
  });
  if (cols.pressure.size() < 4) throw FormatError("water saturation table: too few rows");
  return cols;
}

struct SubcooledRaw {
  std::vector<double> temperature;
  std::vector<std::pair<double, std::vector<double>>> rows;
};

SubcooledRaw parse_subcooled(std::string_view table) {
  SubcooledRaw raw;
  int header = 0;
  text::for_each_line(table, [&](long line_no, std::string_view line) {
    if (header == 0) {
      expect_format(line, "water-subcooled", line_no);
      ++header;
      return;
    }
    auto tokens = text::split(line);
    if (header == 1) {
      if (tokens.empty() || !tokens[0].starts_with("temperature")) {
        throw FormatError("water subcooled table: missing temperature header");
      }
      for (std::size_t i = 1; i < tokens.size(); ++i) raw.temperature.push_back(number(tokens[i], line_no));
      ++header;
      return;
    }
    if (tokens.size() != raw.temperature.size() + 1) {
      throw FormatError(fmt::format("water subcooled table line {}: expected {} columns", line_no,
                                    raw.temperature.size() + 1));
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < tokens.size(); ++i) values.push_back(number(tokens[i], line_no));
    raw.rows.emplace_back(number(tokens[0], line_no), std::move(values));
  });
  if (raw.rows.size() < 2) throw FormatError("water subcooled table: too few pressure rows");
  return raw;
}

}  // namespace

WaterProperties::WaterProperties(std::vector<double> pressure, std::vector<double> t_sat, std::vector<double> h_f,
                                 std::vector<double> h_fg, std::vector<LiquidRow> rows)
    : t_sat_(pressure, t_sat), h_f_(pressure, h_f), h_fg_(pressure, h_fg), rows_(std::move(rows)) {}

WaterProperties WaterProperties::from_text(std::string_view saturation_table, std::string_view subcooled_table) {
  SaturationColumns sat = parse_saturation(saturation_table);
  if (sat.pressure.front() > kMinPressure || sat.pressure.back() < kMaxPressure) {
    throw FormatError("water saturation table does not cover 0.1 - 20 MPa");
  }

  SubcooledRaw raw = parse_subcooled(subcooled_table);
  std::vector<LiquidRow> rows;
  for (auto& [p, values] : raw.rows) {
    // Each row holds a finite prefix followed by 'nan' padding.
    std::size_t n = 0;
    while (n < values.size() && std::isfinite(values[n])) ++n;
    for (std::size_t i = n; i < values.size(); ++i) {
      if (std::isfinite(values[i])) throw FormatError("water subcooled table: finite value after nan padding");
    }
    if (n < 4) throw FormatError("water subcooled table: row with fewer than 4 values");
    rows.push_back({p, Pchip(std::span(raw.temperature).first(n), std::span(values).first(n))});
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].pressure > rows[i - 1].pressure)) throw FormatError("water subcooled table: pressures not increasing");
  }
  if (rows.front().pressure > kMinPressure || rows.back().pressure < kMaxPressure) {
    throw FormatError("water subcooled table does not cover 0.1 - 20 MPa");
  }
  return WaterProperties(std::move(sat.pressure), std::move(sat.t_sat), std::move(sat.h_f), std::move(sat.h_fg),
                         std::move(rows));
}

WaterProperties WaterProperties::load(const std::filesystem::path& saturation_table,
                                      const std::filesystem::path& subcooled_table) {
  return from_text(text::read_file(saturation_table), text::read_file(subcooled_table));
}

const WaterProperties& WaterProperties::bundled() {
  static const WaterProperties instance = from_text(embedded::water_saturation, embedded::water_subcooled);
  return instance;
}

void WaterProperties::check_pressure(double pressure) const {
  if (!(pressure >= kMinPressure && pressure <= kMaxPressure)) {
    throw OutOfRange(fmt::format("pressure {} Pa outside supported band [0.1, 20] MPa", pressure));
  }
}

SaturationState WaterProperties::saturation_state(double pressure) const {
  check_pressure(pressure);
  SaturationState s;
  s.pressure = pressure;
  s.t_sat = t_sat_(pressure);
  s.h_f = h_f_(pressure);
  s.h_fg = h_fg_(pressure);
  // Nudge the smaller term by at most one ulp so that h_g = h_f + h_fg holds
  // in exact arithmetic; then h_g - h_f == h_fg in floating point too.
  s.h_g = s.h_f + s.h_fg;
  if (s.h_f >= s.h_fg) {
    s.h_fg = s.h_g - s.h_f;
  } else {
    s.h_f = s.h_g - s.h_fg;
  }
  return s;
}

double WaterProperties::subcooled_liquid_enthalpy(double pressure, double temperature) const {
  check_pressure(pressure);
  const double t_sat = t_sat_(pressure);
  if (!(temperature > 0.0)) {
    throw OutOfRange(fmt::format("liquid temperature {} degC must be above 0 degC", temperature));
  }
  if (temperature > t_sat) {
    throw OutOfRange(fmt::format("temperature {} degC above saturation ({} degC at {} Pa); superheated liquid not modeled",
                                 temperature, t_sat, pressure));
  }
  auto upper = std::lower_bound(rows_.begin(), rows_.end(), pressure,
                                [](const LiquidRow& r, double p) { return r.pressure < p; });
  if (upper == rows_.begin()) return upper->enthalpy_of_temperature(temperature);
  auto lower = std::prev(upper);
  const double w = (pressure - lower->pressure) / (upper->pressure - lower->pressure);
  const double h_lo = lower->enthalpy_of_temperature(temperature);
  const double h_hi = upper->enthalpy_of_temperature(temperature);
  return (1.0 - w) * h_lo + w * h_hi;
}

double WaterProperties::liquid_temperature(double pressure, double enthalpy) const {
  const SaturationState sat = saturation_state(pressure);
  if (enthalpy >= sat.h_f) return sat.t_sat;
  double lo = 1e-6;
  double hi = sat.t_sat;
  if (enthalpy < subcooled_liquid_enthalpy(pressure, lo)) {
    throw OutOfRange(fmt::format("enthalpy {} J/kg below liquid at 0 degC", enthalpy));
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
    const double mid = 0.5 * (lo + hi);
    (subcooled_liquid_enthalpy(pressure, mid) < enthalpy ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double WaterProperties::equilibrium_quality(double enthalpy, double pressure) const {
  const SaturationState sat = saturation_state(pressure);
  return (enthalpy - sat.h_f) / sat.h_fg;
}

}  // namespace chf
