#pragma once

// Case builders and fixture readers shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chf/channel.hpp"
#include "chf/lut.hpp"
#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(CHFKIT_DATA_DIR) / relative;
}

/// Numeric rows of a comma-separated fixture; '#' lines are skipped and
/// non-numeric cells become NaN (use `cells` for text columns).
struct CsvRow {
  std::vector<double> values;
  std::vector<std::string> cells;
};

inline std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    CsvRow row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.cells.push_back(cell);
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        row.values.push_back(used == cell.size() ? v : std::nan(""));
      } catch (...) {
        row.values.push_back(std::nan(""));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Circular tube with consistent bookkeeping: area, perimeter, mass flow and
/// power follow from D, L, G and q_av. Both inlet fields are set.
inline TestCase tube_case(double diameter, double length, double pressure, double mass_flux, double inlet_enthalpy,
                          double heat_flux, const WaterProperties& water = WaterProperties::bundled()) {
  TestCase c;
  c.test_id = 1;
  c.diameter = diameter;
  c.perimeter = std::numbers::pi * diameter;
  c.area = std::numbers::pi * diameter * diameter / 4.0;
  c.length = length;
  c.pressure = pressure;
  c.mass_flux = mass_flux;
  c.mass_flow = mass_flux * c.area;
  c.heat_flux_avg = heat_flux;
  c.power = heat_flux * c.perimeter * length;
  c.inlet_enthalpy = inlet_enthalpy;
  c.inlet_temperature = water.liquid_temperature(pressure, inlet_enthalpy);
  c.source = "synthetic";
  c.profile.wall_power = {1.0, 1.0};
  c.profile.wall_mesh = {length, length};
  c.profile.shape = ProfileShape::uniform;
  c.heating = Heating::uniform;
  const QualityProfile qp = quality_profile(c, water);
  c.quality_samples = {{length, qp.x.back()}};
  return c;
}

/// Turns a uniform tube case into a non-uniform one with the given 40-node
/// shape (rescaled to trapezoid mean 1 on a uniform mesh).
inline TestCase with_profile(TestCase c, std::vector<double> shape, bool continuous, ProfileShape label,
                             double chf_location, const WaterProperties& water = WaterProperties::bundled()) {
  const std::size_t n = shape.size();
  const double h = c.length / static_cast<double>(n - 1);
  double sum = 0.5 * (shape.front() + shape.back());
  for (std::size_t i = 1; i + 1 < n; ++i) sum += shape[i];
  const double mean = sum / static_cast<double>(n - 1);
  for (double& v : shape) v /= mean;
  c.profile.wall_power = std::move(shape);
  c.profile.wall_mesh.assign(n, h);
  c.profile.continuous = continuous;
  c.profile.shape = label;
  c.profile.shape_label = std::string(to_string(label));
  c.heating = Heating::non_uniform;
  c.chf_location = chf_location;
  const QualityProfile qp = quality_profile(c, water);
  c.quality_samples.clear();
  for (std::size_t i = 0; i < n; ++i) c.quality_samples.push_back({qp.z[i], qp.x[i]});
  return c;
}

/// Table filled from f(P, G, x) on the given axes.
template <class F>
LutTable synthetic_table(std::vector<double> p, std::vector<double> g, std::vector<double> x, F f) {
  LutTable t;
  t.pressure_axis = std::move(p);
  t.mass_flux_axis = std::move(g);
  t.quality_axis = std::move(x);
  t.values.resize(t.pressure_axis.size() * t.mass_flux_axis.size() * t.quality_axis.size());
  for (std::size_t i = 0; i < t.pressure_axis.size(); ++i) {
    for (std::size_t j = 0; j < t.mass_flux_axis.size(); ++j) {
      for (std::size_t k = 0; k < t.quality_axis.size(); ++k) {
        t.at(i, j, k) = f(t.pressure_axis[i], t.mass_flux_axis[j], t.quality_axis[k]);
      }
    }
  }
  return t;
}

/// Random case inside the collected envelope; every bookkeeping rule holds.
inline TestCase random_valid_case(std::mt19937_64& rng, long long id, bool non_uniform,
                                  const WaterProperties& water = WaterProperties::bundled()) {
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const double d = u(5.44e-3, 28.3e-3);
  const double l = u(0.2, 7.0);
  const double p = u(0.5e6, 18e6);
  const double g = u(400.0, 8000.0);
  const auto sat = water.saturation_state(p);
  const double h_in = sat.h_f - u(10e3, std::min(0.6 * sat.h_fg, sat.h_f - 100e3));
  TestCase c = tube_case(d, l, p, g, h_in, u(2e5, 5e6), water);
  c.test_id = id;
  c.source = id % 3 == 0 ? "KAERI & co <digitized>" : "KAERI";
  if (non_uniform) {
    std::vector<double> shape(40);
    for (double& v : shape) v = u(0.05, 3.0);
    const ProfileShape labels[] = {ProfileShape::spike, ProfileShape::middle_peaked, ProfileShape::inlet,
                                   ProfileShape::outlet};
    c = with_profile(c, shape, id % 2 == 0, labels[id % 4], u(0.0, l), water);
  }
  return c;
}

}  // namespace chf::testing
