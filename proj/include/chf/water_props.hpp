#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "chf/pchip.hpp"

namespace chf {

/// Saturated water/steam state at one pressure. h_g is h_f + h_fg by construction.
struct SaturationState {
  double pressure = 0.0;  ///< [Pa]
  double t_sat = 0.0;     ///< [degC]
  double h_f = 0.0;       ///< [J/kg]
  double h_fg = 0.0;      ///< [J/kg]
  double h_g = 0.0;       ///< [J/kg]
};

/// Table-backed water property provider for 0.1 - 20 MPa.
///
/// Saturation properties are interpolated with monotone cubics over a 0.05 MPa
/// pressure grid. Compressed-liquid enthalpy h(P, T) is interpolated with
/// monotone cubics in temperature along each tabulated pressure row and
/// linearly between rows. Queries outside the tabulated band throw OutOfRange;
/// nothing is extrapolated. Immutable after construction.
class WaterProperties {
 public:
  static constexpr double kMinPressure = 0.1e6;
  static constexpr double kMaxPressure = 20.0e6;

  /// The tables compiled into the library (data/water_*.dat).
  static const WaterProperties& bundled();

  static WaterProperties from_text(std::string_view saturation_table, std::string_view subcooled_table);
  static WaterProperties load(const std::filesystem::path& saturation_table,
                              const std::filesystem::path& subcooled_table);

  SaturationState saturation_state(double pressure) const;

  /// Liquid enthalpy [J/kg] at pressure [Pa] and temperature [degC],
  /// 0 < temperature <= t_sat(pressure).
  double subcooled_liquid_enthalpy(double pressure, double temperature) const;

  /// Inverse of subcooled_liquid_enthalpy; returns t_sat for h >= h_f.
  double liquid_temperature(double pressure, double enthalpy) const;

  /// (h - h_f) / h_fg, unbounded on both sides.
  double equilibrium_quality(double enthalpy, double pressure) const;

 private:
  struct LiquidRow {
    double pressure;
    Pchip enthalpy_of_temperature;
  };

  WaterProperties(std::vector<double> pressure, std::vector<double> t_sat, std::vector<double> h_f,
                  std::vector<double> h_fg, std::vector<LiquidRow> rows);

  void check_pressure(double pressure) const;

  Pchip t_sat_;
  Pchip h_f_;
  Pchip h_fg_;
  std::vector<LiquidRow> rows_;
};

}  // namespace chf
