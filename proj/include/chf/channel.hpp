#pragma once

#include <optional>
#include <vector>

#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf {

/// Axial thermodynamic state along the heated tube.
struct QualityProfile {
  std::vector<double> z;  ///< node positions [m]
  std::vector<double> h;  ///< bulk enthalpy [J/kg]
  std::vector<double> x;  ///< equilibrium quality [-]; empty until quality_profile
  std::optional<double> boiling_length_start;  ///< z where x first reaches 0 [m]
};

/// Inlet enthalpy of the case, computed from the inlet temperature when only that is present.
double resolve_inlet_enthalpy(const TestCase& test_case, const WaterProperties& water = WaterProperties::bundled());

/// Heat balance march: h(z) = h_in + P_h/(G A) * q_av * int_0^z wall_power,
/// trapezoid on the case mesh. `power_scale` multiplies the heat flux
/// (profile shape fixed). Fills z and h.
QualityProfile enthalpy_profile(const TestCase& test_case, const WaterProperties& water = WaterProperties::bundled(),
                                double power_scale = 1.0);

/// enthalpy_profile plus x(z) at the case pressure and the boiling start.
QualityProfile quality_profile(const TestCase& test_case, const WaterProperties& water = WaterProperties::bundled(),
                               double power_scale = 1.0);

/// Linear-interpolated z where x crosses zero; 0 if saturated at the inlet,
/// nullopt if subcooled everywhere.
std::optional<double> boiling_length(const QualityProfile& profile);

/// Linear interpolation of a nodal quantity at z (clamped to the node span).
double interpolate_nodal(const std::vector<double>& z, const std::vector<double>& values, double at);

}  // namespace chf
