#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chf/channel.hpp"
#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf {

/// CHF lookup table for the 8 mm reference tube on a (pressure, mass flux,
/// quality) grid. Values are stored quality-fastest.
struct LutTable {
  std::vector<double> pressure_axis;   ///< [Pa]
  std::vector<double> mass_flux_axis;  ///< [kg/m2/s]
  std::vector<double> quality_axis;    ///< [-]
  std::vector<double> values;          ///< [W/m2]

  double at(std::size_t ip, std::size_t ig, std::size_t ix) const {
    return values[(ip * mass_flux_axis.size() + ig) * quality_axis.size() + ix];
  }
  double& at(std::size_t ip, std::size_t ig, std::size_t ix) {
    return values[(ip * mass_flux_axis.size() + ig) * quality_axis.size() + ix];
  }
};

/// Reads the delimited table format (see docs/lut_format.md). Throws
/// FormatError on syntax problems and GridError on non-monotone axes,
/// duplicate or missing rows, or negative values.
LutTable parse_table(std::string_view text);
LutTable load_table(const std::filesystem::path& path);
/// Writes a table in the same format (SI units).
std::string format_table(const LutTable& table);

enum class QualityPolicy { error, clamp };

/// Trilinear interpolation; exact at grid nodes. Throws OutOfTable outside the
/// axis box unless quality clamping is requested.
double lookup_base(const LutTable& table, double pressure, double mass_flux, double quality,
                   QualityPolicy policy = QualityPolicy::error);

/// chf_8mm * (0.008 / D)^(1/2) for 2 mm <= D <= 50 mm; OutOfRange otherwise.
double diameter_correction(double chf_8mm, double diameter);

/// Settings for the axial heat-flux shape factor.
struct AxialFactorConfig {
  bool enabled = true;
  /// Overrides the quality/mass-flux dependent C coefficient [1/m].
  std::optional<double> constant_c;
  /// F = 1 wherever the local equilibrium quality is <= 0.
  bool unity_when_subcooled = true;
  /// Start the upstream integral at the boiling start instead of the inlet.
  bool integrate_from_boiling_start = true;
};

/// Tong's C coefficient [1/m] for local quality and mass flux.
double tong_c_coefficient(double quality, double mass_flux);

/// Shape factor of a nodal flux shape evaluated exactly for the piecewise
/// linear (continuous) or piecewise constant (discontinuous) reading:
///   F = C * int_{origin}^{z} q(s) exp(-C (z - s)) ds / (q(z) (1 - exp(-C (z - origin)))).
/// Throws SingularProfile if q(z) == 0.
double shape_factor(std::span<const double> nodes, std::span<const double> flux, bool continuous, double z,
                    double origin, double c);

/// F(z) for a test case at its measured power.
double axial_correction_factor(const TestCase& test_case, double z, const AxialFactorConfig& config = {},
                               const WaterProperties& water = WaterProperties::bundled());

enum class SearchMode { heat_balance, direct_substitution };

struct CriticalPowerConfig {
  AxialFactorConfig axial;
  bool diameter_correction = true;
  QualityPolicy quality_policy = QualityPolicy::error;
  SearchMode mode = SearchMode::heat_balance;
  double tolerance = 1e-4;    ///< on min CHFR - 1
  double lambda_resolution = 1e-7;  ///< relative bracket width at convergence
  int max_iterations = 100;   ///< bisection steps
  double lambda_low = 0.05;   ///< initial bracket on the power multiplier
  double lambda_high = 4.0;
};

struct ChfrPoint {
  double z = 0.0;
  double chfr = 0.0;
};

struct CriticalPowerResult {
  double critical_power = 0.0;  ///< [W]
  double power_multiplier = 0.0;
  double chf_location = 0.0;  ///< [m]
  double min_chfr_at_measured_power = 0.0;
  std::vector<ChfrPoint> profile_of_chfr;  ///< at the critical power
  int iterations = 0;
};

/// Local critical heat flux [W/m2] before the axial shape factor, at local
/// (pressure, mass flux, quality, z).
using LocalChfModel = std::function<double(double pressure, double mass_flux, double quality, double z)>;

/// Scales the power until min_z CHFR = 1 by bisection. CHFR(z) is
/// local_chf / F(z) over the local flux at that power.
CriticalPowerResult critical_power_search(const TestCase& test_case, const LocalChfModel& local_chf,
                                          const CriticalPowerConfig& config = {},
                                          const WaterProperties& water = WaterProperties::bundled());

/// Lookup-table critical power: LUT value with diameter correction and F.
CriticalPowerResult predict_critical_power(const TestCase& test_case, const LutTable& table,
                                           const CriticalPowerConfig& config = {},
                                           const WaterProperties& water = WaterProperties::bundled());

/// Direct substitution: local CHF [W/m2] from the table at the measured-power
/// conditions at z (with diameter correction and F).
double direct_local_chf(const TestCase& test_case, const LutTable& table, double z,
                        const CriticalPowerConfig& config = {},
                        const WaterProperties& water = WaterProperties::bundled());

}  // namespace chf
