#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "chf/water_props.hpp"

namespace chf {

/// Diagnostic flags attached to a correlation evaluation.
struct ChfFlags {
  bool negative_raw_output = false;
  bool out_of_envelope = false;

  bool any() const noexcept { return negative_raw_output || out_of_envelope; }
  bool operator==(const ChfFlags&) const = default;
};

/// Correlation output. `chf` is empty when the raw value is not a usable
/// (positive) heat flux; `raw_chf` always keeps the evaluated number.
struct ChfPrediction {
  std::optional<double> chf;  ///< [W/m2]
  double raw_chf = 0.0;       ///< [W/m2]
  ChfFlags flags;

  bool applicable() const noexcept { return chf.has_value(); }
};

/// Published constants, keyed by (correlation, name), read from
/// data/correlation_coefficients.dat.
class CorrelationCoefficients {
 public:
  static const CorrelationCoefficients& bundled();
  static CorrelationCoefficients parse(std::string_view text);

  double get(std::string_view correlation, std::string_view name) const;

 private:
  std::map<std::string, double, std::less<>> values_;
};

/// Bowring (1972) in inlet-conditions form: predicted average critical heat
/// flux for a uniformly heated round tube. `inlet_subcooling` = h_f - h_in
/// [J/kg]; negative values describe a two-phase inlet.
ChfPrediction bowring_chf(double pressure, double mass_flux, double diameter, double length, double inlet_subcooling,
                          const WaterProperties& water = WaterProperties::bundled());
/// Same evaluation with the latent heat supplied by the caller.
ChfPrediction bowring_chf_with_latent_heat(double pressure, double mass_flux, double diameter, double length,
                                           double inlet_subcooling, double h_fg);

enum class BiasiBranch { low_quality, high_quality };

struct BiasiBranches {
  double low_quality = 0.0;   ///< [W/m2]
  double high_quality = 0.0;  ///< [W/m2]
  BiasiBranch governing = BiasiBranch::low_quality;
};

/// Both Biasi (1967) branches at local conditions and the governing one:
/// the high-quality branch below 300 kg/m2/s, otherwise the larger value.
BiasiBranches biasi_branches(double diameter, double mass_flux, double pressure, double quality);

/// Biasi (1967) local critical heat flux [W/m2].
ChfPrediction biasi_chf(double diameter, double mass_flux, double pressure, double quality);

/// Inputs for the validity predicate; unset fields are not checked.
struct CorrelationInputs {
  std::optional<double> pressure;   ///< [Pa]
  std::optional<double> mass_flux;  ///< [kg/m2/s]
  std::optional<double> diameter;   ///< [m]
  std::optional<double> length;     ///< [m]
  std::optional<double> quality;    ///< [-]
};

/// Published validity ranges of "bowring" and "biasi". Throws UnknownCorrelation.
ChfFlags applicability_check(std::string_view correlation, const CorrelationInputs& inputs);

}  // namespace chf
