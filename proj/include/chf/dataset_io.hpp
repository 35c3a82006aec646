#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf {

/// Reader options.
///
/// Strict mode expects a `<Database>` root holding `<TestCase>` elements and
/// rejects unknown leaves. Permissive mode accepts any root and treats every
/// element with a direct `<TestID>` child as a test case, ignoring unknown
/// leaves and unrecognised `<Shape>` labels.
struct ParseOptions {
  bool permissive = false;
  /// Fill a missing <InletEnthalpy>/<InletTemperature> from the other one.
  bool derive_missing = true;
  const WaterProperties* water = nullptr;  ///< null selects the bundled tables
};

std::vector<TestCase> parse_dataset(std::string_view xml_document, const ParseOptions& options = {});
std::vector<TestCase> read_dataset_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Serializes cases with the benchmark leaf names. Throws InvariantError if
/// any case has an error-severity validation finding.
std::string write_dataset(std::span<const TestCase> cases);
void write_dataset_file(const std::filesystem::path& path, std::span<const TestCase> cases);

/// Expected data envelope; values outside it are suspicious, not fatal.
struct Envelope {
  double pressure_min, pressure_max;    ///< [Pa]
  double mass_flux_min, mass_flux_max;  ///< [kg/m2/s]
  double inlet_quality_min, inlet_quality_max;
  double diameter_min, diameter_max;  ///< [m]
  double length_min, length_max;      ///< [m]

  /// Ranges of the collected uniform / non-uniform tube data.
  static Envelope collected(Heating heating);
};

enum class Severity { error, warning };

struct ValidationFinding {
  long long test_id = 0;
  Severity severity = Severity::error;
  std::string rule;
  std::string message;
};

/// The closed set of rule identifiers validate_case can emit.
std::span<const std::string_view> validation_rules();

/// Returns every violated rule. Range rules are warnings; consistency,
/// positivity, cardinality and profile rules are errors.
std::vector<ValidationFinding> validate_case(const TestCase& test_case, const Envelope& envelope,
                                             const WaterProperties& water = WaterProperties::bundled());
std::vector<ValidationFinding> validate_case(const TestCase& test_case);

/// Relative tolerances of the bookkeeping rules.
inline constexpr double kAreaTolerance = 0.01;
inline constexpr double kMassFlowTolerance = 0.01;
inline constexpr double kPowerTolerance = 0.02;
inline constexpr double kMeshLengthTolerance = 0.001;
inline constexpr double kNormalizationTolerance = 0.02;

inline constexpr std::size_t kNonUniformNodes = 40;
inline constexpr std::size_t kUniformProfileNodes = 2;

}  // namespace chf
