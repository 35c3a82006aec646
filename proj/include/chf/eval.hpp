#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chf/lut.hpp"
#include "chf/nn.hpp"
#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf {

using MeasuredPredicted = std::pair<double, double>;

/// 100 * sqrt(mean(((predicted - measured) / measured)^2)). Terms are summed
/// smallest first with compensation, so the value does not depend on the
/// order of the pairs. Throws EmptyInput, NonPositiveMeasured.
double rmse_percent(std::span<const MeasuredPredicted> pairs);

enum class Metric {
  relative,    ///< rmse_percent
  log_ratio,   ///< 100 * sqrt(mean(ln(predicted / measured)^2))
  normalized,  ///< 100 * sqrt(mean((predicted - measured)^2)) / mean(measured)
};
std::optional<Metric> parse_metric(std::string_view name);
std::string_view to_string(Metric metric);
double metric_percent(Metric metric, std::span<const MeasuredPredicted> pairs);

/// What is compared against the measurement.
enum class Convention {
  /// Heat flux: <HeatFlux> for uniform cases, the local flux at
  /// <CHFLocation> for non-uniform ones.
  local_flux,
  /// Total power at the critical condition against <Power>.
  critical_power,
};
std::optional<Convention> parse_convention(std::string_view name);
std::string_view to_string(Convention convention);

/// Measured value of a case under a convention.
double measured_value(const TestCase& test_case, Convention convention);

struct CasePrediction {
  std::optional<double> value;     ///< empty when skipped
  std::optional<double> location;  ///< predicted CHF location [m]
  std::string skip_reason;         ///< set when value is empty
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string id() const = 0;
  /// Must be safe to call concurrently.
  virtual CasePrediction predict(const TestCase& test_case, Convention convention) const = 0;
};

struct PredictorOptions {
  const LutTable* table = nullptr;  ///< required by "lut"
  const NnModel* network = nullptr;  ///< required by "nn"
  CriticalPowerConfig lut;
  const WaterProperties* water = nullptr;  ///< null selects the bundled tables
};

/// "bowring", "biasi", "lut" or "nn". Throws UnknownModel, or
/// InvariantError when a required table/network is missing.
std::unique_ptr<Predictor> make_predictor(std::string_view model_id, const PredictorOptions& options = {});

struct CaseResult {
  std::size_t index = 0;  ///< position in the dataset
  long long test_id = 0;
  double measured = 0.0;
  double predicted = 0.0;
  double relative_error = 0.0;  ///< (predicted - measured) / measured
  std::optional<double> measured_location;
  std::optional<double> predicted_location;
};

struct SkippedCase {
  std::size_t index = 0;
  long long test_id = 0;
  double measured = 0.0;
  std::string reason;
};

struct EvalReport {
  std::string model_id;
  std::string subset;  ///< "uniform", "non-uniform" or "mixed"
  Metric metric = Metric::relative;
  Convention convention = Convention::local_flux;
  std::size_t n_cases = 0;
  std::size_t n_skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::optional<double> rmse_percent;  ///< under `metric`; empty when nothing was evaluated
  std::optional<double> mean_relative_error;
  std::optional<double> location_mae;  ///< [m]
  std::vector<CaseResult> per_case;
  std::vector<SkippedCase> skipped;
};

struct EvalOptions {
  Metric metric = Metric::relative;
  Convention convention = Convention::local_flux;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Runs the predictor over every case (in parallel) and assembles the report
/// in dataset order.
EvalReport evaluate_model(const Predictor& predictor, std::span<const TestCase> dataset, const EvalOptions& options = {});

/// Per-case CSV (one row per dataset case, skipped rows flagged), JSON summary
/// and an SVG parity plot. Throws IoError.
std::string parity_csv(const EvalReport& report);
std::string summary_json(const EvalReport& report);
std::string parity_svg(const EvalReport& report);
/// Writes <model>_parity.csv, <model>_summary.json and <model>_parity.svg.
std::vector<std::filesystem::path> export_parity(const EvalReport& report, const std::filesystem::path& out_dir);

}  // namespace chf
