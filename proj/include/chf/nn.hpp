#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include "chf/test_case.hpp"
#include "chf/water_props.hpp"

namespace chf {

/// Hidden and output widths of the default network; inputs are diameter,
/// heated length, pressure, mass flux and equilibrium quality.
inline constexpr std::array<int, 10> kDefaultLayers{5, 61, 51, 28, 39, 26, 21, 20, 14, 1};
inline constexpr int kFeatureCount = 5;

/// Deterministic generator; the same seed gives the same stream on every
/// platform (mt19937_64 plus hand-rolled uniform/normal transforms).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform();
  double normal();
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Fully connected ReLU network with a linear output. Weight matrices are
/// (out x in). Inputs and target are z-scored with the stored statistics.
struct NnModel {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  double output_mean = 0.0;
  double output_scale = 1.0;
  std::uint64_t seed = 0;

  std::size_t parameter_count() const;
  /// Parameters flattened layer by layer, W row-major then b.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
};

/// He-normal weights, zero biases, identity normalization.
NnModel init_model(std::uint64_t seed, std::span<const int> layer_sizes = kDefaultLayers);

/// Raw-unit predictions for a batch (one sample per row). Deterministic, no
/// dropout. Throws ShapeError on a width mismatch and NonFiniteInput on NaN/inf.
Eigen::VectorXd predict(const NnModel& model, const Eigen::MatrixXd& features);

/// Sets input/output statistics (mean, population standard deviation; a
/// zero spread becomes 1) from raw features and targets.
void fit_normalization(NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

struct TrainConfig {
  double learning_rate = 0.01;
  int plateau_patience = 20;
  double plateau_factor = 0.5;
  double min_learning_rate = 1e-5;
  double dropout_rate = 0.01;  ///< after the first hidden layer
  std::size_t batch_size = 64;
  int max_epochs = 2000;
  int early_stop_patience = 100;
  double validation_fraction = 0.2;
  std::uint64_t seed = 42;
  /// Test hook: replaces the monitored validation loss of each epoch.
  std::function<double(int epoch, double loss)> monitored_loss_hook;
};

struct EpochRecord {
  double train_loss = 0.0;
  double validation_loss = 0.0;  ///< equals train_loss when there is no validation split
  double learning_rate = 0.0;    ///< rate used during the epoch
};

struct TrainResult {
  NnModel model;  ///< weights of the best monitored epoch
  std::vector<EpochRecord> history;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
  int best_epoch = 0;
};

/// Reduce-on-plateau schedule: after `patience` epochs without a strict
/// improvement the rate is multiplied by `factor` (floored at `min_lr`).
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, int patience, double factor, double min_lr)
      : lr_(lr), patience_(patience), factor_(factor), min_lr_(min_lr) {}
  /// Feeds one epoch's monitored loss; returns the rate for the next epoch.
  double step(double loss);
  double learning_rate() const noexcept { return lr_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  double min_lr_;
  double best_ = std::numeric_limits<double>::infinity();
  int wait_ = 0;
};

/// Seeded shuffle split; at least one sample stays in training.
void split_indices(std::size_t n, double validation_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                   std::vector<std::size_t>& validation);

/// Adam on the MSE of normalized targets. Normalization statistics are fitted
/// on the training split. Throws EmptyDataset, DivergenceError.
TrainResult train(NnModel model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                  const TrainConfig& config = {});

/// MSE loss on normalized targets and its gradient (flattened like
/// flat_parameters), without dropout.
double loss_and_gradient(const NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                         std::vector<double>& gradient);

struct GradientCheckOptions {
  std::size_t n_parameters = 256;
  double step = 1e-5;
  std::uint64_t seed = 7;
  /// Absolute floor of the relative-error denominator.
  double floor = 1e-6;
  /// Test hook applied to the analytic gradient before comparison.
  std::function<void(std::vector<double>&)> corrupt;
};

/// max |g - g_fd| / max(|g|, |g_fd|, floor) over a random parameter subset.
double gradient_check(const NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                      const GradientCheckOptions& options = {});

/// Binary container, see docs/model_format.md. Throws IoError, FormatError,
/// VersionError.
void save_model(const NnModel& model, const std::filesystem::path& path);
NnModel load_model(const std::filesystem::path& path);
std::string serialize_model(const NnModel& model);
NnModel deserialize_model(std::string_view bytes);

/// Network inputs of a case: diameter, heated length, pressure, mass flux and
/// the equilibrium quality at the measured CHF location.
std::array<double, kFeatureCount> case_features(const TestCase& test_case,
                                                const WaterProperties& water = WaterProperties::bundled());

}  // namespace chf
