#include "chf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <numeric>

#include "chf/channel.hpp"
#include "chf/errors.hpp"

namespace chf {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u == 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double t = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

std::size_t NnModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

std::vector<double> NnModel::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) out.push_back(weights[l](r, c));
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) out.push_back(biases[l](r));
  }
  return out;
}

void NnModel::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw ShapeError("parameter vector length does not match the model");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) weights[l](r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = values[k++];
  }
}

NnModel init_model(std::uint64_t seed, std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1) throw ShapeError("network needs >= 2 layers and one output");
  NnModel m;
  m.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  m.seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l], out = layer_sizes[l + 1];
    if (in <= 0 || out <= 0) throw ShapeError("layer sizes must be positive");
    Eigen::MatrixXd w(out, in);
    const double sd = std::sqrt(2.0 / in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) w(r, c) = sd * rng.normal();
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  m.input_mean = Eigen::VectorXd::Zero(layer_sizes.front());
  m.input_scale = Eigen::VectorXd::Ones(layer_sizes.front());
  return m;
}

namespace {

void check_features(const NnModel& m, const Eigen::MatrixXd& features) {
  if (features.cols() != m.layer_sizes.front()) {
    throw ShapeError(fmt::format("expected {} features per sample, got {}", m.layer_sizes.front(), features.cols()));
  }
  if (!features.allFinite()) throw NonFiniteInput("non-finite network input");
}

/// Normalized inputs, one sample per column.
Eigen::MatrixXd normalized_inputs(const NnModel& m, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd x = features.transpose();
  x.colwise() -= m.input_mean;
  x.array().colwise() /= m.input_scale.array();
  return x;
}

struct Pass {
  std::vector<Eigen::MatrixXd> a;  // a[0] input, a[l+1] output of layer l
  std::vector<Eigen::MatrixXd> z;  // pre-activations
  Eigen::MatrixXd mask;            // dropout mask after the first hidden layer (empty if none)
};

void forward(const NnModel& m, Eigen::MatrixXd x, Pass& p, double dropout, Rng* rng) {
  const std::size_t n_layers = m.weights.size();
  p.a.assign(1, std::move(x));
  p.z.clear();
  p.mask.resize(0, 0);
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = m.weights[l] * p.a[l];
    z.colwise() += m.biases[l];
    if (l + 1 == n_layers) {
      p.a.push_back(z);
    } else {
      Eigen::MatrixXd a = z.cwiseMax(0.0);
      if (l == 0 && dropout > 0.0 && rng) {
        p.mask.resize(a.rows(), a.cols());
        const double keep = 1.0 / (1.0 - dropout);
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
          for (Eigen::Index r = 0; r < a.rows(); ++r) p.mask(r, c) = rng->uniform() < dropout ? 0.0 : keep;
        }
        a.array() *= p.mask.array();
      }
      p.a.push_back(std::move(a));
    }
    p.z.push_back(std::move(z));
  }
}

/// MSE over the batch; fills per-layer gradients.
double backward(const NnModel& m, const Pass& p, const Eigen::RowVectorXd& target, std::vector<Eigen::MatrixXd>& gw,
                std::vector<Eigen::VectorXd>& gb) {
  const std::size_t n_layers = m.weights.size();
  const double batch = static_cast<double>(target.size());
  Eigen::MatrixXd d = p.a.back() - target;
  const double loss = d.squaredNorm() / batch;
  d *= 2.0 / batch;
  gw.resize(n_layers);
  gb.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    gw[l] = d * p.a[l].transpose();
    gb[l] = d.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd da = m.weights[l].transpose() * d;
    da.array() *= (p.z[l - 1].array() > 0.0).cast<double>();
    if (l == 1 && p.mask.size() > 0) da.array() *= p.mask.array();
    d = std::move(da);
  }
  return loss;
}

Eigen::RowVectorXd normalized_targets(const NnModel& m, const Eigen::VectorXd& targets) {
  return ((targets.array() - m.output_mean) / m.output_scale).matrix().transpose();
}

void flatten(const std::vector<Eigen::MatrixXd>& gw, const std::vector<Eigen::VectorXd>& gb, std::vector<double>& out) {
  out.clear();
  for (std::size_t l = 0; l < gw.size(); ++l) {
    for (Eigen::Index r = 0; r < gw[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < gw[l].cols(); ++c) out.push_back(gw[l](r, c));
    }
    for (Eigen::Index r = 0; r < gb[l].size(); ++r) out.push_back(gb[l](r));
  }
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx, std::size_t begin,
                        std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), x.cols());
  for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx, std::size_t begin,
                           std::size_t end) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) out(static_cast<Eigen::Index>(i - begin)) = y(static_cast<Eigen::Index>(idx[i]));
  return out;
}

double eval_loss(const NnModel& m, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  Pass p;
  forward(m, normalized_inputs(m, features), p, 0.0, nullptr);
  return (p.a.back() - normalized_targets(m, targets)).squaredNorm() / static_cast<double>(targets.size());
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

Eigen::VectorXd predict(const NnModel& model, const Eigen::MatrixXd& features) {
  check_features(model, features);
  Pass p;
  forward(model, normalized_inputs(model, features), p, 0.0, nullptr);
  return (p.a.back().transpose().array() * model.output_scale + model.output_mean).matrix();
}

void fit_normalization(NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  check_features(model, features);
  const double n = static_cast<double>(features.rows());
  model.input_mean = features.colwise().mean().transpose();
  model.input_scale.resize(features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const double sd = std::sqrt((features.col(c).array() - model.input_mean(c)).square().sum() / n);
    model.input_scale(c) = sd > 0.0 ? sd : 1.0;
  }
  model.output_mean = targets.mean();
  const double sd = std::sqrt((targets.array() - model.output_mean).square().sum() / n);
  model.output_scale = sd > 0.0 ? sd : 1.0;
}

double PlateauScheduler::step(double loss) {
  if (loss < best_) {
    best_ = loss;
    wait_ = 0;
  } else if (++wait_ >= patience_) {
    lr_ = std::max(lr_ * factor_, min_lr_);
    wait_ = 0;
  }
  return lr_;
}

void split_indices(std::size_t n, double validation_fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                   std::vector<std::size_t>& validation) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  shuffle(idx, rng);
  std::size_t n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = n - 1;
  validation.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(validation.begin(), validation.end());
  std::sort(train.begin(), train.end());
}

double loss_and_gradient(const NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                         std::vector<double>& gradient) {
  check_features(model, features);
  Pass p;
  forward(model, normalized_inputs(model, features), p, 0.0, nullptr);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  const double loss = backward(model, p, normalized_targets(model, targets), gw, gb);
  flatten(gw, gb, gradient);
  return loss;
}

TrainResult train(NnModel model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                  const TrainConfig& cfg) {
  if (features.rows() == 0 || targets.size() == 0) throw EmptyDataset("training set is empty");
  if (features.rows() != targets.size()) throw ShapeError("feature and target counts differ");
  check_features(model, features);
  if (!targets.allFinite() || (targets.array() <= 0.0).any()) throw NonFiniteInput("training targets must be finite and positive");
  if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0)) throw InvariantError("dropout rate must be in [0, 1)");
  if (!(cfg.plateau_factor > 0.0 && cfg.plateau_factor < 1.0)) throw InvariantError("decay factor must be in (0, 1)");

  TrainResult res;
  split_indices(static_cast<std::size_t>(features.rows()), cfg.validation_fraction, cfg.seed, res.train_indices,
                res.validation_indices);
  const auto& tr = res.train_indices;
  const Eigen::MatrixXd x_train = rows_of(features, tr, 0, tr.size());
  const Eigen::VectorXd y_train = entries_of(targets, tr, 0, tr.size());
  const Eigen::MatrixXd x_val = rows_of(features, res.validation_indices, 0, res.validation_indices.size());
  const Eigen::VectorXd y_val = entries_of(targets, res.validation_indices, 0, res.validation_indices.size());
  fit_normalization(model, x_train, y_train);

  const Eigen::MatrixXd xn_train = normalized_inputs(model, x_train);
  const Eigen::RowVectorXd yn_train = normalized_targets(model, y_train);

  const std::size_t n_layers = model.weights.size();
  std::vector<Eigen::MatrixXd> mw(n_layers), vw(n_layers), gw;
  std::vector<Eigen::VectorXd> mb(n_layers), vb(n_layers), gb;
  for (std::size_t l = 0; l < n_layers; ++l) {
    mw[l] = vw[l] = Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
    mb[l] = vb[l] = Eigen::VectorXd::Zero(model.biases[l].size());
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double b1t = 1.0, b2t = 1.0;

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  PlateauScheduler sched(cfg.learning_rate, cfg.plateau_patience, cfg.plateau_factor, cfg.min_learning_rate);
  std::vector<std::size_t> order(tr.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);
  double best = std::numeric_limits<double>::infinity();
  res.model = model;
  Pass p;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = sched.learning_rate();
    shuffle(order, rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      Eigen::MatrixXd xb(xn_train.rows(), static_cast<Eigen::Index>(end - start));
      Eigen::RowVectorXd yb(static_cast<Eigen::Index>(end - start));
      for (std::size_t i = start; i < end; ++i) {
        xb.col(static_cast<Eigen::Index>(i - start)) = xn_train.col(static_cast<Eigen::Index>(order[i]));
        yb(static_cast<Eigen::Index>(i - start)) = yn_train(static_cast<Eigen::Index>(order[i]));
      }
      forward(model, std::move(xb), p, cfg.dropout_rate, &rng);
      const double loss = backward(model, p, yb, gw, gb);
      if (!std::isfinite(loss)) throw DivergenceError(fmt::format("training loss became non-finite in epoch {}", epoch + 1));
      loss_sum += loss * static_cast<double>(end - start);

      b1t *= beta1;
      b2t *= beta2;
      const double step = lr * std::sqrt(1.0 - b2t) / (1.0 - b1t);
      for (std::size_t l = 0; l < n_layers; ++l) {
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * gw[l];
        vw[l] = beta2 * vw[l] + (1.0 - beta2) * gw[l].cwiseProduct(gw[l]);
        model.weights[l].array() -= step * mw[l].array() / (vw[l].array().sqrt() + eps);
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * gb[l];
        vb[l] = beta2 * vb[l] + (1.0 - beta2) * gb[l].cwiseProduct(gb[l]);
        model.biases[l].array() -= step * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
    EpochRecord rec;
    rec.learning_rate = lr;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.validation_loss = x_val.rows() > 0 ? eval_loss(model, x_val, y_val) : rec.train_loss;
    if (!std::isfinite(rec.validation_loss)) {
      throw DivergenceError(fmt::format("validation loss became non-finite in epoch {}", epoch + 1));
    }
    double monitored = rec.validation_loss;
    if (cfg.monitored_loss_hook) monitored = cfg.monitored_loss_hook(epoch, monitored);
    res.history.push_back(rec);

    if (monitored < best) {
      best = monitored;
      res.best_epoch = epoch;
      res.model = model;
    }
    sched.step(monitored);
    if (epoch - res.best_epoch >= cfg.early_stop_patience) break;
  }
  return res;
}

double gradient_check(const NnModel& model, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                      const GradientCheckOptions& opt) {
  std::vector<double> grad;
  loss_and_gradient(model, features, targets, grad);
  if (opt.corrupt) opt.corrupt(grad);

  const std::size_t n = grad.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(opt.seed);
  shuffle(idx, rng);
  idx.resize(std::min(n, opt.n_parameters));

  NnModel probe = model;
  std::vector<double> theta = model.flat_parameters();
  double worst = 0.0;
  for (std::size_t k : idx) {
    const double saved = theta[k];
    theta[k] = saved + opt.step;
    probe.set_flat_parameters(theta);
    const double up = eval_loss(probe, features, targets);
    theta[k] = saved - opt.step;
    probe.set_flat_parameters(theta);
    const double down = eval_loss(probe, features, targets);
    theta[k] = saved;
    const double fd = (up - down) / (2.0 * opt.step);
    const double err = std::abs(grad[k] - fd) / std::max({std::abs(grad[k]), std::abs(fd), opt.floor});
    worst = std::max(worst, err);
  }
  return worst;
}

namespace {

constexpr char kMagic[8] = {'C', 'H', 'F', 'N', 'N', 'M', 'D', 'L'};
constexpr std::uint32_t kModelVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

struct Reader {
  std::string_view bytes;
  std::size_t pos = 0;

  template <class T>
  T get() {
    if (bytes.size() - pos < sizeof(T)) throw FormatError("model file truncated");
    T v;
    std::memcpy(&v, bytes.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
};

}  // namespace

std::string serialize_model(const NnModel& m) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.layer_sizes.size()));
  for (int s : m.layer_sizes) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  put<std::uint64_t>(out, m.seed);
  for (Eigen::Index i = 0; i < m.input_mean.size(); ++i) put<double>(out, m.input_mean(i));
  for (Eigen::Index i = 0; i < m.input_scale.size(); ++i) put<double>(out, m.input_scale(i));
  put<double>(out, m.output_mean);
  put<double>(out, m.output_scale);
  for (double v : m.flat_parameters()) put<double>(out, v);
  return out;
}

NnModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a model file (bad magic)");
  }
  Reader r{bytes, sizeof(kMagic)};
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion) {
    throw VersionError(fmt::format("model file version {} is not supported (expected {})", version, kModelVersion));
  }
  const auto n_sizes = r.get<std::uint32_t>();
  if (n_sizes < 2 || n_sizes > 64) throw FormatError(fmt::format("model file declares {} layers", n_sizes));
  std::vector<int> sizes;
  std::size_t n_params = 0;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    const auto s = r.get<std::uint32_t>();
    if (s == 0 || s > 100000) throw FormatError(fmt::format("model file declares a layer of width {}", s));
    sizes.push_back(static_cast<int>(s));
    if (i > 0) n_params += static_cast<std::size_t>(sizes[i - 1]) * s + s;
  }
  if (sizes.back() != 1) throw FormatError("model file output width must be 1");
  const std::size_t expected =
      r.pos + sizeof(std::uint64_t) + sizeof(double) * (2 * static_cast<std::size_t>(sizes.front()) + 2 + n_params);
  if (bytes.size() != expected) {
    throw FormatError(fmt::format("model file holds {} bytes, layer sizes imply {}", bytes.size(), expected));
  }
  NnModel m = init_model(0, sizes);
  m.seed = r.get<std::uint64_t>();
  for (Eigen::Index i = 0; i < m.input_mean.size(); ++i) m.input_mean(i) = r.get<double>();
  for (Eigen::Index i = 0; i < m.input_scale.size(); ++i) m.input_scale(i) = r.get<double>();
  m.output_mean = r.get<double>();
  m.output_scale = r.get<double>();
  if (!(m.output_scale > 0.0) || !(m.input_scale.array() > 0.0).all()) {
    throw FormatError("model file has a non-positive normalization scale");
  }
  std::vector<double> params(n_params);
  for (double& v : params) v = r.get<double>();
  m.set_flat_parameters(params);
  return m;
}

void save_model(const NnModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

NnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

std::array<double, kFeatureCount> case_features(const TestCase& c, const WaterProperties& water) {
  const QualityProfile qp = quality_profile(c, water);
  const double x = interpolate_nodal(qp.z, qp.x, c.measured_chf_location());
  return {c.diameter, c.length, c.pressure, c.mass_flux, x};
}

}  // namespace chf
