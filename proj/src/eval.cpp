#include "chf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include "json.hpp"
#include <thread>

#include "chf/channel.hpp"
#include "chf/correlations.hpp"
#include "chf/errors.hpp"

namespace chf {
namespace {

/// Neumaier sum of the terms taken in ascending order.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

void check_pairs(std::span<const MeasuredPredicted> pairs) {
  if (pairs.empty()) throw EmptyInput("no (measured, predicted) pairs");
  for (const auto& [m, p] : pairs) {
    if (!(m > 0.0)) throw NonPositiveMeasured(fmt::format("measured value {} is not positive", m));
  }
}

}  // namespace

double rmse_percent(std::span<const MeasuredPredicted> pairs) { return metric_percent(Metric::relative, pairs); }

double metric_percent(Metric metric, std::span<const MeasuredPredicted> pairs) {
  check_pairs(pairs);
  const double n = static_cast<double>(pairs.size());
  std::vector<double> terms;
  terms.reserve(pairs.size());
  switch (metric) {
    case Metric::relative:
      for (const auto& [m, p] : pairs) terms.push_back(((p - m) / m) * ((p - m) / m));
      return 100.0 * std::sqrt(ordered_sum(std::move(terms)) / n);
    case Metric::log_ratio:
      for (const auto& [m, p] : pairs) {
        if (!(p > 0.0)) throw NonPositiveMeasured("log-ratio metric needs positive predictions");
        const double l = std::log(p / m);
        terms.push_back(l * l);
      }
      return 100.0 * std::sqrt(ordered_sum(std::move(terms)) / n);
    case Metric::normalized: {
      std::vector<double> measured;
      for (const auto& [m, p] : pairs) {
        terms.push_back((p - m) * (p - m));
        measured.push_back(m);
      }
      const double mean = ordered_sum(std::move(measured)) / n;
      return 100.0 * std::sqrt(ordered_sum(std::move(terms)) / n) / mean;
    }
  }
  return 0.0;
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "relative") return Metric::relative;
  if (name == "log_ratio" || name == "log-ratio") return Metric::log_ratio;
  if (name == "normalized") return Metric::normalized;
  return std::nullopt;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::relative: return "relative";
    case Metric::log_ratio: return "log_ratio";
    case Metric::normalized: return "normalized";
  }
  return "relative";
}

std::optional<Convention> parse_convention(std::string_view name) {
  if (name == "local_flux" || name == "local-flux") return Convention::local_flux;
  if (name == "critical_power" || name == "critical-power") return Convention::critical_power;
  return std::nullopt;
}

std::string_view to_string(Convention convention) {
  return convention == Convention::local_flux ? "local_flux" : "critical_power";
}

double measured_value(const TestCase& c, Convention convention) {
  if (convention == Convention::critical_power) return c.power;
  if (c.heating == Heating::uniform) return c.heat_flux_avg;
  return c.local_heat_flux(c.measured_chf_location());
}

namespace {

const WaterProperties& water_of(const PredictorOptions& o) { return o.water ? *o.water : WaterProperties::bundled(); }

CasePrediction skip(std::string reason) { return {std::nullopt, std::nullopt, std::move(reason)}; }

double local_quality(const TestCase& c, const WaterProperties& water, double z) {
  const QualityProfile qp = quality_profile(c, water);
  return interpolate_nodal(qp.z, qp.x, z);
}

class BowringPredictor : public Predictor {
 public:
  explicit BowringPredictor(const WaterProperties& water) : water_(water) {}
  std::string id() const override { return "bowring"; }
  CasePrediction predict(const TestCase& c, Convention convention) const override {
    const double h_in = resolve_inlet_enthalpy(c, water_);
    const double h_f = water_.saturation_state(c.pressure).h_f;
    const ChfPrediction r = bowring_chf(c.pressure, c.mass_flux, c.diameter, c.length, h_f - h_in, water_);
    if (!r.applicable()) return skip("negative_raw_output");
    // The inlet-conditions form predicts the critical average flux; a
    // non-uniform shape only redistributes it.
    if (convention == Convention::critical_power) return {*r.chf * c.perimeter * c.profile.integral(), std::nullopt, {}};
    if (c.heating == Heating::uniform) return {*r.chf, std::nullopt, {}};
    return {*r.chf * c.profile.value_at(c.measured_chf_location()), std::nullopt, {}};
  }

 private:
  const WaterProperties& water_;
};

class BiasiPredictor : public Predictor {
 public:
  explicit BiasiPredictor(const WaterProperties& water) : water_(water) {}
  std::string id() const override { return "biasi"; }
  CasePrediction predict(const TestCase& c, Convention convention) const override {
    if (convention == Convention::critical_power) {
      CriticalPowerConfig cfg;
      cfg.axial.enabled = false;
      LocalChfModel model = [&](double p, double g, double x, double) {
        return biasi_chf(c.diameter, g, p, x).raw_chf;
      };
      const CriticalPowerResult r = critical_power_search(c, model, cfg, water_);
      return {r.critical_power, r.chf_location, {}};
    }
    const double x = local_quality(c, water_, c.measured_chf_location());
    const ChfPrediction r = biasi_chf(c.diameter, c.mass_flux, c.pressure, x);
    if (!r.applicable()) return skip("negative_raw_output");
    return {*r.chf, std::nullopt, {}};
  }

 private:
  const WaterProperties& water_;
};

class LutPredictor : public Predictor {
 public:
  LutPredictor(const LutTable& table, CriticalPowerConfig cfg, const WaterProperties& water)
      : table_(table), cfg_(std::move(cfg)), water_(water) {}
  std::string id() const override { return "lut"; }
  CasePrediction predict(const TestCase& c, Convention convention) const override {
    if (cfg_.mode == SearchMode::direct_substitution && convention == Convention::local_flux) {
      return {direct_local_chf(c, table_, c.measured_chf_location(), cfg_, water_), std::nullopt, {}};
    }
    const CriticalPowerResult r = predict_critical_power(c, table_, cfg_, water_);
    if (convention == Convention::critical_power) return {r.critical_power, r.chf_location, {}};
    return {r.power_multiplier * c.local_heat_flux(r.chf_location), r.chf_location, {}};
  }

 private:
  const LutTable& table_;
  CriticalPowerConfig cfg_;
  const WaterProperties& water_;
};

class NnPredictor : public Predictor {
 public:
  NnPredictor(const NnModel& model, const WaterProperties& water) : model_(model), water_(water) {}
  std::string id() const override { return "nn"; }
  CasePrediction predict(const TestCase& c, Convention convention) const override {
    if (convention != Convention::local_flux) return skip("convention_unsupported");
    const auto f = case_features(c, water_);
    Eigen::MatrixXd x(1, kFeatureCount);
    for (int i = 0; i < kFeatureCount; ++i) x(0, i) = f[static_cast<std::size_t>(i)];
    const double y = chf::predict(model_, x)(0);
    if (!(y > 0.0)) return skip("negative_raw_output");
    return {y, std::nullopt, {}};
  }

 private:
  const NnModel& model_;
  const WaterProperties& water_;
};

CasePrediction guarded(const Predictor& p, const TestCase& c, Convention convention) {
  try {
    return p.predict(c, convention);
  } catch (const OutOfTable&) {
    return skip("out_of_table");
  } catch (const NoConvergence&) {
    return skip("no_convergence");
  } catch (const PropertyError&) {
    return skip("out_of_range");
  } catch (const Error&) {
    return skip("error");
  }
}

}  // namespace

std::unique_ptr<Predictor> make_predictor(std::string_view model_id, const PredictorOptions& o) {
  const WaterProperties& water = water_of(o);
  if (model_id == "bowring") return std::make_unique<BowringPredictor>(water);
  if (model_id == "biasi") return std::make_unique<BiasiPredictor>(water);
  if (model_id == "lut") {
    if (!o.table) throw InvariantError("the lut model needs a lookup table");
    return std::make_unique<LutPredictor>(*o.table, o.lut, water);
  }
  if (model_id == "nn") {
    if (!o.network) throw InvariantError("the nn model needs a trained network");
    return std::make_unique<NnPredictor>(*o.network, water);
  }
  throw UnknownModel(fmt::format("unknown model '{}' (expected bowring, biasi, lut or nn)", model_id));
}

EvalReport evaluate_model(const Predictor& predictor, std::span<const TestCase> dataset, const EvalOptions& options) {
  std::vector<CasePrediction> out(dataset.size());
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, dataset.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < dataset.size(); i = next++) out[i] = guarded(predictor, dataset[i], options.convention);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  EvalReport rep;
  rep.model_id = predictor.id();
  rep.metric = options.metric;
  rep.convention = options.convention;
  bool any_uniform = false, any_non_uniform = false;
  std::vector<MeasuredPredicted> pairs;
  std::vector<double> rel, loc_err;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const TestCase& c = dataset[i];
    (c.heating == Heating::uniform ? any_uniform : any_non_uniform) = true;
    const double measured = measured_value(c, options.convention);
    if (!out[i].value) {
      rep.skipped.push_back({i, c.test_id, measured, out[i].skip_reason});
      ++rep.skip_reasons[out[i].skip_reason];
      continue;
    }
    CaseResult r;
    r.index = i;
    r.test_id = c.test_id;
    r.measured = measured;
    r.predicted = *out[i].value;
    r.relative_error = (r.predicted - measured) / measured;
    if (c.heating == Heating::non_uniform) r.measured_location = c.measured_chf_location();
    r.predicted_location = out[i].location;
    if (r.measured_location && r.predicted_location) loc_err.push_back(std::abs(*r.predicted_location - *r.measured_location));
    pairs.emplace_back(measured, r.predicted);
    rel.push_back(r.relative_error);
    rep.per_case.push_back(std::move(r));
  }
  rep.subset = any_uniform && any_non_uniform ? "mixed" : (any_non_uniform ? "non-uniform" : "uniform");
  rep.n_cases = rep.per_case.size();
  rep.n_skipped = rep.skipped.size();
  if (!pairs.empty()) {
    rep.rmse_percent = metric_percent(options.metric, pairs);
    rep.mean_relative_error = ordered_sum(rel) / static_cast<double>(rel.size());
  }
  if (!loc_err.empty()) rep.location_mae = ordered_sum(loc_err) / static_cast<double>(loc_err.size());
  return rep;
}

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string parity_csv(const EvalReport& rep) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  for (const auto& r : rep.per_case) {
    lines.emplace_back(r.index, fmt::format("{},{},{},{},0,,{},{}", r.test_id, r.measured, r.predicted, r.relative_error,
                                            opt_num(r.measured_location), opt_num(r.predicted_location)));
  }
  for (const auto& s : rep.skipped) {
    lines.emplace_back(s.index, fmt::format("{},{},,,1,{},,", s.test_id, s.measured, s.reason));
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "test_id,measured,predicted,relative_error,skipped,skip_reason,measured_location,predicted_location\n";
  for (const auto& [i, line] : lines) out += line + '\n';
  return out;
}

std::string summary_json(const EvalReport& rep) {
  nlohmann::json j;
  j["model_id"] = rep.model_id;
  j["subset"] = rep.subset;
  j["metric"] = std::string(to_string(rep.metric));
  j["convention"] = std::string(to_string(rep.convention));
  j["n_cases"] = rep.n_cases;
  j["n_skipped"] = rep.n_skipped;
  j["skip_reasons"] = rep.skip_reasons;
  j["rmse_percent"] = opt_json(rep.rmse_percent);
  j["mean_relative_error"] = opt_json(rep.mean_relative_error);
  j["location_mae"] = opt_json(rep.location_mae);
  return j.dump(2) + "\n";
}

std::string parity_svg(const EvalReport& rep) {
  constexpr double size = 480.0, margin = 60.0;
  double hi = 0.0;
  for (const auto& r : rep.per_case) hi = std::max({hi, r.measured, r.predicted});
  if (!(hi > 0.0)) hi = 1.0;
  hi *= 1.05;
  const double plot = size - 2.0 * margin;
  auto px = [&](double v) { return margin + plot * v / hi; };
  auto py = [&](double v) { return size - margin - plot * v / hi; };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<rect x=\"{1}\" y=\"{1}\" width=\"{2}\" height=\"{2}\" fill=\"none\" stroke=\"black\"/>\n",
      size, margin, plot);
  auto line = [&](double slope, const char* dash) {
    const double x_end = std::min(hi, hi / slope);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\"{}/>\n", px(0), py(0),
                     px(x_end), py(slope * x_end), dash);
  };
  line(1.0, "");
  if (rep.rmse_percent && rep.metric == Metric::relative) {
    const double band = *rep.rmse_percent / 100.0;
    line(1.0 + band, " stroke-dasharray=\"6 4\"");
    if (band < 1.0) line(1.0 - band, " stroke-dasharray=\"6 4\"");
  }
  for (const auto& r : rep.per_case) {
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n",
                     px(r.measured), py(r.predicted));
  }
  const char* unit = rep.convention == Convention::critical_power ? "W" : "W/m2";
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"14\">measured [{}]</text>\n",
                   size / 2, size - 20.0, unit);
  s += fmt::format(
      "<text x=\"20\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 {:.1f})\">"
      "predicted [{}]</text>\n",
      size / 2, size / 2, unit);
  s += fmt::format("<text x=\"{:.1f}\" y=\"30\" text-anchor=\"middle\" font-size=\"14\">{} ({}): RMSE {}</text>\n",
                   size / 2, rep.model_id, rep.subset,
                   rep.rmse_percent ? fmt::format("{:.1f}%", *rep.rmse_percent) : std::string("n/a"));
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">0</text>\n", margin - 4, size - margin + 14);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n",
                   size - margin, size - margin + 14, hi);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n", margin - 4,
                   margin + 4, hi);
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> export_parity(const EvalReport& rep, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
  const std::vector<std::pair<std::string, std::string>> files = {
      {rep.model_id + "_parity.csv", parity_csv(rep)},
      {rep.model_id + "_summary.json", summary_json(rep)},
      {rep.model_id + "_parity.svg", parity_svg(rep)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, body] : files) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
    written.push_back(path);
  }
  return written;
}

}  // namespace chf
