#include "chf/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <thread>

#include "chf/channel.hpp"
#include "chf/dataset_io.hpp"
#include "chf/digitizer.hpp"
#include "chf/errors.hpp"
#include "chf/eval.hpp"
#include "chf/lut.hpp"
#include "chf/nn.hpp"
#include "text.hpp"

namespace chf::cli {
namespace {

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::vector<std::string> data;
  bool permissive = false;
  std::string model;
  std::string lut_file;
  std::string model_file;
  std::string out;
  std::string metric = "relative";
  std::string convention = "local_flux";
  std::string mode = "heat_balance";
  bool no_axial = false;
  bool no_diameter = false;
  bool clamp_quality = false;
  double tolerance = 1e-4;
  unsigned threads = 0;
  long long case_id = -1;

  // digitize
  std::string points;
  double length = 0.0;
  double perimeter = 0.0;
  double q_av = 0.0;
  double power = 0.0;
  std::size_t nodes = 40;
  std::vector<double> breakpoints;
  bool discontinuous = false;
  std::string shape = "other";
  double threshold = 0.02;
  double outlier_k = 3.5;

  // train
  std::uint64_t seed = 42;
  int epochs = 2000;
  double validation_fraction = 0.2;
  std::string history;

  // plot-data
  std::string parity;
};

std::vector<TestCase> load_cases(const Options& o) {
  ParseOptions po;
  po.permissive = o.permissive;
  std::vector<TestCase> all;
  for (const auto& path : o.data) {
    auto cases = read_dataset_file(path, po);
    all.insert(all.end(), std::make_move_iterator(cases.begin()), std::make_move_iterator(cases.end()));
  }
  return all;
}

void write_text(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << body;
  if (!f) throw IoError(fmt::format("cannot write {}", path));
}

CriticalPowerConfig lut_config(const Options& o) {
  CriticalPowerConfig cfg;
  cfg.axial.enabled = !o.no_axial;
  cfg.diameter_correction = !o.no_diameter;
  cfg.quality_policy = o.clamp_quality ? QualityPolicy::clamp : QualityPolicy::error;
  cfg.tolerance = o.tolerance;
  if (o.mode == "direct" || o.mode == "direct_substitution") {
    cfg.mode = SearchMode::direct_substitution;
  } else if (o.mode != "heat_balance") {
    throw UsageError(fmt::format("--mode must be heat_balance or direct, got '{}'", o.mode));
  }
  return cfg;
}

struct LoadedPredictor {
  std::optional<LutTable> table;
  std::optional<NnModel> network;
  std::unique_ptr<Predictor> predictor;
};

LoadedPredictor load_predictor(const Options& o) {
  LoadedPredictor lp;
  if (o.model == "lut") {
    if (o.lut_file.empty()) throw UsageError("--model lut requires --lut-file");
    lp.table = load_table(o.lut_file);
  } else if (o.model == "nn") {
    if (o.model_file.empty()) throw UsageError("--model nn requires --model-file");
    lp.network = load_model(o.model_file);
  } else if (o.model != "bowring" && o.model != "biasi") {
    throw UsageError(fmt::format("--model must be bowring, biasi, lut or nn, got '{}'", o.model));
  }
  PredictorOptions po;
  po.table = lp.table ? &*lp.table : nullptr;
  po.network = lp.network ? &*lp.network : nullptr;
  po.lut = lut_config(o);
  lp.predictor = make_predictor(o.model, po);
  return lp;
}

EvalOptions eval_options(const Options& o) {
  EvalOptions eo;
  auto metric = parse_metric(o.metric);
  if (!metric) throw UsageError(fmt::format("--metric must be relative, log_ratio or normalized, got '{}'", o.metric));
  auto conv = parse_convention(o.convention);
  if (!conv) throw UsageError(fmt::format("--convention must be local_flux or critical_power, got '{}'", o.convention));
  eo.metric = *metric;
  eo.convention = *conv;
  eo.threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  return eo;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::size_t n_cases = 0, n_errors = 0, n_warnings = 0;
  ParseOptions po;
  po.permissive = o.permissive;
  for (const auto& path : o.data) {
    std::vector<TestCase> cases;
    try {
      cases = read_dataset_file(path, po);
    } catch (const SyntaxError& e) {
      err << fmt::format("{}: {}\n", path, e.what());
      ++n_errors;
      continue;
    } catch (const SchemaError& e) {
      err << fmt::format("{}: {}\n", path, e.what());
      ++n_errors;
      continue;
    } catch (const UnitError& e) {
      err << fmt::format("{}: {}\n", path, e.what());
      ++n_errors;
      continue;
    }
    for (const auto& c : cases) {
      ++n_cases;
      for (const auto& f : validate_case(c, Envelope::collected(c.heating))) {
        const bool is_error = f.severity == Severity::error;
        (is_error ? n_errors : n_warnings)++;
        out << fmt::format("{}\t{}\t{}\t{}\n", f.test_id, is_error ? "error" : "warning", f.rule, f.message);
      }
    }
  }
  if (n_warnings > 0) out << fmt::format("{} warnings\n", n_warnings);
  out << fmt::format("{} cases, {} errors\n", n_cases, n_errors);
  return n_errors == 0 ? kExitOk : kExitValidation;
}

int cmd_quality(const Options& o, std::ostream& out) {
  std::string body = "test_id,z,enthalpy,quality\n";
  for (const auto& c : load_cases(o)) {
    if (o.case_id >= 0 && c.test_id != o.case_id) continue;
    const QualityProfile qp = quality_profile(c);
    for (std::size_t i = 0; i < qp.z.size(); ++i) body += fmt::format("{},{},{},{}\n", c.test_id, qp.z[i], qp.h[i], qp.x[i]);
  }
  write_text(o.out, body, out);
  return kExitOk;
}

int cmd_digitize(const Options& o, std::ostream& out) {
  RawCurve curve;
  curve.points = read_points(o.points);
  curve.length = o.length;
  curve.perimeter = o.perimeter;
  OutlierPolicy op;
  op.k = o.outlier_k;
  const std::size_t dropped = count_outliers(curve, op);
  const RawCurve filtered = filter_outliers(curve, op);
  ResamplePolicy rp;
  rp.n_nodes = o.nodes;
  rp.continuous = !o.discontinuous;
  rp.breakpoints = o.breakpoints;
  auto shape = parse_shape(o.shape);
  rp.shape = shape.value_or(ProfileShape::other);
  AxialProfile prof = resample_profile(filtered, rp);
  prof.shape_label = o.shape;

  std::string frag = "<WallPower>";
  for (std::size_t i = 0; i < prof.wall_power.size(); ++i) frag += fmt::format("{}{}", i ? " " : "", prof.wall_power[i]);
  frag += "</WallPower>\n<WallMesh>";
  for (std::size_t i = 0; i < prof.wall_mesh.size(); ++i) frag += fmt::format("{}{}", i ? " " : "", prof.wall_mesh[i]);
  frag += fmt::format("</WallMesh>\n<Shape>{}</Shape>\n<Continuous>{}</Continuous>\n", o.shape,
                      prof.continuous ? "yes" : "no");
  write_text(o.out, frag, out);

  out << fmt::format("points read: {}, outliers removed: {}\n", curve.points.size(), dropped);
  if (o.q_av > 0.0 && o.power > 0.0) {
    const EnergyBalance eb = energy_balance_check(prof, o.q_av, o.perimeter, o.power, o.threshold);
    out << fmt::format("energy balance: computed {} W, declared {} W, discrepancy {:.4f}% -> {}\n", eb.computed_power,
                       o.power, 100.0 * eb.discrepancy, eb.pass ? "pass" : "fail");
    return eb.pass ? kExitOk : kExitValidation;
  }
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  auto lp = load_predictor(o);
  const auto cases = load_cases(o);
  const EvalReport rep = evaluate_model(*lp.predictor, cases, eval_options(o));
  write_text(o.out, parity_csv(rep), out);
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("evaluate requires --out <directory>");
  auto lp = load_predictor(o);
  const auto cases = load_cases(o);
  const EvalReport rep = evaluate_model(*lp.predictor, cases, eval_options(o));
  for (const auto& p : export_parity(rep, o.out)) out << p.string() << '\n';
  out << fmt::format("{}: {} cases, {} skipped, RMSE {}\n", rep.model_id, rep.n_cases, rep.n_skipped,
                     rep.rmse_percent ? fmt::format("{:.2f}%", *rep.rmse_percent) : std::string("n/a"));
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("train requires --out <model file>");
  const auto cases = load_cases(o);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cases.size()), kFeatureCount);
  Eigen::VectorXd y(static_cast<Eigen::Index>(cases.size()));
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto f = case_features(cases[i]);
    for (int j = 0; j < kFeatureCount; ++j) x(static_cast<Eigen::Index>(i), j) = f[static_cast<std::size_t>(j)];
    y(static_cast<Eigen::Index>(i)) = measured_value(cases[i], Convention::local_flux);
  }
  TrainConfig cfg;
  cfg.seed = o.seed;
  cfg.max_epochs = o.epochs;
  cfg.validation_fraction = o.validation_fraction;
  const TrainResult r = train(init_model(o.seed), x, y, cfg);
  save_model(r.model, o.out);
  if (!o.history.empty()) {
    std::string body = "epoch,train_loss,validation_loss,learning_rate\n";
    for (std::size_t e = 0; e < r.history.size(); ++e) {
      body += fmt::format("{},{},{},{}\n", e + 1, r.history[e].train_loss, r.history[e].validation_loss,
                          r.history[e].learning_rate);
    }
    write_text(o.history, body, out);
  }
  out << fmt::format("trained {} epochs (best {}), validation loss {}\n", r.history.size(), r.best_epoch + 1,
                     r.history[static_cast<std::size_t>(r.best_epoch)].validation_loss);
  return kExitOk;
}

/// Re-renders the scatter of an exported parity table.
int cmd_plot_data(const Options& o, std::ostream& out) {
  EvalReport rep;
  rep.model_id = std::filesystem::path(o.parity).stem().string();
  std::vector<MeasuredPredicted> pairs;
  bool header = true;
  text::for_each_line(text::read_file(o.parity), [&](long line_no, std::string_view line) {
    if (header) {
      header = false;
      return;
    }
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cols.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (cols.size() < 5) throw FormatError(fmt::format("{} line {}: expected a parity table row", o.parity, line_no));
    if (cols[4] == "1") {
      ++rep.n_skipped;
      return;
    }
    CaseResult r;
    auto id = text::to_integer(cols[0]);
    auto m = text::to_double(cols[1]);
    auto p = text::to_double(cols[2]);
    if (!id || !m || !p) throw FormatError(fmt::format("{} line {}: bad number", o.parity, line_no));
    r.test_id = *id;
    r.measured = *m;
    r.predicted = *p;
    r.relative_error = (*p - *m) / *m;
    pairs.emplace_back(*m, *p);
    rep.per_case.push_back(r);
  });
  rep.n_cases = rep.per_case.size();
  rep.subset = "data";
  if (!pairs.empty()) rep.rmse_percent = rmse_percent(pairs);
  write_text(o.out, parity_svg(rep), out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical heat flux toolkit: dataset checks, predictions and evaluation", "chfkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with default option values")->envname("CHFKIT_CONFIG");
  Options o;

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "Dataset XML file(s)")->required()->check(CLI::ExistingFile);
    sub->add_flag("--permissive", o.permissive, "Accept any root element and unknown leaves");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "bowring, biasi, lut or nn")->required();
    sub->add_option("--lut-file", o.lut_file, "Lookup table file (required for --model lut)")->check(CLI::ExistingFile);
    sub->add_option("--model-file", o.model_file, "Trained network (required for --model nn)")->check(CLI::ExistingFile);
    sub->add_option("--metric", o.metric, "relative, log_ratio or normalized");
    sub->add_option("--convention", o.convention, "local_flux or critical_power");
    sub->add_option("--mode", o.mode, "LUT search: heat_balance or direct");
    sub->add_flag("--no-axial", o.no_axial, "Disable the axial flux-shape factor");
    sub->add_flag("--no-diameter", o.no_diameter, "Disable the LUT diameter correction");
    sub->add_flag("--clamp-quality", o.clamp_quality, "Clamp LUT quality queries to the table range");
    sub->add_option("--tolerance", o.tolerance, "Bisection tolerance on min CHFR - 1");
    sub->add_option("--threads", o.threads, "Worker threads (default: all cores)");
  };

  auto* validate = app.add_subcommand("validate", "Parse datasets and report validation findings");
  add_data(validate);

  auto* quality = app.add_subcommand("quality", "Dump enthalpy and quality profiles");
  add_data(quality);
  quality->add_option("--case", o.case_id, "Only this TestID");
  quality->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* digitize = app.add_subcommand("digitize", "Filter and resample a clicked axial-flux curve");
  digitize->add_option("--points", o.points, "z,q point file")->required()->check(CLI::ExistingFile);
  digitize->add_option("--length", o.length, "Heated length [m]")->required();
  digitize->add_option("--perimeter", o.perimeter, "Heated perimeter [m]");
  digitize->add_option("--q-av", o.q_av, "Average heat flux [W/m2] for the energy gate");
  digitize->add_option("--power", o.power, "Declared power [W] for the energy gate");
  digitize->add_option("--nodes", o.nodes, "Resampled node count");
  digitize->add_option("--breakpoint", o.breakpoints, "Jump position [m]; repeatable");
  digitize->add_flag("--discontinuous", o.discontinuous, "Mark the profile discontinuous");
  digitize->add_option("--shape", o.shape, "Shape label");
  digitize->add_option("--threshold", o.threshold, "Energy gate threshold");
  digitize->add_option("--outlier-k", o.outlier_k, "Outlier threshold");
  digitize->add_option("--out", o.out, "Profile fragment output (default stdout)");

  auto* predict = app.add_subcommand("predict", "Per-case predictions as CSV");
  add_data(predict);
  add_model(predict);
  predict->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* train = app.add_subcommand("train", "Train the network on a dataset");
  add_data(train);
  train->add_option("--out", o.out, "Model file to write")->required();
  train->add_option("--seed", o.seed, "Initialization, split and shuffle seed");
  train->add_option("--epochs", o.epochs, "Maximum epochs");
  train->add_option("--validation-fraction", o.validation_fraction, "Held-out fraction");
  train->add_option("--history", o.history, "Per-epoch loss CSV");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model and write report files");
  add_data(evaluate);
  add_model(evaluate);
  evaluate->add_option("--out", o.out, "Report directory")->required();

  auto* plot = app.add_subcommand("plot-data", "Render a parity CSV as SVG");
  plot->add_option("--parity", o.parity, "Parity CSV from evaluate/predict")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", o.out, "SVG output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (quality->parsed()) return cmd_quality(o, out);
    if (digitize->parsed()) return cmd_digitize(o, out);
    if (predict->parsed()) return cmd_predict(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (plot->parsed()) return cmd_plot_data(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace chf::cli
