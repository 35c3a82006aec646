#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chf/cli.hpp"
#include "chf/dataset_io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace chf;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "chfkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Scratch directory with a small generated dataset.
struct Workspace {
  fs::path dir;
  fs::path data;

  explicit Workspace(const std::string& name, std::size_t n = 25) {
    dir = fs::temp_directory_path() / ("chfkit_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::mt19937_64 rng(8);
    std::vector<TestCase> cases;
    for (std::size_t i = 0; i < n; ++i) {
      cases.push_back(chf::testing::random_valid_case(rng, static_cast<long long>(i + 1), i % 2 == 1));
    }
    data = dir / "cases.xml";
    write_dataset_file(data, cases);
  }
  ~Workspace() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("validate a clean dataset") {
  Workspace ws("validate");
  const Outcome o = run({"validate", "--data", ws.data.string()});
  INFO(o.out << o.err);
  CHECK(o.code == cli::kExitOk);
  CHECK(o.out.find("25 cases, 0 errors") != std::string::npos);
}

TEST_CASE("validate reports malformed XML with exit 1") {
  Workspace ws("broken");
  std::ofstream(ws.dir / "bad.xml") << "<Database><TestCase></Database>";
  const Outcome o = run({"validate", "--data", (ws.dir / "bad.xml").string()});
  CHECK(o.code == cli::kExitValidation);
  CHECK(o.out.find("0 cases, 1 errors") != std::string::npos);
}

TEST_CASE("usage errors exit with 2 and name the problem") {
  Workspace ws("usage");
  const Outcome lut = run({"predict", "--data", ws.data.string(), "--model", "lut"});
  CHECK(lut.code == cli::kExitUsage);
  CHECK(lut.err.find("--lut-file") != std::string::npos);
  CHECK(run({"predict", "--data", ws.data.string(), "--model", "w3"}).code == cli::kExitUsage);
  CHECK(run({"predict", "--data", ws.data.string(), "--model", "biasi", "--metric", "mae"}).code == cli::kExitUsage);
  CHECK(run({"predict", "--model", "biasi"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("evaluate writes the report files") {
  Workspace ws("evaluate");
  const fs::path out = ws.dir / "report";
  const Outcome o = run({"evaluate", "--data", ws.data.string(), "--model", "biasi", "--out", out.string()});
  INFO(o.err);
  CHECK(o.code == cli::kExitOk);
  CHECK(fs::exists(out / "biasi_parity.csv"));
  CHECK(fs::exists(out / "biasi_summary.json"));
  CHECK(fs::exists(out / "biasi_parity.svg"));

  const Outcome plot = run({"plot-data", "--parity", (out / "biasi_parity.csv").string(), "--out",
                            (ws.dir / "again.svg").string()});
  CHECK(plot.code == cli::kExitOk);
  CHECK(slurp(ws.dir / "again.svg").find("<svg") != std::string::npos);
}

TEST_CASE("runs are byte-identical across thread counts and leave inputs alone") {
  Workspace ws("determinism", 40);
  const std::string before = slurp(ws.data);
  const fs::path a = ws.dir / "a", b = ws.dir / "b";
  CHECK(run({"evaluate", "--data", ws.data.string(), "--model", "bowring", "--out", a.string(), "--threads", "1"}).code ==
        0);
  CHECK(run({"evaluate", "--data", ws.data.string(), "--model", "bowring", "--out", b.string(), "--threads", "3"}).code ==
        0);
  for (const char* f : {"bowring_parity.csv", "bowring_summary.json", "bowring_parity.svg"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(ws.data) == before);
}

TEST_CASE("lookup-table predictions through the command line") {
  Workspace ws("lut");
  const fs::path table = ws.dir / "flat.lut";
  std::ofstream(table) << chf::format_table(chf::testing::synthetic_table(
      {0.1e6, 21e6}, {0.0, 9000.0}, {-1.0, 1.5}, [](double, double, double x) { return 4e6 - 1e6 * x; }));
  const Outcome o = run({"predict", "--data", ws.data.string(), "--model", "lut", "--lut-file", table.string()});
  INFO(o.err);
  CHECK(o.code == cli::kExitOk);
  CHECK(o.out.rfind("test_id,", 0) == 0);
  std::size_t rows = 0;
  for (char ch : o.out) rows += ch == '\n';
  CHECK(rows == 26);
  std::size_t evaluated = 0;
  for (std::size_t pos = o.out.find(",0,,"); pos != std::string::npos; pos = o.out.find(",0,,", pos + 1)) ++evaluated;
  CHECK(evaluated >= 20);
}

TEST_CASE("quality profile dump") {
  Workspace ws("quality");
  const Outcome o = run({"quality", "--data", ws.data.string(), "--case", "2"});
  CHECK(o.code == cli::kExitOk);
  std::size_t rows = 0;
  for (char ch : o.out) rows += ch == '\n';
  CHECK(rows == 41);  // header + 40 nodes of a non-uniform case
}

TEST_CASE("digitize with the energy gate") {
  Workspace ws("digitize", 1);
  const fs::path pts = ws.dir / "curve.txt";
  {
    std::ofstream f(pts);
    for (int i = 0; i <= 30; ++i) f << 2.0 * i / 30.0 << ", " << 1.0 + 0.3 * std::sin(i / 5.0) << '\n';
  }
  const std::string perimeter = "0.0314159";
  // The resampled profile has unit mean, so power = q * P * L.
  const Outcome pass = run({"digitize", "--points", pts.string(), "--length", "2", "--perimeter", perimeter, "--q-av",
                            "1e6", "--power", "62831.8"});
  INFO(pass.out << pass.err);
  CHECK(pass.code == cli::kExitOk);
  CHECK(pass.out.find("<WallPower>") != std::string::npos);
  CHECK(pass.out.find("-> pass") != std::string::npos);
  const Outcome fail = run({"digitize", "--points", pts.string(), "--length", "2", "--perimeter", perimeter, "--q-av",
                            "1e6", "--power", "66000"});
  CHECK(fail.code == cli::kExitValidation);
  CHECK(fail.out.find("-> fail") != std::string::npos);
}

TEST_CASE("config file supplies option defaults") {
  Workspace ws("config");
  const fs::path cfg = ws.dir / "chfkit.ini";
  std::ofstream(cfg) << "[predict]\nmodel=biasi\nmetric=log_ratio\n";
  const Outcome o = run({"--config", cfg.string(), "predict", "--data", ws.data.string()});
  INFO(o.err);
  CHECK(o.code == cli::kExitOk);
}

TEST_CASE("train and reuse a network") {
  Workspace ws("train", 30);
  const fs::path model = ws.dir / "net.bin";
  const Outcome t = run({"train", "--data", ws.data.string(), "--out", model.string(), "--epochs", "5", "--history",
                         (ws.dir / "hist.csv").string()});
  INFO(t.err);
  CHECK(t.code == cli::kExitOk);
  CHECK(fs::exists(model));
  const Outcome p = run({"predict", "--data", ws.data.string(), "--model", "nn", "--model-file", model.string()});
  CHECK(p.code == cli::kExitOk);
}
