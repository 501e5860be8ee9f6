#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "xiaudit/cli.hpp"
#include "xiaudit/zeros.hpp"

using namespace xiaudit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "xiaudit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Fresh directory per test case; removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("xiaudit-cli-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-finite doubles travel as the strings nan, inf and -inf.
bool is_schema_number(const nlohmann::json& x) {
  if (x.is_number()) return true;
  return x.is_string() && (x == "nan" || x == "inf" || x == "-inf");
}

}  // namespace

TEST_CASE("zeros lists three zeros below 30") {
  TempDir dir("zeros");
  const auto r = run({"--cache", dir.file("z.cache"), "zeros", "--t-max", "30", "--tol", "1e-8"});
  CHECK(r.code == kExitSuccess);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  }
  CHECK(rows == 3);
  CHECK(fs::exists(dir.file("z.cache")));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"audit", "bogus"}).code == kExitUsage);
  CHECK(run({"--cache", "", "zeros", "--t-max", "-1"}).code == kExitUsage);
  CHECK(run({"--cache", "", "--format", "xml", "zeros"}).code == kExitUsage);
  CHECK(run({"--cache", "", "plot", "xi-critical", "--t", "5:5"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitSuccess);
}

TEST_CASE("an unattainable tolerance exits with 4") {
  CHECK(run({"--cache", "", "--tol", "1e-20", "zeros", "--t-max", "20"}).code == kExitNonConvergence);
}

TEST_CASE("a corrupted cache exits with 3") {
  TempDir dir("corrupt");
  const std::string cache = dir.file("z.cache");
  REQUIRE(run({"--cache", cache, "zeros", "--t-max", "30"}).code == kExitSuccess);
  std::string text = slurp(cache);
  const auto pos = text.find("21.02");
  REQUIRE(pos != std::string::npos);
  text[pos + 3] = '9';
  std::ofstream(cache) << text;
  CHECK(run({"--cache", cache, "zeros", "--t-max", "30"}).code == kExitCacheCorruption);
}

TEST_CASE("audit output is byte identical across runs and cache states") {
  TempDir dir("determinism");
  const std::string cache = dir.file("z.cache");
  const auto first = run({"--cache", cache, "--n-zeros", "100", "audit", "eq9"});
  const auto second = run({"--cache", cache, "--n-zeros", "100", "audit", "eq9"});
  const auto no_cache = run({"--cache", "", "--n-zeros", "100", "--threads", "3", "audit", "eq9"});
  CHECK(first.code == kExitSuccess);
  CHECK(first.out == second.out);
  CHECK(first.out == no_cache.out);
  CHECK(nlohmann::json::parse(first.out).is_array());
}

TEST_CASE("a perturbed coincidence probe makes the run fail") {
  const auto ok = run({"--cache", "", "--n-zeros", "100", "audit", "coincidence"});
  CHECK(ok.code == kExitSuccess);
  const auto moved = run({"--cache", "", "--n-zeros", "100", "--perturb", "0.01", "audit", "coincidence"});
  CHECK(moved.code == kExitAuditFailure);
  CHECK(moved.out.find("DISTINCT") != std::string::npos);
}

TEST_CASE("csv output and report rendering") {
  TempDir dir("formats");
  const auto csv = run({"--cache", "", "--format", "csv", "audit", "eq9"});
  CHECK(csv.code == kExitSuccess);
  CHECK(csv.out.rfind("name,verdict,ratio_or_residual,tolerance,index,measured,reference", 0) == 0);

  const std::string json_path = dir.file("eq9.json");
  CHECK(run({"--cache", "", "--out", json_path, "audit", "eq9"}).code == kExitSuccess);
  const auto rendered = run({"report", json_path});
  CHECK(rendered.code == kExitSuccess);
  CHECK(rendered.out.find("xi_exponential_fit") != std::string::npos);
  CHECK(run({"report", dir.file("missing.json")}).code != kExitSuccess);
}

TEST_CASE("config file keys use the flag names") {
  TempDir dir("config");
  const std::string config = dir.file("run.toml");
  std::ofstream(config) << "t-max = 30\ntol = 1e-8\n";
  const auto r = run({"--cache", "", "--config", config, "zeros"});
  CHECK(r.code == kExitSuccess);
  std::ofstream(config) << "t-max = 30\nunknown-key = 1\n";
  CHECK(run({"--cache", "", "--config", config, "zeros"}).code == kExitUsage);
}

TEST_CASE("plot writes an SVG") {
  TempDir dir("plot");
  const std::string svg = dir.file("xi.svg");
  CHECK(run({"--cache", "", "--out", svg, "plot", "xi-critical", "--t", "0:30"}).code == kExitSuccess);
  CHECK(slurp(svg).find("<svg") != std::string::npos);
}

TEST_CASE("range parsing") {
  CHECK(parse_range("1.5:3") == std::pair<double, double>(1.5, 3.0));
  CHECK_THROWS(parse_range("3"));
  CHECK_THROWS(parse_range("a:b"));
}

TEST_CASE("xi-critical plot crosses zero three times below 30") {
  RunConfig cfg;
  cfg.cache = "";
  const auto data = plot_data(PlotKind::xi_critical, cfg, 0.0, 30.0);
  REQUIRE(!data.series.empty());
  const auto& y = data.series.front().y;
  int crossings = 0;
  for (std::size_t i = 1; i < y.size(); ++i) crossings += (y[i - 1] > 0) != (y[i] > 0);
  CHECK(crossings == 3);
  CHECK_THROWS(plot_data(PlotKind::xi_critical, cfg, 5.0, 5.0));
}

TEST_CASE("product convergence plot is non-increasing") {
  RunConfig cfg;
  cfg.cache = "";
  cfg.n_zeros = 400;
  const auto data = plot_data(PlotKind::product_convergence, cfg, 1.0, 400.0);
  REQUIRE(!data.series.empty());
  const auto& y = data.series.front().y;
  REQUIRE(y.size() >= 2);
  for (std::size_t i = 1; i < y.size(); ++i) CHECK(y[i] <= y[i - 1]);
}

TEST_CASE("every report of a full run conforms to the published schema") {
  std::ifstream in(XIAUDIT_SCHEMA_PATH);
  REQUIRE(in.good());
  const auto schema = nlohmann::json::parse(in);
  const auto& report = schema.at("$defs").at("report");
  const auto& properties = report.at("properties");
  std::set<std::string> verdicts;
  for (const auto& v : properties.at("verdict").at("enum")) verdicts.insert(v.get<std::string>());

  RunConfig cfg;
  cfg.cache = "";
  cfg.n_zeros = 100;
  const auto output = nlohmann::json::parse(reports_to_json(run_audit(AuditKind::all, cfg)));
  REQUIRE(output.is_array());
  for (const auto& r : output) {
    CAPTURE(r.dump());
    REQUIRE(r.is_object());
    CHECK(r.size() == properties.size());
    for (const auto& [key, _] : properties.items()) CHECK(r.contains(key));
    CHECK(r.at("name").is_string());
    CHECK(r.at("provenance").is_string());
    CHECK(r.at("params").is_object());
    for (const auto& [_, v] : r.at("params").items()) CHECK(v.is_primitive());
    for (const char* list : {"measured", "reference"}) {
      CHECK(r.at(list).is_array());
      for (const auto& x : r.at(list)) CHECK(is_schema_number(x));
    }
    CHECK(is_schema_number(r.at("ratio_or_residual")));
    CHECK(is_schema_number(r.at("tolerance")));
    CHECK(verdicts.count(r.at("verdict").get<std::string>()) == 1);
  }
}
