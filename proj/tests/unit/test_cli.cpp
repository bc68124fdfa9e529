#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "lacldp/cli/commands.hpp"
#include "lacldp/cli/config.hpp"
#include "lacldp/cli/output.hpp"
#include "lacldp/cli/svg.hpp"
#include "lacldp/errors.hpp"
#include "lacldp/transfer_op.hpp"
#include "support/oracles.hpp"

using namespace lacldp;
using namespace lacldp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lacldp_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig config_for(Command cmd, const fs::path& out) {
  RunConfig c;
  c.command = cmd;
  c.out = out;
  return c;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "lacldp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_main(static_cast<int>(argv.size()), argv.data());
}

// Tag balance of a generated SVG: every opening tag is closed in order.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    if (xml.compare(pos, 4, "<!--") == 0) {
      pos = xml.find("-->", pos);
      if (pos == std::string::npos) return false;
      continue;
    }
    if (xml.compare(pos, 2, "<?") == 0) {
      pos = xml.find("?>", pos);
      if (pos == std::string::npos) return false;
      continue;
    }
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    if (tag.find('<') != std::string::npos) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \n\t")));
    }
    pos = end + 1;
  }
  // No stray ampersands outside entities.
  for (std::size_t i = xml.find('&'); i != std::string::npos; i = xml.find('&', i + 1)) {
    const std::size_t semi = xml.find(';', i);
    if (semi == std::string::npos || semi - i > 6) return false;
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("grid parsing") {
  const Grid g = parse_grid("-1:1:0.5");
  CHECK(g.points() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(parse_grid("0").points() == std::vector<double>{0.0});
  CHECK(parse_grid("-0.8:0.8:0.05").points().size() == 33);
  CHECK_THROWS_AS(parse_grid("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:b:c"), ConfigError);
}

TEST_CASE("formats, commands, sequences") {
  const Formats f = parse_formats("csv,svg");
  CHECK(f.csv);
  CHECK(f.svg);
  CHECK_FALSE(f.json);
  CHECK_THROWS_AS(parse_formats("csv,png"), ConfigError);
  CHECK(parse_command("sweep-q") == Command::sweep_q);
  CHECK(command_name(Command::sweep_q) == "sweep-q");
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
  CHECK(parse_sequence_arg("explicit:2,4").terms(2) == std::vector<BigInt>{2, 4});
  CHECK(parse_sequence_arg("shifted_geometric:2:1").terms(2) == std::vector<BigInt>{3, 5});
  CHECK(parse_sequence_arg(R"({"type":"factorial"})").large_gap());
  CHECK_THROWS_AS(parse_sequence_arg("fibonacci"), ConfigError);
  CHECK(parse_function_arg("cosine")(0.0) == 1.0);
  CHECK_THROWS_AS(parse_function_arg("{not json"), ConfigError);
}

TEST_CASE("strict config parsing") {
  RunConfig c;
  apply_config_json(c, nlohmann::json::parse(
                           R"({"mode":"geometric","q":3,"theta_grid":"-1:1:0.5","tolerances":{"lambda":1e-10}})"));
  CHECK(c.mode == Mode::geometric);
  CHECK(c.q == 3);
  CHECK(c.tolerances.lambda == 1e-10);
  CHECK(c.theta_grid.points().size() == 5);
  CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"thetagrid":"0:1:0.5"})")), ConfigError);
  CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"tolerances":{"lamda":1}})")), ConfigError);
  CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"q":"two"})")), ConfigError);
  CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"([1,2])")), ConfigError);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = scratch("override");
  std::ofstream(dir / "c.json") << R"({"mode":"geometric","q":3,"n":5})";
  std::vector<std::string> args{"lacldp", "cgf", "--config", (dir / "c.json").string(), "--q", "4"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  const RunConfig c = parse_command_line(static_cast<int>(argv.size()), argv.data());
  CHECK(c.q == 4);
  CHECK(c.n == 5);
  CHECK(c.mode == Mode::geometric);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(crc32_hex("123456789") == "cbf43926");
}

TEST_CASE("csv table rejects ragged rows") {
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("write_atomic leaves no temporary behind") {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "sub" / "x.txt", "hello");
  CHECK(slurp(dir / "sub" / "x.txt") == "hello");
  CHECK_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
}

TEST_CASE("svg output is well formed") {
  LinePlot p{"A & B <test>", "x", "y", {{"s", {0.0, 1.0, 2.0}, {0.0, std::numeric_limits<double>::infinity(), 1.0}}},
             {{0.5, 1.5}}};
  const std::string svg = render_svg(p, "deadbeef");
  CHECK(well_formed(svg));
  CHECK(svg.find("<!-- csv-crc32: deadbeef -->") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 960 540\"") != std::string::npos);
}

TEST_CASE("cgf examples") {
  const fs::path dir = scratch("cgf");
  RunConfig c = config_for(Command::cgf, dir);
  c.theta_grid = parse_grid("0");
  CHECK(cmd_cgf(c).exit_code == 0);
  auto rows = read_csv(dir / "cgf.csv");
  CHECK(rows[0] == std::vector<std::string>{"theta", "value", "derivative", "n_used"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "0");
  CHECK(rows[1][1] == "0");

  c.mode = Mode::geometric;
  c.theta_grid = parse_grid("1");
  cmd_cgf(c);
  rows = read_csv(dir / "cgf.csv");
  CHECK(std::strtod(rows[1][1].c_str(), nullptr) == cgf_geometric(PeriodicFunctionSpec::cosine(), 2, 1.0).sample.value);

  c.function = PeriodicFunctionSpec::builtin("cos_minus_cos2");
  c.theta_grid = parse_grid("-2:2:0.5");
  cmd_cgf(c);
  rows = read_csv(dir / "cgf.csv");
  CHECK(rows.size() == 10);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::strtod(rows[i][1].c_str(), nullptr)) < 1e-8);
}

TEST_CASE("rate examples") {
  const fs::path dir = scratch("rate");
  RunConfig c = config_for(Command::rate, dir);
  c.x_grid = parse_grid("0");
  cmd_rate(c);
  auto rows = read_csv(dir / "rate.csv");
  CHECK(rows[0] == std::vector<std::string>{"x", "value", "is_infinite", "zero_location"});
  CHECK(std::abs(std::strtod(rows[1][1].c_str(), nullptr)) < 1e-12);
  CHECK(rows[1][2] == "false");

  c.x_grid = parse_grid("1.2");
  cmd_rate(c);
  rows = read_csv(dir / "rate.csv");
  CHECK(rows[1][2] == "true");
  CHECK(rows[1][1] == "inf");

  c.mode = Mode::geometric;
  c.x_grid = parse_grid("-0.9:0.9:0.05");
  c.formats = parse_formats("csv,svg,json");
  const auto r = cmd_rate(c);
  CHECK(r.exit_code == 0);
  rows = read_csv(dir / "rate_vs_iid.csv");
  CHECK(rows[0] == std::vector<std::string>{"x", "geometric_value", "iid_value", "abs_difference", "sup_difference",
                                            "finite_sup_difference"});
  CHECK(rows.size() == 38);
  const std::string svg = slurp(dir / "rate.svg");
  CHECK(well_formed(svg));
  CHECK(svg.find(crc32_hex(slurp(dir / "rate.csv"))) != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(dir / "rate.json"));
  CHECK(doc["rows"].size() == 37);
  CHECK(doc["config"]["mode"] == "geometric");
}

TEST_CASE("sweep-q examples") {
  const fs::path dir = scratch("sweep");
  RunConfig c = config_for(Command::sweep_q, dir);
  c.q_list = {3};
  c.theta_grid = parse_grid("-4:4:0.25");
  c.function = PeriodicFunctionSpec::builtin("triangle");
  // Lambda_q'(0) is the mean of f, which is 0 for the triangle.
  c.x_grid = parse_grid("0");
  cmd_sweep_q(c);
  auto rows = read_csv(dir / "sweep.csv");
  CHECK(rows[0] == std::vector<std::string>{"q", "sup_distance", "finite_sup_distance", "infinite_points", "max_n_used"});
  CHECK(std::abs(std::strtod(rows[1][1].c_str(), nullptr)) < 1e-8);

  c.function = PeriodicFunctionSpec::constant(0.25);
  c.q_list = {2, 5};
  c.x_grid = parse_grid("-0.5:1:0.25");
  cmd_sweep_q(c);
  rows = read_csv(dir / "sweep.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::strtod(rows[i][1].c_str(), nullptr) == 0.0);
}

TEST_CASE("empirical: theta = 0 gives mgf 1") {
  const fs::path dir = scratch("empirical");
  RunConfig c = config_for(Command::empirical, dir);
  c.theta_grid = parse_grid("0");
  c.n = 6;
  cmd_empirical(c);
  const auto rows = read_csv(dir / "empirical.csv");
  CHECK(rows[0] == std::vector<std::string>{"theta", "n", "mgf", "scaled_cgf", "method", "error_estimate"});
  CHECK(rows.size() == 7);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] == "1");
  c.method = "mc";
  c.samples = 1000;
  cmd_empirical(c);
  const auto mc = read_csv(dir / "empirical.csv");
  for (std::size_t i = 1; i < mc.size(); ++i) {
    CHECK(mc[i][2] == "1");
    CHECK(mc[i][4] == "monte_carlo");
  }
}

TEST_CASE("dio examples") {
  const fs::path dir = scratch("dio");
  RunConfig c = config_for(Command::dio, dir);
  c.sequence = GapSequence::explicit_terms({2, 4});
  c.m = 2;
  cmd_dio(c);
  const auto rows = read_csv(dir / "dio.csv");
  CHECK(rows[0] == std::vector<std::string>{"n", "m", "total", "nontrivial", "method"});
  CHECK(rows[1][2] == "3");

  c.sequence = GapSequence::factorial();
  c.n = 20;
  c.m = 2;
  c.d = 2;
  cmd_dio(c);
  const auto gap = read_csv(dir / "gap_condition.csv");
  CHECK(gap[1][2] == "4");
  CHECK(gap[1][3] == "true");
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    RunConfig c = config_for(Command::empirical, dir);
    c.theta_grid = parse_grid("-1:1:0.5");
    // a_5 = 2^25 is past the quadrature budget, so n = 5, 6 use Monte Carlo.
    c.sequence = GapSequence::super_exponential(2);
    c.n = 6;
    c.method = "auto";
    c.samples = 20000;
    c.t = 0.2;
    c.formats = parse_formats("csv,json,svg");
    cmd_empirical(c);
  }
  for (const char* f : {"empirical.csv", "empirical.json", "extrapolation.csv", "extrapolation.svg", "tail.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  const auto rows = read_csv(a / "empirical.csv");
  CHECK(rows[4][4] == "exact_quadrature");
  CHECK(rows[5][4] == "monte_carlo");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  CHECK(run({"cgf", "--out", dir.string(), "--theta-grid", "0:1:0.5"}) == kExitOk);
  CHECK(run({"cgf", "--bogus"}) == kExitConfig);
  CHECK(run({"plot"}) == kExitConfig);
  CHECK(run({"cgf", "--function", "sine"}) == kExitConfig);
  CHECK(run({"cgf", "--mode", "geometric", "--q", "1"}) == kExitConfig);
  CHECK(run({"empirical", "--out", dir.string(), "--method", "exact", "--n", "25", "--theta-grid", "1"}) == kExitConfig);
  std::ofstream(dir / "tight.json") << R"({"tolerances":{"lambda":1e-16,"max_intervals":128}})";
  CHECK(run({"cgf", "--out", dir.string(), "--mode", "geometric", "--theta-grid", "1", "--config",
             (dir / "tight.json").string()}) == kExitNumerical);
}
