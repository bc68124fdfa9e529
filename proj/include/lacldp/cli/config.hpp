#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacldp/empirical.hpp"
#include "lacldp/fnmodel.hpp"
#include "lacldp/gap_sequence.hpp"

namespace lacldp::cli {

enum class Command { cgf, rate, sweep_q, empirical, verify, dio };
enum class Mode { iid, geometric };

Command parse_command(const std::string& name);
std::string command_name(Command c);

// lo:hi:step, inclusive of hi up to rounding. A single number is a
// one-point grid.
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
  std::string str() const;
};

Grid parse_grid(const std::string& text);

struct Formats {
  bool csv = true;
  bool json = false;
  bool svg = false;
};

Formats parse_formats(const std::string& text);

struct Tolerances {
  double iid = 1e-13;
  double lambda = 1e-9;
  double legendre = 1e-10;
  int max_intervals = 16384;
};

struct RunConfig {
  Command command = Command::cgf;
  PeriodicFunctionSpec function = PeriodicFunctionSpec::cosine();
  Mode mode = Mode::iid;
  int q = 2;
  std::vector<int> q_list{2, 4, 8, 16, 32};
  std::optional<GapSequence> sequence;  // default: geometric(q)
  Grid theta_grid{-8.0, 8.0, 0.25};
  Grid x_grid{-0.9, 0.9, 0.05};
  int n = 12;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 100000;
  std::string method = "auto";  // exact, mc or auto (empirical)
  std::optional<double> t;      // tail threshold (empirical)
  long m = 1;                   // coefficient bound (dio)
  std::optional<long> d;        // gap-condition check (dio)
  std::optional<std::pair<int, int>> window;  // dio
  std::filesystem::path out = ".";
  Formats formats;
  Tolerances tolerances;

  GapSequence effective_sequence() const;
};

// Strict parser: any unknown key raises ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& doc);

// JSON text, @path to a JSON file, or a bare builtin name.
PeriodicFunctionSpec parse_function_arg(const std::string& text);

// JSON text, @path, or shorthand: "geometric:2", "shifted_geometric:2:1",
// "factorial", "super_exp:2", "explicit:2,4,8".
GapSequence parse_sequence_arg(const std::string& text);

// Thrown for --help; carries the usage text.
struct HelpRequested {
  std::string text;
};

// Builds the run configuration from the command line; flags override values
// from --config. Throws ConfigError on any parse problem.
RunConfig parse_command_line(int argc, char** argv);

nlohmann::json config_to_json(const RunConfig& config);

}  // namespace lacldp::cli
