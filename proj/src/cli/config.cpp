#include "lacldp/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "lacldp/cli/output.hpp"
#include "lacldp/errors.hpp"

namespace lacldp::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON (" + e.what() + ")");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError(what + ": '" + s + "' is not a finite number");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not an integer");
  }
  if (used != s.size()) throw ConfigError(what + ": '" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) out.push_back(static_cast<int>(parse_long(part, what)));
  return out;
}

std::pair<int, int> parse_window(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ConfigError("window: expected k_start:k_end");
  return {static_cast<int>(parse_long(parts[0], "window")), static_cast<int>(parse_long(parts[1], "window"))};
}

Grid grid_from_json(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_number()) return Grid{v.get<double>(), v.get<double>(), 1.0};
  if (v.is_object()) {
    for (const auto& [k, _] : v.items()) {
      if (k != "lo" && k != "hi" && k != "step") throw ConfigError(key + ": unknown key '" + k + "'");
    }
    Grid g{v.at("lo").get<double>(), v.at("hi").get<double>(), v.value("step", 1.0)};
    return parse_grid(format_number(g.lo) + ":" + format_number(g.hi) + ":" + format_number(g.step));
  }
  throw ConfigError(key + ": expected \"lo:hi:step\", a number or {lo, hi, step}");
}

void check_positive_int(long v, const std::string& what, long min = 1) {
  if (v < min) throw ConfigError(what + " must be at least " + std::to_string(min));
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "cgf") return Command::cgf;
  if (name == "rate") return Command::rate;
  if (name == "sweep-q") return Command::sweep_q;
  if (name == "empirical") return Command::empirical;
  if (name == "verify") return Command::verify;
  if (name == "dio") return Command::dio;
  throw ConfigError("unknown command '" + name + "' (expected cgf, rate, sweep-q, empirical, verify or dio)");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::cgf: return "cgf";
    case Command::rate: return "rate";
    case Command::sweep_q: return "sweep-q";
    case Command::empirical: return "empirical";
    case Command::verify: return "verify";
    case Command::dio: return "dio";
  }
  return "?";
}

std::vector<double> Grid::points() const {
  std::vector<double> out;
  if (lo == hi) return {lo};
  const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
  out.reserve(count + 1);
  // Points are lo + i*step, so equal configs give bit-identical grids.
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

std::string Grid::str() const { return format_number(lo) + ":" + format_number(hi) + ":" + format_number(step); }

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  Grid g;
  if (parts.size() == 1) {
    g.lo = g.hi = parse_double(parts[0], "grid");
    return g;
  }
  if (parts.size() != 3) throw ConfigError("grid: expected lo:hi:step, got '" + text + "'");
  g.lo = parse_double(parts[0], "grid");
  g.hi = parse_double(parts[1], "grid");
  g.step = parse_double(parts[2], "grid");
  if (g.hi < g.lo) throw ConfigError("grid: hi < lo in '" + text + "'");
  if (g.hi > g.lo && !(g.step > 0)) throw ConfigError("grid: step must be positive in '" + text + "'");
  if (g.hi > g.lo && (g.hi - g.lo) / g.step > 1e6) throw ConfigError("grid: more than 10^6 points in '" + text + "'");
  return g;
}

Formats parse_formats(const std::string& text) {
  Formats f{false, false, false};
  for (const auto& part : split(text, ',')) {
    if (part == "csv") f.csv = true;
    else if (part == "json") f.json = true;
    else if (part == "svg") f.svg = true;
    else throw ConfigError("format: unknown format '" + part + "' (expected csv, json, svg)");
  }
  return f;
}

GapSequence RunConfig::effective_sequence() const { return sequence ? *sequence : GapSequence::geometric(q); }

PeriodicFunctionSpec parse_function_arg(const std::string& text) {
  if (text.empty()) throw ConfigError("function: empty argument");
  if (text[0] == '@') return spec_from_json(parse_json_text(read_file(text.substr(1)), "function"));
  if (text[0] == '{') return spec_from_json(parse_json_text(text, "function"));
  return PeriodicFunctionSpec::builtin(text);
}

GapSequence parse_sequence_arg(const std::string& text) {
  if (text.empty()) throw ConfigError("sequence: empty argument");
  if (text[0] == '@') return sequence_from_json(parse_json_text(read_file(text.substr(1)), "sequence"));
  if (text[0] == '{') return sequence_from_json(parse_json_text(text, "sequence"));
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  if (kind == "geometric" && parts.size() == 2) return GapSequence::geometric(parse_long(parts[1], "sequence"));
  if (kind == "shifted_geometric" && parts.size() == 3) {
    return GapSequence::shifted_geometric(parse_long(parts[1], "sequence"), parse_long(parts[2], "sequence"));
  }
  if (kind == "factorial" && parts.size() == 1) return GapSequence::factorial();
  if (kind == "super_exp" && parts.size() == 2) return GapSequence::super_exponential(parse_long(parts[1], "sequence"));
  if (kind == "explicit" && parts.size() == 2) {
    std::vector<BigInt> terms;
    for (const auto& t : split(parts[1], ',')) {
      try {
        terms.emplace_back(t);
      } catch (const std::exception&) {
        throw ConfigError("sequence: invalid integer '" + t + "'");
      }
    }
    return GapSequence::explicit_terms(std::move(terms));
  }
  throw ConfigError("sequence: cannot parse '" + text + "'");
}

void apply_config_json(RunConfig& c, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "function") {
        c.function = v.is_string() ? parse_function_arg(v.get<std::string>()) : spec_from_json(v);
      } else if (key == "mode") {
        const std::string mode = v.get<std::string>();
        if (mode == "iid") c.mode = Mode::iid;
        else if (mode == "geometric") c.mode = Mode::geometric;
        else throw ConfigError("mode: expected iid or geometric");
      } else if (key == "q") {
        c.q = v.get<int>();
      } else if (key == "q_list") {
        c.q_list = v.get<std::vector<int>>();
      } else if (key == "sequence") {
        c.sequence = v.is_string() ? parse_sequence_arg(v.get<std::string>()) : sequence_from_json(v);
      } else if (key == "theta_grid") {
        c.theta_grid = grid_from_json(v, key);
      } else if (key == "x_grid") {
        c.x_grid = grid_from_json(v, key);
      } else if (key == "n") {
        c.n = v.get<int>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "samples") {
        c.samples = v.get<std::uint64_t>();
      } else if (key == "method") {
        c.method = v.get<std::string>();
      } else if (key == "t") {
        c.t = v.get<double>();
      } else if (key == "m") {
        c.m = v.get<long>();
      } else if (key == "d") {
        c.d = v.get<long>();
      } else if (key == "window") {
        c.window = v.is_string() ? parse_window(v.get<std::string>())
                                 : std::make_pair(v.at(0).get<int>(), v.at(1).get<int>());
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "format") {
        if (v.is_string()) {
          c.formats = parse_formats(v.get<std::string>());
        } else {
          std::string joined;
          for (const auto& f : v) joined += (joined.empty() ? "" : ",") + f.get<std::string>();
          c.formats = parse_formats(joined);
        }
      } else if (key == "tolerances") {
        for (const auto& [tk, tv] : v.items()) {
          if (tk == "iid") c.tolerances.iid = tv.get<double>();
          else if (tk == "lambda") c.tolerances.lambda = tv.get<double>();
          else if (tk == "legendre") c.tolerances.legendre = tv.get<double>();
          else if (tk == "max_intervals") c.tolerances.max_intervals = tv.get<int>();
          else throw ConfigError("tolerances: unknown key '" + tk + "'");
        }
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: wrong value type (") + e.what() + ")");
  }
}

RunConfig parse_command_line(int argc, char** argv) {
  CLI::App app{"Large-deviation rate functions for lacunary sums", "lacldp"};
  app.set_help_flag("-h,--help", "Print this help message and exit");
  std::string command, config_path, function, mode, theta_grid, x_grid, out, format, sequence, method, window,
      q_list;
  std::optional<int> q, n;
  std::optional<std::uint64_t> seed, samples;
  std::optional<double> t;
  std::optional<long> m, d;

  app.add_option("command", command, "cgf | rate | sweep-q | empirical | verify | dio")->required();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--function", function, "Function spec: JSON, @file or builtin name");
  app.add_option("--mode", mode, "iid | geometric");
  app.add_option("--q", q, "Geometric ratio q");
  app.add_option("--q-list", q_list, "Comma-separated q values for sweep-q");
  app.add_option("--sequence", sequence, "Gap sequence: JSON, @file or shorthand (geometric:2, factorial, ...)");
  app.add_option("--theta-grid", theta_grid, "lo:hi:step");
  app.add_option("--x-grid", x_grid, "lo:hi:step");
  app.add_option("--n", n, "Sequence length");
  app.add_option("--seed", seed, "Monte-Carlo seed");
  app.add_option("--samples", samples, "Monte-Carlo sample count");
  app.add_option("--method", method, "exact | mc | auto (empirical)");
  app.add_option("--t", t, "Tail threshold for P[S_n/n >= t] (empirical)");
  app.add_option("--m", m, "Coefficient bound (dio)");
  app.add_option("--d", d, "Degree d for the gap-condition check (dio)");
  app.add_option("--window", window, "k_start:k_end (dio)");
  app.add_option("--out", out, "Output directory");
  app.add_option("--format", format, "Comma-separated subset of csv,json,svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }

  RunConfig c;
  c.command = parse_command(command);
  if (!config_path.empty()) apply_config_json(c, parse_json_text(read_file(config_path), "config"));
  if (!function.empty()) c.function = parse_function_arg(function);
  if (!mode.empty()) {
    if (mode == "iid") c.mode = Mode::iid;
    else if (mode == "geometric") c.mode = Mode::geometric;
    else throw ConfigError("mode: expected iid or geometric");
  }
  if (q) c.q = *q;
  if (!q_list.empty()) c.q_list = parse_int_list(q_list, "q-list");
  if (!sequence.empty()) c.sequence = parse_sequence_arg(sequence);
  if (!theta_grid.empty()) c.theta_grid = parse_grid(theta_grid);
  if (!x_grid.empty()) c.x_grid = parse_grid(x_grid);
  if (n) c.n = *n;
  if (seed) c.seed = *seed;
  if (samples) c.samples = *samples;
  if (!method.empty()) c.method = method;
  if (t) c.t = *t;
  if (m) c.m = *m;
  if (d) c.d = *d;
  if (!window.empty()) c.window = parse_window(window);
  if (!out.empty()) c.out = out;
  if (!format.empty()) c.formats = parse_formats(format);

  check_positive_int(c.q, "q", 2);
  for (int v : c.q_list) check_positive_int(v, "q-list entries", 2);
  if (c.q_list.empty()) throw ConfigError("q-list must not be empty");
  check_positive_int(c.n, "n");
  check_positive_int(static_cast<long>(std::min<std::uint64_t>(c.samples, 1UL << 62)), "samples");
  check_positive_int(c.m, "m");
  if (c.d && *c.d < 0) throw ConfigError("d must be non-negative");
  if (c.method != "exact" && c.method != "mc" && c.method != "auto") {
    throw ConfigError("method: expected exact, mc or auto");
  }
  if (!c.formats.csv && !c.formats.json && !c.formats.svg) throw ConfigError("format: nothing to write");
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = command_name(c.command);
  j["function"] = spec_to_json(c.function);
  j["mode"] = c.mode == Mode::iid ? "iid" : "geometric";
  j["q"] = c.q;
  j["q_list"] = c.q_list;
  j["sequence"] = sequence_to_json(c.effective_sequence());
  j["theta_grid"] = c.theta_grid.str();
  j["x_grid"] = c.x_grid.str();
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["method"] = c.method;
  if (c.t) j["t"] = *c.t;
  j["m"] = c.m;
  if (c.d) j["d"] = *c.d;
  if (c.window) j["window"] = {c.window->first, c.window->second};
  j["tolerances"] = {{"iid", c.tolerances.iid},
                     {"lambda", c.tolerances.lambda},
                     {"legendre", c.tolerances.legendre},
                     {"max_intervals", c.tolerances.max_intervals}};
  return j;
}

}  // namespace lacldp::cli
