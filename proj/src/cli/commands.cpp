#include "lacldp/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>

#include "lacldp/cli/output.hpp"
#include "lacldp/cli/svg.hpp"
#include "lacldp/cli/verify.hpp"
#include "lacldp/empirical.hpp"
#include "lacldp/errors.hpp"
#include "lacldp/iid_cgf.hpp"
#include "lacldp/legendre.hpp"
#include "lacldp/numtheory.hpp"
#include "lacldp/transfer_op.hpp"

namespace lacldp::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IidCgfOptions iid_options(const RunConfig& c) {
  IidCgfOptions o;
  o.tolerance = c.tolerances.iid;
  return o;
}

GeometricCgfOptions geometric_options(const RunConfig& c) {
  GeometricCgfOptions o;
  o.lambda_tolerance = c.tolerances.lambda;
  o.max_intervals = c.tolerances.max_intervals;
  return o;
}

LegendreOptions legendre_options(const RunConfig& c) {
  LegendreOptions o;
  o.derivative_tolerance = c.tolerances.legendre;
  return o;
}

// Theta grid with 0 inserted, so the sampled CGF passes through the origin
// exactly.
std::vector<double> theta_points(const RunConfig& c) {
  std::vector<double> t = c.theta_grid.points();
  if (std::none_of(t.begin(), t.end(), [](double v) { return v == 0.0; })) {
    t.insert(std::upper_bound(t.begin(), t.end(), 0.0), 0.0);
  }
  return t;
}

std::string bool_cell(bool b) { return b ? "true" : "false"; }

nlohmann::json cell_to_json(const std::string& cell) {
  if (cell == "true") return true;
  if (cell == "false") return false;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (!cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v)) return v;
  return cell;
}

nlohmann::json table_to_json(const CsvTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows()) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) row[table.header()[i]] = cell_to_json(r[i]);
    rows.push_back(row);
  }
  return rows;
}

// Writes <stem>.csv/.json/.svg as selected. The JSON document carries the
// effective configuration, the rows, and any extra fields.
void emit(const RunConfig& c, const std::string& stem, const CsvTable& table, const LinePlot* plot,
          CommandResult& result, const nlohmann::json& extra = nlohmann::json::object()) {
  const std::string csv = table.str();
  if (c.formats.csv) {
    write_atomic(c.out / (stem + ".csv"), csv);
    result.files.push_back(c.out / (stem + ".csv"));
  }
  if (c.formats.json) {
    nlohmann::json doc = extra;
    doc["config"] = config_to_json(c);
    doc["rows"] = table_to_json(table);
    write_atomic(c.out / (stem + ".json"), doc.dump(2) + "\n");
    result.files.push_back(c.out / (stem + ".json"));
  }
  if (c.formats.svg && plot) {
    write_atomic(c.out / (stem + ".svg"), render_svg(*plot, crc32_hex(csv)));
    result.files.push_back(c.out / (stem + ".svg"));
  }
}

struct RateTable {
  std::vector<double> x;
  std::vector<RateValue> values;
  double zero_location = 0.0;
  int max_n_used = 0;
};

RateTable iid_rate(const RunConfig& c, const std::vector<double>& xs) {
  const std::vector<double> thetas = theta_points(c);
  ConvexFunction f;
  const PeriodicFunctionSpec spec = c.function;
  const IidCgfOptions opts = iid_options(c);
  f.value = [spec, opts](double t) { return cgf_iid(spec, t, opts).value; };
  f.derivative = [spec, opts](double t) { return cgf_iid(spec, t, opts).derivative; };
  f.lower = thetas.front();
  f.upper = thetas.back();
  const RateFunctionCurve curve = gartner_ellis_rate(f, xs, legendre_options(c));
  return {curve.x_grid, curve.values, curve.zero_location, 0};
}

RateTable geometric_rate(const RunConfig& c, int q, const std::vector<double>& xs) {
  const std::vector<double> thetas = theta_points(c);
  const GeometricCurve samples = cgf_geometric_samples(c.function, q, thetas, geometric_options(c));
  const RateFunctionCurve curve = gartner_ellis_rate(to_curve(samples), xs, legendre_options(c));
  return {curve.x_grid, curve.values, curve.zero_location, samples.max_n_used};
}

double rate_difference(const RateValue& a, const RateValue& b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) return kInf;
  return std::abs(a.value - b.value);
}

double rate_cell_value(const RateValue& v) { return v.is_infinite() ? kInf : v.value; }

struct Distance {
  double sup = 0.0;
  double finite_sup = 0.0;
  int infinite_points = 0;
};

Distance distance(const RateTable& a, const RateTable& b) {
  Distance d;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff = rate_difference(a.values[i], b.values[i]);
    d.sup = std::max(d.sup, diff);
    if (std::isfinite(diff)) {
      d.finite_sup = std::max(d.finite_sup, diff);
    } else {
      ++d.infinite_points;
    }
  }
  return d;
}

// Maximal x intervals where the rate is infinite, padded by half a grid step.
std::vector<std::pair<double, double>> infinite_bands(const RateTable& r) {
  std::vector<std::pair<double, double>> out;
  const std::size_t n = r.x.size();
  const double half = n > 1 ? 0.5 * (r.x[1] - r.x[0]) : 0.5;
  for (std::size_t i = 0; i < n;) {
    if (!r.values[i].is_infinite()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && r.values[j + 1].is_infinite()) ++j;
    out.emplace_back(std::max(r.x.front(), r.x[i] - half), std::min(r.x.back(), r.x[j] + half));
    i = j + 1;
  }
  return out;
}

std::string mode_name(const RunConfig& c) { return c.mode == Mode::iid ? "iid" : "geometric q=" + std::to_string(c.q); }

}  // namespace

CommandResult cmd_cgf(const RunConfig& c) {
  CommandResult result;
  const std::vector<double> thetas = c.theta_grid.points();
  CsvTable table({"theta", "value", "derivative", "n_used"});
  Series series{"Lambda", {}, {}};
  if (c.mode == Mode::iid) {
    std::vector<CgfSample> s(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) s[i] = cgf_iid(c.function, thetas[i], iid_options(c));
    for (const auto& v : s) {
      table.add_row({format_number(v.theta), format_number(v.value), format_number(v.derivative), "0"});
      series.x.push_back(v.theta);
      series.y.push_back(v.value);
    }
  } else {
    const GeometricCurve curve = cgf_geometric_samples(c.function, c.q, thetas, geometric_options(c));
    for (const auto& g : curve.samples) {
      table.add_row({format_number(g.sample.theta), format_number(g.sample.value), format_number(g.sample.derivative),
                     std::to_string(g.n_used)});
      series.x.push_back(g.sample.theta);
      series.y.push_back(g.sample.value);
    }
  }
  LinePlot plot{"Cumulant generating function (" + mode_name(c) + ")", "theta", "Lambda(theta)", {series}, {}};
  emit(c, "cgf", table, &plot, result);
  result.message = "cgf: " + std::to_string(thetas.size()) + " theta values";
  return result;
}

CommandResult cmd_rate(const RunConfig& c) {
  CommandResult result;
  const std::vector<double> xs = c.x_grid.points();
  const RateTable rate = c.mode == Mode::iid ? iid_rate(c, xs) : geometric_rate(c, c.q, xs);
  CsvTable table({"x", "value", "is_infinite", "zero_location"});
  Series series{"rate", {}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const RateValue& v = rate.values[i];
    table.add_row({format_number(xs[i]), format_number(rate_cell_value(v)), bool_cell(v.is_infinite()),
                   format_number(rate.zero_location)});
    series.x.push_back(xs[i]);
    series.y.push_back(rate_cell_value(v));
  }
  LinePlot plot{"Rate function (" + mode_name(c) + ")", "x", "I(x)", {series}, infinite_bands(rate)};
  emit(c, "rate", table, &plot, result);

  if (c.mode == Mode::geometric) {
    const RateTable iid = iid_rate(c, xs);
    const Distance d = distance(rate, iid);
    CsvTable cmp({"x", "geometric_value", "iid_value", "abs_difference", "sup_difference", "finite_sup_difference"});
    Series iid_series{"iid", {}, {}};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cmp.add_row({format_number(xs[i]), format_number(rate_cell_value(rate.values[i])),
                   format_number(rate_cell_value(iid.values[i])),
                   format_number(rate_difference(rate.values[i], iid.values[i])), format_number(d.sup),
                   format_number(d.finite_sup)});
      iid_series.x.push_back(xs[i]);
      iid_series.y.push_back(rate_cell_value(iid.values[i]));
    }
    series.name = "q=" + std::to_string(c.q);
    LinePlot cmp_plot{"Rate functions: q=" + std::to_string(c.q) + " vs iid", "x", "I(x)", {series, iid_series},
                      infinite_bands(rate)};
    emit(c, "rate_vs_iid", cmp, &cmp_plot, result);
    result.message = "rate: sup difference to iid " + format_number(d.sup) + " (finite part " +
                     format_number(d.finite_sup) + ")";
  } else {
    result.message = "rate: " + std::to_string(xs.size()) + " x values";
  }
  return result;
}

CommandResult cmd_sweep_q(const RunConfig& c) {
  CommandResult result;
  const std::vector<double> xs = c.x_grid.points();
  const RateTable iid = iid_rate(c, xs);
  CsvTable table({"q", "sup_distance", "finite_sup_distance", "infinite_points", "max_n_used"});
  std::vector<std::string> curve_header{"x", "iid"};
  std::vector<RateTable> rates;
  for (int q : c.q_list) {
    rates.push_back(geometric_rate(c, q, xs));
    const Distance d = distance(rates.back(), iid);
    table.add_row({std::to_string(q), format_number(d.sup), format_number(d.finite_sup),
                   std::to_string(d.infinite_points), std::to_string(rates.back().max_n_used)});
    curve_header.push_back("q" + std::to_string(q));
  }
  CsvTable curves(curve_header);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::string> row{format_number(xs[i]), format_number(rate_cell_value(iid.values[i]))};
    for (const auto& r : rates) row.push_back(format_number(rate_cell_value(r.values[i])));
    curves.add_row(row);
  }
  LinePlot plot{"Rate functions I_q against the iid rate", "x", "I(x)", {}, {}};
  for (std::size_t k = 0; k < rates.size(); ++k) {
    Series s{"q=" + std::to_string(c.q_list[k]), xs, {}};
    for (const auto& v : rates[k].values) s.y.push_back(rate_cell_value(v));
    plot.series.push_back(s);
  }
  Series s{"iid", xs, {}};
  for (const auto& v : iid.values) s.y.push_back(rate_cell_value(v));
  plot.series.push_back(s);
  emit(c, "sweep", table, nullptr, result);
  emit(c, "sweep_rates", curves, &plot, result);
  result.message = "sweep-q: " + std::to_string(c.q_list.size()) + " values of q";
  return result;
}

CommandResult cmd_empirical(const RunConfig& c) {
  CommandResult result;
  const GapSequence seq = c.effective_sequence();
  const int exact_limit = max_exact_n(seq);
  if (c.method == "exact" && c.n > exact_limit) {
    throw BudgetError("empirical: exact quadrature is feasible up to n = " + std::to_string(exact_limit) +
                      " for " + seq.describe() + "; use --method mc or auto");
  }
  const std::vector<double> thetas = c.theta_grid.points();
  CsvTable table({"theta", "n", "mgf", "scaled_cgf", "method", "error_estimate"});
  CsvTable fits({"theta", "limit", "slope", "residual"});
  Series cgf_series{"extrapolated", {}, {}};
  Series last_series{"n=" + std::to_string(c.n), {}, {}};
  for (const double theta : thetas) {
    std::vector<int> ns;
    std::vector<double> vs;
    for (int n = 1; n <= c.n; ++n) {
      const bool exact = c.method == "exact" || (c.method == "auto" && n <= exact_limit);
      const MgfRecord rec = exact ? exact_mgf(c.function, seq, n, theta) : mc_mgf(c.function, seq, n, theta, c.samples, c.seed);
      const double scaled = rec.log_value / n;
      table.add_row({format_number(theta), std::to_string(n), format_number(rec.value), format_number(scaled),
                     to_string(rec.method), format_number(rec.error_estimate)});
      ns.push_back(n);
      vs.push_back(scaled);
    }
    last_series.x.push_back(theta);
    last_series.y.push_back(vs.back());
    if (ns.size() >= 3) {
      const Extrapolation e = richardson_in_inverse_n(ns, vs);
      fits.add_row({format_number(theta), format_number(e.limit), format_number(e.slope), format_number(e.residual)});
      cgf_series.x.push_back(theta);
      cgf_series.y.push_back(e.limit);
    }
  }
  emit(c, "empirical", table, nullptr, result);
  if (!fits.rows().empty()) {
    Series iid{"iid", {}, {}};
    for (double t : cgf_series.x) {
      iid.x.push_back(t);
      iid.y.push_back(cgf_iid(c.function, t, iid_options(c)).value);
    }
    LinePlot plot{"Scaled cumulant generating function, " + seq.describe(), "theta", "(1/n) log E exp(theta S_n)",
                  {last_series, cgf_series, iid}, {}};
    emit(c, "extrapolation", fits, &plot, result);
  }
  if (c.t) {
    const TailEstimate tail = tail_probability(c.function, seq, c.n, *c.t, c.samples, c.seed);
    CsvTable t({"n", "t", "probability", "wilson_low", "wilson_high", "hits", "samples", "one_sided", "rate"});
    t.add_row({std::to_string(c.n), format_number(*c.t), format_number(tail.probability),
               format_number(tail.wilson_low), format_number(tail.wilson_high), std::to_string(tail.hits),
               std::to_string(tail.samples), bool_cell(tail.one_sided), format_number(tail.rate)});
    emit(c, "tail", t, nullptr, result);
  }
  result.message = "empirical: " + seq.describe() + ", n = 1.." + std::to_string(c.n);
  return result;
}

CommandResult cmd_verify(const RunConfig& c) {
  CommandResult result;
  const std::vector<CheckResult> checks = run_verify_suite(c);
  write_atomic(c.out / "verify.json", verify_report(c, checks).dump(2) + "\n");
  result.files.push_back(c.out / "verify.json");
  std::string failed;
  for (const auto& ch : checks) {
    if (!ch.pass) failed += (failed.empty() ? "" : ", ") + ch.name;
  }
  if (failed.empty()) {
    result.message = "verify: all " + std::to_string(checks.size()) + " checks passed";
  } else {
    result.exit_code = kExitVerifyFailed;
    result.message = "verify: failed checks: " + failed;
  }
  return result;
}

CommandResult cmd_dio(const RunConfig& c) {
  CommandResult result;
  const GapSequence seq = c.effective_sequence();
  const int n = std::min(c.n, seq.available());
  const std::vector<BigInt> terms = seq.terms(n);
  SolutionCount count;
  try {
    count = count_solutions(terms, c.m, c.window);
  } catch (const BudgetError&) {
    if (c.window) {
      const std::span<const BigInt> all(terms);
      count = count_solutions_pruned(all.subspan(c.window->first - 1, c.window->second - c.window->first + 1), c.m);
    } else {
      count = count_solutions_pruned(terms, c.m);
    }
  }
  CsvTable table({"n", "m", "total", "nontrivial", "method"});
  table.add_row({std::to_string(count.n), std::to_string(count.m), std::to_string(count.total),
                 std::to_string(count.nontrivial), count.method});
  nlohmann::json extra = nlohmann::json::object();
  nlohmann::json seq_terms = nlohmann::json::array();
  for (const auto& t : count.sequence) seq_terms.push_back(t.str());
  extra["terms"] = seq_terms;
  emit(c, "dio", table, nullptr, result, extra);
  if (c.d) {
    const GapCondition g = verify_gap_condition(terms, c.m, *c.d);
    CsvTable gap({"m", "d", "k0", "certified", "lower_bound_holds", "method"});
    gap.add_row({std::to_string(c.m), std::to_string(*c.d), g.k0 ? std::to_string(*g.k0) : "none",
                 bool_cell(g.certified), bool_cell(g.lower_bound_holds), g.count ? g.count->method : "trivial"});
    emit(c, "gap_condition", gap, nullptr, result);
  }
  result.message = "dio: total " + std::to_string(count.total) + ", nontrivial " + std::to_string(count.nontrivial);
  return result;
}

CommandResult dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::cgf: return cmd_cgf(c);
    case Command::rate: return cmd_rate(c);
    case Command::sweep_q: return cmd_sweep_q(c);
    case Command::empirical: return cmd_empirical(c);
    case Command::verify: return cmd_verify(c);
    case Command::dio: return cmd_dio(c);
  }
  throw ConfigError("unknown command");
}

namespace {

void report_error(const std::string& kind, const std::string& message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << std::endl;
}

}  // namespace

int run_main(int argc, char** argv) {
  try {
    const RunConfig config = parse_command_line(argc, argv);
    const CommandResult r = dispatch(config);
    if (r.exit_code != kExitOk) {
      report_error("verify", r.message, r.exit_code);
      return r.exit_code;
    }
    std::cout << r.message << "\n";
    for (const auto& f : r.files) std::cout << "  " << f.string() << "\n";
    return kExitOk;
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return kExitOk;
  } catch (const ConvergenceError& e) {
    report_error(e.kind(), e.what(), kExitNumerical);
    return kExitNumerical;
  } catch (const NonConvexError& e) {
    report_error(e.kind(), e.what(), kExitNumerical);
    return kExitNumerical;
  } catch (const Error& e) {
    report_error(e.kind(), e.what(), kExitConfig);
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("internal", e.what(), kExitNumerical);
    return kExitNumerical;
  }
}

}  // namespace lacldp::cli
