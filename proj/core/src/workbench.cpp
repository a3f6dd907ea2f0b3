#include "cfbell/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cfbell/local_polytope.hpp"
#include "cfbell/reference.hpp"

namespace cfbell {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\n\r");
  return s.substr(a, b - a + 1);
}

double parse_decimal(const std::string& token) {
  if (token.empty()) throw DomainError("empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw DomainError("malformed number '" + token + "'");
  }
  if (used != token.size() || !std::isfinite(v)) throw DomainError("malformed number '" + token + "'");
  return v;
}

}  // namespace

double parse_angle(const std::string& raw) {
  const auto token = trim(raw);
  if (token.size() >= 2 && token.compare(token.size() - 2, 2, "pi") == 0) {
    const auto coeff = token.substr(0, token.size() - 2);
    double c = 1.0;
    if (coeff.empty() || coeff == "+") c = 1.0;
    else if (coeff == "-") c = -1.0;
    else if (coeff.find('/') != std::string::npos) c = to_double(parse_rational(coeff));
    else c = parse_decimal(coeff);
    return c * std::numbers::pi;
  }
  return parse_decimal(token);
}

StateDescriptor parse_state(const std::string& text, int n, int d) {
  StateDescriptor out;
  if (text.empty()) return out;
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  const auto args = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  const Scenario sc(n, d);

  if (kind == "ghz_qubit" || kind == "ghz_qutrit" || kind == "w_state") {
    const auto family = parse_state_family(kind);
    if (colon == std::string::npos) {
      out.free_family = family;
      return out;
    }
    std::vector<double> angles;
    for (const auto& a : split(args, ',')) angles.push_back(parse_angle(a));
    out.state = family_state(family, angles);
  } else if (kind == "ghz_max") {
    out.state = ghz_max(n, d);
  } else if (kind == "amplitudes") {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(sc.outcome_tuples()));
    std::set<std::size_t> seen;
    for (const auto& entry : split(args, ',')) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw DomainError("amplitude entry '" + entry + "' needs basis=value");
      const auto basis = trim(entry.substr(0, eq));
      if (basis.size() != static_cast<std::size_t>(n))
        throw DomainError("basis label '" + basis + "' must have " + std::to_string(n) + " digits");
      Outcomes digits;
      for (char c : basis) {
        if (c < '0' || c > '9') throw DomainError("basis label '" + basis + "' is not a digit string");
        digits.push_back(c - '0');
      }
      const auto index = sc.outcome_index(digits);
      if (!seen.insert(index).second) throw DomainError("basis label '" + basis + "' repeated");
      const auto value = entry.substr(eq + 1);
      const auto sep = value.find(':');
      const double re = parse_decimal(trim(value.substr(0, sep)));
      const double im = sep == std::string::npos ? 0.0 : parse_decimal(trim(value.substr(sep + 1)));
      v(static_cast<Eigen::Index>(index)) = Complex(re, im);
    }
    out.state = StateVector(sc, std::move(v));
  } else {
    throw DomainError("unknown state kind '" + kind + "'");
  }
  if (out.state && !(out.state->scenario() == sc))
    throw DomainError("state '" + kind + "' lives in N=" + std::to_string(out.state->scenario().parties()) +
                      ", d=" + std::to_string(out.state->scenario().outcomes()) +
                      " but the run uses N=" + std::to_string(n) + ", d=" + std::to_string(d));
  return out;
}

PhaseConfiguration parse_phases(const std::string& text, int n, int d) {
  const auto parties = split(text, ';');
  if (parties.size() != static_cast<std::size_t>(n))
    throw DomainError("phases need " + std::to_string(n) + " ';'-separated parties, got " +
                      std::to_string(parties.size()));
  std::vector<std::vector<std::vector<double>>> phases;
  for (const auto& party : parties) {
    const auto settings = split(party, '|');
    if (settings.size() != 2) throw DomainError("each party needs two '|'-separated phase vectors");
    auto& p = phases.emplace_back();
    for (const auto& s : settings) {
      auto& v = p.emplace_back();
      for (const auto& a : split(s, ',')) v.push_back(parse_angle(a));
    }
  }
  return PhaseConfiguration(Scenario(n, d), std::move(phases));
}

std::vector<std::vector<double>> parse_grid(const std::string& text) {
  std::vector<std::vector<double>> grid;
  for (const auto& point : split(text, ';')) {
    auto& p = grid.emplace_back();
    for (const auto& a : split(point, ',')) p.push_back(parse_angle(a));
  }
  return grid;
}

bool operator==(const RunSpec& a, const RunSpec& b) { return to_json(a) == to_json(b); }

Json to_json(const RunSpec& spec) {
  Json j{{"command", spec.command},
         {"n", spec.n},
         {"d", spec.d},
         {"family", std::string(to_string(spec.family))},
         {"state", spec.state},
         {"phases", spec.phases},
         {"seed", spec.optimizer.seed},
         {"starts", spec.optimizer.starts},
         {"tol", spec.optimizer.tolerance},
         {"max_iter", spec.optimizer.max_iterations},
         {"step", spec.optimizer.initial_step},
         {"threads", spec.optimizer.threads},
         {"measurements", std::string(to_string(spec.optimizer.measurements))}};
  if (spec.violation) j["violation"] = *spec.violation;
  j["grid"] = spec.grid;
  j["out"] = spec.out;
  j["format"] = spec.format;
  j["timestamp"] = spec.timestamp;
  return j;
}

namespace {

const std::set<std::string> kKeys = {"command", "n",       "d",         "family",   "state",
                                     "phases",  "seed",    "starts",    "tol",      "max_iter",
                                     "step",    "threads", "measurements", "violation", "grid",
                                     "out",     "format",  "timestamp"};

/// Where a value came from, for error locations.
std::string where(const std::set<std::string>& flags, const std::string& key, const std::string& flag) {
  return flags.count(key) ? flag : "config:" + key;
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config:" + key, e.what());
  }
}

void validate(const RunSpec& spec, const std::set<std::string>& flags) {
  if (std::find(kCommands.begin(), kCommands.end(), spec.command) == kCommands.end())
    throw ParseError("command", "unknown command '" + spec.command + "'");
  if (spec.n < 2) throw ParseError(where(flags, "n", "--n"), "N must be >= 2");
  if (spec.d < 2) throw ParseError(where(flags, "d", "--d"), "d must be >= 2");
  if (spec.optimizer.starts < 1) throw ParseError(where(flags, "starts", "--starts"), "starts must be >= 1");
  if (!(spec.optimizer.tolerance > 0.0)) throw ParseError(where(flags, "tol", "--tol"), "tol must be > 0");
  if (spec.optimizer.threads < 1) throw ParseError(where(flags, "threads", "--threads"), "threads must be >= 1");
  if (spec.optimizer.max_iterations < 1)
    throw ParseError(where(flags, "max_iter", "--max-iter"), "max-iter must be >= 1");
  if (spec.format != "json" && spec.format != "csv")
    throw ParseError(where(flags, "format", "--format"), "format must be json or csv");
  if (spec.format == "csv" && spec.command != "sweep" && spec.command != "violate")
    throw ParseError(where(flags, "format", "--format"), "csv output exists for sweep and violate only");
  try {
    parse_state(spec.state, spec.n, spec.d);
  } catch (const Error& e) {
    throw ParseError(where(flags, "state", "--state"), e.what());
  }
  if (spec.phases != "optimize") {
    try {
      parse_phases(spec.phases, spec.n, spec.d);
    } catch (const Error& e) {
      throw ParseError(where(flags, "phases", "--phases"), e.what());
    }
  }
  if (!spec.grid.empty()) {
    try {
      parse_grid(spec.grid);
    } catch (const Error& e) {
      throw ParseError(where(flags, "grid", "--grid"), e.what());
    }
  }
}

RunSpec from_json_unchecked(const Json& j) {
  if (!j.is_object()) throw ParseError("config", "run spec must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) throw ParseError("config:" + key, "unknown key");
  RunSpec spec;
  if (j.contains("command")) spec.command = get_as<std::string>(j, "command");
  if (j.contains("n")) spec.n = get_as<int>(j, "n");
  if (j.contains("d")) spec.d = get_as<int>(j, "d");
  try {
    if (j.contains("family")) spec.family = parse_family(get_as<std::string>(j, "family"));
    if (j.contains("measurements"))
      spec.optimizer.measurements = parse_measurement_class(get_as<std::string>(j, "measurements"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(j.contains("family") ? "config:family" : "config:measurements", e.what());
  }
  if (j.contains("state")) spec.state = get_as<std::string>(j, "state");
  if (j.contains("phases")) spec.phases = get_as<std::string>(j, "phases");
  if (j.contains("seed")) spec.optimizer.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("starts")) spec.optimizer.starts = get_as<std::size_t>(j, "starts");
  if (j.contains("tol")) spec.optimizer.tolerance = get_as<double>(j, "tol");
  if (j.contains("max_iter")) spec.optimizer.max_iterations = get_as<std::size_t>(j, "max_iter");
  if (j.contains("step")) spec.optimizer.initial_step = get_as<double>(j, "step");
  if (j.contains("threads")) spec.optimizer.threads = get_as<unsigned>(j, "threads");
  if (j.contains("violation")) spec.violation = get_as<double>(j, "violation");
  if (j.contains("grid")) spec.grid = get_as<std::string>(j, "grid");
  if (j.contains("out")) spec.out = get_as<std::string>(j, "out");
  if (j.contains("format")) spec.format = get_as<std::string>(j, "format");
  if (j.contains("timestamp")) spec.timestamp = get_as<bool>(j, "timestamp");
  return spec;
}

}  // namespace

RunSpec runspec_from_json(const Json& j) {
  auto spec = from_json_unchecked(j);
  validate(spec, {});
  return spec;
}

namespace {

RunSpec parse_impl(const std::optional<std::string>& config_text, const std::vector<std::string>& args) {
  CLI::App app{"cfbell"};
  std::string command, config_path, family, state, phases, grid, out, format, measurements;
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  std::size_t starts = 0, max_iter = 0;
  double tol = 0, step = 0, violation = 0;
  unsigned threads = 0;
  app.add_option("command", command, "subcommand");
  app.add_option("--config", config_path, "JSON run spec");
  auto* o_n = app.add_option("--n", n);
  auto* o_d = app.add_option("--d", d);
  auto* o_family = app.add_option("--family", family);
  auto* o_state = app.add_option("--state", state);
  auto* o_phases = app.add_option("--phases", phases);
  auto* o_seed = app.add_option("--seed", seed);
  auto* o_starts = app.add_option("--starts", starts);
  auto* o_tol = app.add_option("--tol", tol);
  auto* o_max_iter = app.add_option("--max-iter", max_iter);
  auto* o_step = app.add_option("--step", step);
  auto* o_threads = app.add_option("--threads", threads);
  auto* o_measurements = app.add_option("--measurements", measurements);
  auto* o_violation = app.add_option("--violation", violation);
  auto* o_grid = app.add_option("--grid", grid);
  auto* o_out = app.add_option("--out", out);
  auto* o_format = app.add_option("--format", format);
  auto* o_no_ts = app.add_flag("--no-timestamp");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ParseError("arguments", e.what());
  }

  RunSpec spec;
  if (config_text) {
    Json j;
    try {
      j = Json::parse(*config_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("config", e.what());
    }
    spec = from_json_unchecked(j);
  } else if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ParseError("--config", "cannot read '" + config_path + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("config", e.what());
    }
    spec = from_json_unchecked(j);
  }

  std::set<std::string> flags;
  auto given = [&](CLI::Option* o, const char* key) {
    if (o->count() == 0) return false;
    flags.insert(key);
    return true;
  };
  if (!command.empty()) spec.command = command;
  if (given(o_n, "n")) spec.n = n;
  if (given(o_d, "d")) spec.d = d;
  if (given(o_family, "family")) {
    try {
      spec.family = parse_family(family);
    } catch (const Error& e) {
      throw ParseError("--family", e.what());
    }
  }
  if (given(o_state, "state")) spec.state = state;
  if (given(o_phases, "phases")) spec.phases = phases;
  if (given(o_seed, "seed")) spec.optimizer.seed = seed;
  if (given(o_starts, "starts")) spec.optimizer.starts = starts;
  if (given(o_tol, "tol")) spec.optimizer.tolerance = tol;
  if (given(o_max_iter, "max_iter")) spec.optimizer.max_iterations = max_iter;
  if (given(o_step, "step")) spec.optimizer.initial_step = step;
  if (given(o_threads, "threads")) spec.optimizer.threads = threads;
  if (given(o_measurements, "measurements")) {
    try {
      spec.optimizer.measurements = parse_measurement_class(measurements);
    } catch (const Error& e) {
      throw ParseError("--measurements", e.what());
    }
  }
  if (given(o_violation, "violation")) spec.violation = violation;
  if (given(o_grid, "grid")) spec.grid = grid;
  if (given(o_out, "out")) spec.out = out;
  if (given(o_format, "format")) spec.format = format;
  if (o_no_ts->count() > 0) spec.timestamp = false;

  if (spec.command.empty()) throw ParseError("command", "missing subcommand");
  validate(spec, flags);
  return spec;
}

}  // namespace

RunSpec parse_runspec(const std::vector<std::string>& args) { return parse_impl(std::nullopt, args); }

RunSpec parse_runspec(const std::string& config_text, const std::vector<std::string>& args) {
  return parse_impl(config_text, args);
}

namespace {

struct CommandOutput {
  Json result;
  std::string csv;  // non-empty when the report is CSV
  std::size_t iterations = 0;
};

BellExpression spec_expression(const RunSpec& spec) {
  return bell_expression(Scenario(spec.n, spec.d), spec.family);
}

StateVector require_state(const RunSpec& spec) {
  auto s = parse_state(spec.state, spec.n, spec.d);
  if (!s.state) throw DomainError(spec.command + " needs a concrete --state (family name with angles, ghz_max or amplitudes)");
  return *s.state;
}

CommandOutput dispatch(const RunSpec& spec) {
  CommandOutput out;
  const EnumerationOptions enumeration{kDefaultEnumerationBudget, spec.optimizer.threads};
  const auto& cmd = spec.command;

  if (cmd == "classical") {
    const auto expr = spec_expression(spec);
    const auto r = classical_maximum(expr, enumeration);
    out.result = to_json(r);
    out.result["expression"] = to_json(expr);
    out.iterations = r.strategies;
  } else if (cmd == "facet") {
    const auto r = facet_check(spec_expression(spec), enumeration);
    out.result = to_json(r);
    out.iterations = strategy_count(r.scenario);
  } else if (cmd == "violate") {
    if (spec.phases == "optimize") throw DomainError("violate needs explicit --phases");
    const auto state = require_state(spec);
    const auto phases = parse_phases(spec.phases, spec.n, spec.d);
    const auto expr = spec_expression(spec);
    if (spec.format == "csv") {
      out.csv = table_to_csv(joint_probabilities(state, phases));
    } else {
      out.result = Json{{"bell_value", quantum_bell_value(state, phases, expr)},
                        {"state", to_json(state)},
                        {"phases", to_json(phases)}};
    }
    out.iterations = 1;
  } else if (cmd == "optimize") {
    const auto desc = parse_state(spec.state, spec.n, spec.d);
    const auto expr = spec_expression(spec);
    OptimizationResult r;
    if (desc.free_family) {
      std::optional<PhaseConfiguration> fixed;
      if (spec.phases != "optimize") fixed = parse_phases(spec.phases, spec.n, spec.d);
      r = optimize_state_family(*desc.free_family, expr, spec.optimizer, fixed);
    } else if (desc.state) {
      if (spec.phases != "optimize") throw DomainError("optimize over a fixed state needs --phases optimize");
      r = optimize_phases(*desc.state, expr, spec.optimizer);
    } else {
      throw DomainError("optimize needs --state");
    }
    out.result = to_json(r);
    out.iterations = r.iterations;
  } else if (cmd == "seesaw") {
    const auto r = seesaw(spec_expression(spec), spec.optimizer);
    out.result = to_json(r);
    out.iterations = r.iterations;
  } else if (cmd == "sweep") {
    const auto desc = parse_state(spec.state, spec.n, spec.d);
    if (!desc.free_family) throw DomainError("sweep needs a bare family name in --state");
    if (spec.grid.empty()) throw DomainError("sweep needs --grid");
    const auto rows = sweep(*desc.free_family, parse_grid(spec.grid), spec_expression(spec), spec.optimizer);
    if (spec.format == "csv") {
      out.csv = sweep_to_csv(*desc.free_family, rows);
    } else {
      Json arr = Json::array();
      const auto names = family_parameter_names(*desc.free_family);
      for (const auto& row : rows) {
        Json r;
        for (std::size_t k = 0; k < names.size(); ++k) r[std::string(names[k])] = row.parameters[k];
        r["best_value"] = row.best_value;
        r["converged"] = row.converged;
        arr.push_back(r);
      }
      out.result = Json{{"rows", arr}};
    }
    out.iterations = rows.size();
  } else if (cmd == "threshold") {
    if (!spec.violation) throw DomainError("threshold needs --violation");
    out.result = Json{{"violation", *spec.violation}, {"f_thr", noise_threshold(*spec.violation)}};
    out.iterations = 1;
  } else if (cmd == "reduce") {
    if (spec.n != 3 || spec.family != ExpressionFamily::multipartite)
      throw DomainError("reduce applies to --n 3 with the multipartite family");
    const auto reduced = reduce_to_bipartite(spec_expression(spec));
    const auto classical = classical_maximum(reduced, enumeration);
    const auto quantum = seesaw(reduced, spec.optimizer);
    out.result = Json{{"expression", to_json(reduced)},
                      {"classical_max", to_string(classical.maximum)},
                      {"quantum_max", quantum.best_value},
                      {"seesaw", to_json(quantum)}};
    out.iterations = classical.strategies + quantum.iterations;
  } else if (cmd == "mermin") {
    const auto r = mermin3_max(require_state(spec), spec.optimizer);
    out.result = to_json(r);
    out.iterations = r.iterations;
  } else {
    throw DomainError("unknown command '" + cmd + "'");
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunOutcome run(const RunSpec& spec) {
  Json report;
  // Execution placement (threads, output path) never changes results and is left out.
  Json embedded = to_json(spec);
  embedded.erase("threads");
  embedded.erase("out");
  report["spec"] = embedded;
  if (spec.timestamp) report["timestamp"] = utc_timestamp();

  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome outcome;
  try {
    auto out = dispatch(spec);
    if (!out.csv.empty()) {
      outcome.body = out.csv;
      return outcome;
    }
    report["result"] = std::move(out.result);
    Json diagnostics;
    if (spec.timestamp)
      diagnostics["runtime_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    diagnostics["iterations"] = out.iterations;
    report["diagnostics"] = diagnostics;
  } catch (const ResourceError& e) {
    report["error"] = {{"kind", "resource"}, {"message", e.what()}};
    outcome.exit_status = 2;
  } catch (const std::exception& e) {
    report["error"] = {{"kind", "domain"}, {"message", e.what()}};
    outcome.exit_status = 1;
  }
  outcome.body = report.dump(2) + "\n";
  return outcome;
}

}  // namespace cfbell
