#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfbell/optimizer.hpp"
#include "cfbell/serialize.hpp"

namespace cfbell {

/// Subcommands understood by the workbench.
inline const std::vector<std::string> kCommands = {"classical", "facet",     "violate",
                                                   "optimize",  "seesaw",    "sweep",
                                                   "threshold", "reduce",    "mermin"};

/**
 * A fully resolved workbench invocation.
 *
 * The textual form is a JSON object whose keys mirror the long flags
 * (`n`, `d`, `family`, `state`, `phases`, `seed`, ...). State and phase
 * descriptors stay in their compact text syntax:
 *
 *   state   ghz_qubit:1/4pi | ghz_qutrit:0.9066,0.6663 | w_state:b,x |
 *           ghz_max | amplitudes:000=0.169414,100=0.0461131:0.0 |
 *           a bare family name (ghz_qubit, ghz_qutrit, w_state) = angles free
 *   phases  optimize | party;party;... with party = setting1|setting2 and
 *           setting = comma-separated angles, e.g. 0,-1/12pi|0,1/4pi
 *
 * Angles are decimals in radians or multiples of pi written as
 * `<rational>pi` (`-1/12pi`, `pi`, `0.25pi`).
 */
struct RunSpec {
  std::string command;
  int n = 3;
  int d = 2;
  ExpressionFamily family = ExpressionFamily::multipartite;
  std::string state;
  std::string phases = "optimize";
  OptimizerConfig optimizer;
  std::optional<double> violation;
  std::string grid;  ///< points separated by ';', parameters within a point by ','
  std::string out;
  std::string format = "json";
  bool timestamp = true;

  friend bool operator==(const RunSpec& a, const RunSpec& b);
};

/// Lossless textual form.
Json to_json(const RunSpec& spec);
RunSpec runspec_from_json(const Json& j);

/**
 * Parses command-line arguments (program name excluded). `--config FILE`
 * loads a JSON RunSpec first; flags given on the command line override its
 * values. Unknown keys, out-of-range values and malformed descriptors raise
 * ParseError naming the flag or key.
 */
RunSpec parse_runspec(const std::vector<std::string>& args);
/// Same, with the config text supplied directly instead of read from a file.
RunSpec parse_runspec(const std::string& config_text, const std::vector<std::string>& args);

/// Angle token: decimal radians or `<rational>pi`.
double parse_angle(const std::string& token);

struct StateDescriptor {
  std::optional<StateFamily> free_family;  ///< set when only a family name was given
  std::optional<StateVector> state;
};
StateDescriptor parse_state(const std::string& text, int n, int d);
PhaseConfiguration parse_phases(const std::string& text, int n, int d);
std::vector<std::vector<double>> parse_grid(const std::string& text);

struct RunOutcome {
  std::string body;
  int exit_status = 0;
};

/**
 * Dispatches the command and renders the report. Exit status 0 on success,
 * 1 on domain and numeric errors, 2 on resource errors.
 *
 * JSON reports have the shape {spec, result, diagnostics{runtime_ms,
 * iterations}}; `runtime_ms` and the top-level `timestamp` are omitted when
 * spec.timestamp is false.
 */
RunOutcome run(const RunSpec& spec);

}  // namespace cfbell
