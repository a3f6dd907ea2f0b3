#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cfbell/quantum.hpp"

namespace cfbell {

/// Which local measurements the search ranges over.
enum class MeasurementClass {
  beamsplitter,  ///< multiport beamsplitter phases, any d
  qubit_bloch    ///< arbitrary projective qubit measurements, d = 2 only
};

std::string_view to_string(MeasurementClass m);
MeasurementClass parse_measurement_class(std::string_view text);

struct OptimizerConfig {
  std::size_t starts = 64;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  std::size_t max_iterations = 5000;  ///< Nelder-Mead iterations per start
  double initial_step = 0.3;          ///< simplex edge, radians
  unsigned threads = 1;
  MeasurementClass measurements = MeasurementClass::beamsplitter;
  std::size_t max_seesaw_rounds = 300;
};

/// Seed of task `index` derived from a base seed; index 0 keeps the base seed.
std::uint64_t task_seed(std::uint64_t base, std::uint64_t index);

/// Uniform doubles in [lo, hi) from a splitmix64 stream; identical on every platform.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

using Objective = std::function<double(std::span<const double>)>;

struct LocalSearchResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/**
 * Derivative-free maximization by Nelder-Mead with dimension-adapted
 * coefficients. The starting point is a simplex vertex, so the result is
 * never worse than f(x0). After the simplex collapses (objective spread below
 * `tolerance`) the search restarts around the best vertex and stops once a
 * restart gains less than `tolerance`.
 */
LocalSearchResult maximize_nelder_mead(const Objective& f, std::vector<double> x0, double step,
                                       double tolerance, std::size_t max_iterations);

struct StartSummary {
  std::size_t index;
  double value;
  bool converged;
};

/**
 * Multi-start maximization: start 0 at `first_start` (zeros if empty), later
 * starts uniform in [-pi, pi) from the per-start seed stream. Ties go to the
 * lowest start index.
 */
struct MultiStartResult {
  LocalSearchResult best;
  std::size_t best_start = 0;
  std::vector<StartSummary> starts;
  std::size_t evaluations = 0;
};
MultiStartResult multistart_maximize(const Objective& f, std::size_t dimension,
                                     const OptimizerConfig& config,
                                     std::span<const double> first_start = {});

struct OptimizationResult {
  double best_value = 0.0;
  MeasurementClass measurements = MeasurementClass::beamsplitter;
  std::optional<PhaseConfiguration> phases;  ///< beamsplitter searches
  std::optional<BlochSettings> bloch;        ///< qubit searches
  std::optional<StateVector> state;
  std::vector<double> state_parameters;      ///< family angles, when a family was optimized
  std::vector<StartSummary> starts;
  std::vector<double> trace;                 ///< see-saw objective after every half step (best start)
  bool converged = false;
  std::size_t iterations = 0;                ///< objective evaluations (plus see-saw rounds)

  MeasurementSet measurement_set(const Scenario& scenario) const;
};

/// Measurements from free parameters of the given class.
MeasurementSet measurements_from_free(const Scenario& scenario, MeasurementClass m,
                                      std::span<const double> free);
std::size_t measurement_parameter_count(const Scenario& scenario, MeasurementClass m);

OptimizationResult optimize_phases(const StateVector& state, const BellExpression& expression,
                                   const OptimizerConfig& config = {});

/// Alternates the dominant eigenvector of the Bell operator with a local measurement search.
OptimizationResult seesaw(const BellExpression& expression, const OptimizerConfig& config = {});

enum class StateFamily { ghz_qubit, ghz_qutrit, w_state };

std::string_view to_string(StateFamily family);
StateFamily parse_state_family(std::string_view text);
std::size_t family_parameter_count(StateFamily family);
std::vector<std::string_view> family_parameter_names(StateFamily family);
Scenario family_scenario(StateFamily family);
StateVector family_state(StateFamily family, std::span<const double> angles);

/// Joint search over the family angles and, unless `fixed` is given, the measurements.
OptimizationResult optimize_state_family(StateFamily family, const BellExpression& expression,
                                         const OptimizerConfig& config = {},
                                         const std::optional<PhaseConfiguration>& fixed = {});

struct SweepRow {
  std::vector<double> parameters;
  double best_value;
  bool converged;
};

/// Independent optimize_phases per grid point; point k uses task_seed(config.seed, k).
std::vector<SweepRow> sweep(StateFamily family, const std::vector<std::vector<double>>& grid,
                            const BellExpression& expression, const OptimizerConfig& config = {});

}  // namespace cfbell
