#include "cfbell/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "parallel.hpp"

namespace cfbell {

std::string_view to_string(MeasurementClass m) {
  switch (m) {
    case MeasurementClass::beamsplitter: return "beamsplitter";
    case MeasurementClass::qubit_bloch: return "qubit";
  }
  return "unknown";
}

MeasurementClass parse_measurement_class(std::string_view text) {
  if (text == "beamsplitter") return MeasurementClass::beamsplitter;
  if (text == "qubit" || text == "bloch") return MeasurementClass::qubit_bloch;
  throw DomainError("unknown measurement class '" + std::string(text) + "'");
}

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - std::numbers::pi;
}

std::vector<double> wrapped(std::vector<double> x) {
  for (auto& a : x) a = wrap_angle(a);
  return x;
}

}  // namespace

std::uint64_t task_seed(std::uint64_t base, std::uint64_t index) {
  if (index == 0) return base;
  return splitmix_finalize(base + index * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t UniformStream::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return splitmix_finalize(state_);
}

double UniformStream::uniform(double lo, double hi) {
  const double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

namespace {

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;  // minimized objective (negated f)
};

/// One Nelder-Mead descent on g = -f. Returns true when the simplex collapsed.
bool descend(const Objective& f, Simplex& s, double tolerance, std::size_t& budget,
             std::size_t& evaluations) {
  const std::size_t n = s.points.front().size();
  const double nd = static_cast<double>(n);
  const bool adaptive = n > 2;
  const double alpha = 1.0;
  const double beta = adaptive ? 1.0 + 2.0 / nd : 2.0;
  const double gamma = adaptive ? 0.75 - 1.0 / (2.0 * nd) : 0.5;
  const double delta = adaptive ? 1.0 - 1.0 / nd : 0.5;

  auto g = [&](const std::vector<double>& x) {
    ++evaluations;
    return -f(x);
  };

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (budget > 0) {
    --budget;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    if (s.values[worst] - s.values[best] <= tolerance) {
      double spread = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          spread = std::max(spread, std::abs(s.points[i][k] - s.points[best][k]));
      if (spread <= 1e-6 || s.values[worst] - s.values[best] <= 0.0) return true;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += s.points[i][k];
    }
    for (auto& c : centroid) c /= nd;

    const auto& xw = s.points[worst];
    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - xw[k]);
    const double gr = g(xr);

    if (gr < s.values[best]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + beta * (xr[k] - centroid[k]);
      const double ge = g(xe);
      if (ge < gr) {
        s.points[worst] = xe;
        s.values[worst] = ge;
      } else {
        s.points[worst] = xr;
        s.values[worst] = gr;
      }
      continue;
    }
    if (gr < s.values[second]) {
      s.points[worst] = xr;
      s.values[worst] = gr;
      continue;
    }
    const bool outside = gr < s.values[worst];
    for (std::size_t k = 0; k < n; ++k)
      xc[k] = outside ? centroid[k] + gamma * (xr[k] - centroid[k])
                      : centroid[k] + gamma * (xw[k] - centroid[k]);
    const double gc = g(xc);
    if (outside ? gc <= gr : gc < s.values[worst]) {
      s.points[worst] = xc;
      s.values[worst] = gc;
      continue;
    }
    // Shrink toward the best vertex.
    const auto anchor = s.points[best];
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        s.points[i][k] = anchor[k] + delta * (s.points[i][k] - anchor[k]);
      s.values[i] = g(s.points[i]);
    }
  }
  return false;
}

Simplex make_simplex(const Objective& f, const std::vector<double>& x0, double value0, double step,
                     std::size_t& evaluations) {
  Simplex s;
  s.points.push_back(x0);
  s.values.push_back(-value0);
  for (std::size_t k = 0; k < x0.size(); ++k) {
    auto x = x0;
    x[k] += step;
    s.points.push_back(x);
    ++evaluations;
    s.values.push_back(-f(x));
  }
  return s;
}

}  // namespace

LocalSearchResult maximize_nelder_mead(const Objective& f, std::vector<double> x0, double step,
                                       double tolerance, std::size_t max_iterations) {
  LocalSearchResult out;
  out.x = std::move(x0);
  out.value = f(out.x);
  out.evaluations = 1;
  if (out.x.empty()) {
    out.converged = true;
    return out;
  }
  std::size_t budget = max_iterations;
  constexpr int kMaxRestarts = 20;
  for (int restart = 0; restart < kMaxRestarts && budget > 0; ++restart) {
    Simplex s = make_simplex(f, out.x, out.value, step, out.evaluations);
    const bool collapsed = descend(f, s, tolerance, budget, out.evaluations);
    const auto best = static_cast<std::size_t>(
        std::min_element(s.values.begin(), s.values.end()) - s.values.begin());
    const double gain = -s.values[best] - out.value;
    if (gain > 0.0) {
      out.x = s.points[best];
      out.value = -s.values[best];
    }
    out.converged = collapsed;
    if (!collapsed || (restart > 0 && gain <= tolerance)) break;
  }
  out.iterations = max_iterations - budget;
  return out;
}

MultiStartResult multistart_maximize(const Objective& f, std::size_t dimension,
                                     const OptimizerConfig& config,
                                     std::span<const double> first_start) {
  if (!first_start.empty() && first_start.size() != dimension)
    throw DomainError("first start has wrong dimension");
  const std::size_t starts = std::max<std::size_t>(1, config.starts);
  std::vector<LocalSearchResult> runs(starts);
  detail::for_each_index(starts, config.threads, [&](std::size_t s) {
    std::vector<double> x0(dimension, 0.0);
    if (s == 0) {
      if (!first_start.empty()) x0.assign(first_start.begin(), first_start.end());
    } else {
      UniformStream rng(task_seed(config.seed, s));
      for (auto& x : x0) x = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    runs[s] = maximize_nelder_mead(f, std::move(x0), config.initial_step, config.tolerance,
                                   config.max_iterations);
  });
  MultiStartResult out;
  for (std::size_t s = 0; s < starts; ++s) {
    out.starts.push_back({s, runs[s].value, runs[s].converged});
    out.evaluations += runs[s].evaluations;
    if (s == 0 || runs[s].value > runs[out.best_start].value) out.best_start = s;
  }
  out.best = std::move(runs[out.best_start]);
  return out;
}

std::size_t measurement_parameter_count(const Scenario& scenario, MeasurementClass m) {
  if (m == MeasurementClass::qubit_bloch) {
    if (scenario.outcomes() != 2) throw DomainError("qubit measurements need d = 2");
    return 4 * static_cast<std::size_t>(scenario.parties());
  }
  return 2 * static_cast<std::size_t>(scenario.parties()) *
         static_cast<std::size_t>(scenario.outcomes() - 1);
}

MeasurementSet measurements_from_free(const Scenario& scenario, MeasurementClass m,
                                      std::span<const double> free) {
  if (m == MeasurementClass::qubit_bloch)
    return MeasurementSet::from_bloch(
        scenario, BlochSettings::from_free(static_cast<std::size_t>(scenario.parties()), free));
  return MeasurementSet::from_phases(PhaseConfiguration::from_free(scenario, free));
}

MeasurementSet OptimizationResult::measurement_set(const Scenario& scenario) const {
  if (phases) return MeasurementSet::from_phases(*phases);
  if (bloch) return MeasurementSet::from_bloch(scenario, *bloch);
  throw DomainError("optimization result carries no measurements");
}

namespace {

void check_scenarios(const Scenario& a, const Scenario& b) {
  if (!(a == b)) throw DomainError("state and expression belong to different scenarios");
}

/// Stores wrapped measurement parameters and re-evaluates the best value from them.
void finish(OptimizationResult& r, const Scenario& sc, std::span<const double> params,
            const BellExpression& expression) {
  const auto w = wrapped(std::vector<double>(params.begin(), params.end()));
  if (r.measurements == MeasurementClass::qubit_bloch)
    r.bloch = BlochSettings::from_free(static_cast<std::size_t>(sc.parties()), w);
  else
    r.phases = PhaseConfiguration::from_free(sc, w);
  r.best_value = quantum_bell_value(*r.state, r.measurement_set(sc), expression);
}

}  // namespace

OptimizationResult optimize_phases(const StateVector& state, const BellExpression& expression,
                                   const OptimizerConfig& config) {
  const auto& sc = state.scenario();
  check_scenarios(sc, expression.scenario());
  const auto m = config.measurements;
  const Objective f = [&](std::span<const double> x) {
    return quantum_bell_value(state, measurements_from_free(sc, m, x), expression);
  };
  auto ms = multistart_maximize(f, measurement_parameter_count(sc, m), config);

  OptimizationResult r;
  r.measurements = m;
  r.state = state;
  r.starts = std::move(ms.starts);
  r.converged = ms.best.converged;
  r.iterations = ms.evaluations;
  finish(r, sc, ms.best.x, expression);
  return r;
}

namespace {

struct SeesawRun {
  std::vector<double> params;
  std::optional<StateVector> state;
  std::vector<double> trace;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t evaluations = 0;
};

SeesawRun seesaw_from(const BellExpression& expression, const OptimizerConfig& config,
                      std::vector<double> params) {
  const auto& sc = expression.scenario();
  const auto m = config.measurements;
  SeesawRun run;
  run.params = std::move(params);
  double previous_round = -std::numeric_limits<double>::infinity();
  for (std::size_t round = 0; round < config.max_seesaw_rounds; ++round) {
    const auto measurements = measurements_from_free(sc, m, run.params);
    // (a) best state for the current measurements.
    auto pair = max_eigenpair(BellOperator(measurements, expression));
    double value = quantum_bell_value(pair.state, measurements, expression);
    if (run.state && value < run.value) {
      value = run.value;  // keep the incumbent state; the objective may not decrease
    } else {
      run.state = std::move(pair.state);
    }
    run.trace.push_back(value);

    // (b) best measurements for that state, locally from the current ones.
    const StateVector& state = *run.state;
    const Objective f = [&](std::span<const double> x) {
      return quantum_bell_value(state, measurements_from_free(sc, m, x), expression);
    };
    auto local = maximize_nelder_mead(f, run.params, config.initial_step, config.tolerance,
                                      config.max_iterations);
    run.evaluations += local.evaluations + 1;
    if (local.value >= value) {
      run.params = std::move(local.x);
      value = local.value;
    }
    run.value = value;
    run.trace.push_back(value);

    if (value - previous_round < config.tolerance) {
      run.converged = true;
      break;
    }
    previous_round = value;
  }
  return run;
}

}  // namespace

OptimizationResult seesaw(const BellExpression& expression, const OptimizerConfig& config) {
  const auto& sc = expression.scenario();
  const auto m = config.measurements;
  const auto dim = measurement_parameter_count(sc, m);
  const std::size_t starts = std::max<std::size_t>(1, config.starts);
  std::vector<SeesawRun> runs(starts);
  detail::for_each_index(starts, config.threads, [&](std::size_t s) {
    std::vector<double> x0(dim, 0.0);
    if (s > 0) {
      UniformStream rng(task_seed(config.seed, s));
      for (auto& x : x0) x = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    runs[s] = seesaw_from(expression, config, std::move(x0));
  });

  OptimizationResult r;
  r.measurements = m;
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts; ++s) {
    r.starts.push_back({s, runs[s].value, runs[s].converged});
    r.iterations += runs[s].evaluations + runs[s].trace.size() / 2;
    if (runs[s].value > runs[best].value) best = s;
  }
  r.state = runs[best].state;
  r.trace = runs[best].trace;
  r.converged = runs[best].converged;
  finish(r, sc, runs[best].params, expression);
  return r;
}

std::string_view to_string(StateFamily family) {
  switch (family) {
    case StateFamily::ghz_qubit: return "ghz_qubit";
    case StateFamily::ghz_qutrit: return "ghz_qutrit";
    case StateFamily::w_state: return "w_state";
  }
  return "unknown";
}

StateFamily parse_state_family(std::string_view text) {
  if (text == "ghz_qubit") return StateFamily::ghz_qubit;
  if (text == "ghz_qutrit") return StateFamily::ghz_qutrit;
  if (text == "w_state") return StateFamily::w_state;
  throw DomainError("unknown state family '" + std::string(text) + "'");
}

std::size_t family_parameter_count(StateFamily family) {
  return family == StateFamily::ghz_qubit ? 1 : 2;
}

std::vector<std::string_view> family_parameter_names(StateFamily family) {
  switch (family) {
    case StateFamily::ghz_qubit: return {"theta"};
    case StateFamily::ghz_qutrit: return {"theta1", "theta2"};
    case StateFamily::w_state: return {"beta", "xi"};
  }
  return {};
}

Scenario family_scenario(StateFamily family) {
  return family == StateFamily::ghz_qutrit ? Scenario(3, 3) : Scenario(3, 2);
}

StateVector family_state(StateFamily family, std::span<const double> angles) {
  if (angles.size() != family_parameter_count(family))
    throw DomainError(std::string(to_string(family)) + " takes " +
                      std::to_string(family_parameter_count(family)) + " angle(s)");
  switch (family) {
    case StateFamily::ghz_qubit: return ghz_qubit(angles[0]);
    case StateFamily::ghz_qutrit: return ghz_qutrit(angles[0], angles[1]);
    case StateFamily::w_state: return w_state(angles[0], angles[1]);
  }
  throw DomainError("unknown state family");
}

OptimizationResult optimize_state_family(StateFamily family, const BellExpression& expression,
                                         const OptimizerConfig& config,
                                         const std::optional<PhaseConfiguration>& fixed) {
  const auto sc = family_scenario(family);
  check_scenarios(sc, expression.scenario());
  const auto m = fixed ? MeasurementClass::beamsplitter : config.measurements;
  const std::size_t k = family_parameter_count(family);
  const std::size_t dim = k + (fixed ? 0 : measurement_parameter_count(sc, m));
  std::optional<MeasurementSet> fixed_set;
  if (fixed) {
    check_scenarios(fixed->scenario(), sc);
    fixed_set = MeasurementSet::from_phases(*fixed);
  }

  const Objective f = [&](std::span<const double> x) {
    const auto state = family_state(family, x.first(k));
    if (fixed_set) return quantum_bell_value(state, *fixed_set, expression);
    return quantum_bell_value(state, measurements_from_free(sc, m, x.subspan(k)), expression);
  };
  auto ms = multistart_maximize(f, dim, config);

  OptimizationResult r;
  r.measurements = m;
  r.state_parameters = wrapped(std::vector<double>(ms.best.x.begin(), ms.best.x.begin() + static_cast<std::ptrdiff_t>(k)));
  r.state = family_state(family, r.state_parameters);
  r.starts = std::move(ms.starts);
  r.converged = ms.best.converged;
  r.iterations = ms.evaluations;
  if (fixed) {
    r.phases = *fixed;
    r.best_value = quantum_bell_value(*r.state, *fixed_set, expression);
  } else {
    finish(r, sc, std::span<const double>(ms.best.x).subspan(k), expression);
  }
  return r;
}

std::vector<SweepRow> sweep(StateFamily family, const std::vector<std::vector<double>>& grid,
                            const BellExpression& expression, const OptimizerConfig& config) {
  if (grid.empty()) throw DomainError("sweep grid is empty");
  for (const auto& point : grid)
    if (point.size() != family_parameter_count(family))
      throw DomainError("sweep grid point has wrong number of parameters");
  std::vector<std::optional<SweepRow>> rows(grid.size());
  detail::for_each_index(grid.size(), config.threads, [&](std::size_t i) {
    OptimizerConfig point = config;
    point.seed = task_seed(config.seed, i);
    point.threads = 1;
    const auto r = optimize_phases(family_state(family, grid[i]), expression, point);
    rows[i] = SweepRow{grid[i], r.best_value, r.converged};
  });
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

}  // namespace cfbell
