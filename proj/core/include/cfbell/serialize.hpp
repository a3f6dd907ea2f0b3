#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfbell/local_polytope.hpp"
#include "cfbell/optimizer.hpp"
#include "cfbell/reference.hpp"

namespace cfbell {

using Json = nlohmann::ordered_json;

/// {n, d, family, dimension, classical_max, saturating_count, affine_rank, is_facet}
Json to_json(const FacetReport& report);
Json to_json(const ClassicalMaximum& result);
Json to_json(const BellExpression& expression);

/// {n, d, amplitudes: [[re, im], ...]}
Json to_json(const StateVector& state);
StateVector state_from_json(const Json& j);

/// {n, d, phases: [[phi(setting 1), phi(setting 2)] per party]}, radians
Json to_json(const PhaseConfiguration& config);
PhaseConfiguration phases_from_json(const Json& j);

Json to_json(const BlochSettings& settings);
Json to_json(const OptimizationResult& result);
Json to_json(const MerminResult& result);

/// Columns settings,outcomes,probability; tuples written as digit strings, party 1 first.
std::string table_to_csv(const ProbabilityTable& table);

/// Header: one column per family parameter, then best_value,converged.
std::string sweep_to_csv(StateFamily family, const std::vector<SweepRow>& rows);

}  // namespace cfbell
