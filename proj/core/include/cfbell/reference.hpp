#pragma once

#include <vector>

#include "cfbell/optimizer.hpp"

namespace cfbell {

/**
 * Three-qubit Mermin expression E(1,1,2) + E(1,2,1) + E(2,1,1) - E(2,2,2),
 * where E is the expectation of the product of the parties' n.sigma
 * observables. Classical bound 2, algebraic maximum 4.
 */
double mermin3_value(const StateVector& state, const BlochSettings& settings);

/// <psi| (a.sigma) (x) (b.sigma) (x) (c.sigma) |psi> for three Bloch directions.
double correlator3(const StateVector& state, const std::array<double, 3>& a,
                   const std::array<double, 3>& b, const std::array<double, 3>& c);

struct MerminResult {
  double best_value = 0.0;
  BlochSettings settings;
  std::vector<StartSummary> starts;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Multi-start maximization of mermin3_value over the 12 Bloch angles.
MerminResult mermin3_max(const StateVector& state, const OptimizerConfig& config = {});

/**
 * Two-party functional obtained from the three-party multipartite expression
 * by clamping party 3's outcome to 0 in every term weight. The parent terms
 * (1,1,1), (1,2,1), (2,1,2), (2,2,2) become (1,1), (1,2), (2,1), (2,2) and
 * keep their signs and parities.
 */
BellExpression reduce_to_bipartite(const BellExpression& expression);

}  // namespace cfbell
