#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cfbell/scenario.hpp"

namespace cfbell {

/**
 * A deterministic local strategy: one fixed outcome for every (party, setting).
 *
 * Entry 2*j + (s-1) holds party j's outcome for setting s. The strategy index
 * reads these entries as mixed-radix digits with entry 0 (party 1, setting 1)
 * least significant.
 */
class DeterministicStrategy {
 public:
  DeterministicStrategy(Scenario scenario, std::vector<int> assignment);
  static DeterministicStrategy from_index(const Scenario& scenario, std::uint64_t index);

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  /// Outcome of `party` (0-based) under `setting` (1 or 2).
  int outcome(int party, int setting) const {
    return assignment_[static_cast<std::size_t>(2 * party + setting - 1)];
  }
  std::uint64_t index() const;

  /// Steps to the next strategy in index order; returns false after the last one.
  bool advance();

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;

 private:
  Scenario scenario_;
  std::vector<int> assignment_;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

/// d^{2N}; throws ResourceError when it exceeds `budget`.
std::uint64_t strategy_count(const Scenario& scenario,
                             std::uint64_t budget = kDefaultEnumerationBudget);

/**
 * Restartable stream of strategies over the index range [first, last).
 *
 *   StrategyEnumerator e(scenario);
 *   for (; !e.done(); e.next()) use(e.current());
 */
class StrategyEnumerator {
 public:
  explicit StrategyEnumerator(const Scenario& scenario,
                              std::uint64_t budget = kDefaultEnumerationBudget);
  StrategyEnumerator(const Scenario& scenario, std::uint64_t first, std::uint64_t last,
                     std::uint64_t budget = kDefaultEnumerationBudget);

  bool done() const noexcept { return position_ >= last_; }
  std::uint64_t position() const noexcept { return position_; }
  const DeterministicStrategy& current() const noexcept { return current_; }
  void next();

 private:
  std::uint64_t position_;
  std::uint64_t last_;
  DeterministicStrategy current_;
};

/// Probability one on the outcome tuple the strategy dictates, in every block.
ExactProbabilityTable strategy_table(const DeterministicStrategy& strategy);

/// Exact Bell value of a deterministic strategy without building its table.
Rational strategy_value(const BellExpression& expression, const DeterministicStrategy& strategy);

struct EnumerationOptions {
  std::uint64_t budget = kDefaultEnumerationBudget;
  unsigned threads = 1;
};

struct ClassicalMaximum {
  Rational maximum;
  DeterministicStrategy argmax;  ///< lowest-index strategy attaining the maximum
  std::map<Rational, std::uint64_t> histogram;
  std::uint64_t strategies = 0;
};

/// Partial result over strategy indices [first, last); merge with `merge`.
ClassicalMaximum classical_maximum_range(const BellExpression& expression, std::uint64_t first,
                                         std::uint64_t last);
/// Associative merge; the argmax keeps the lower index on ties.
ClassicalMaximum merge(const ClassicalMaximum& a, const ClassicalMaximum& b);

ClassicalMaximum classical_maximum(const BellExpression& expression,
                                   const EnumerationOptions& options = {});

/// Per-party Collins-Gisin block [1, P(0|1)..P(d-2|1), P(0|2)..P(d-2|2)].
std::vector<std::int64_t> cg_party_vector(int outcomes, int outcome_setting1, int outcome_setting2);

/// Tensor product of the party blocks, party 1 most significant; length (2d-1)^N.
std::vector<std::int64_t> cg_vector(const DeterministicStrategy& strategy);

/// (2d-1)^N - 1.
std::int64_t polytope_dimension(const Scenario& scenario);

/**
 * Streaming exact rank of integer vectors by fraction-free elimination.
 *
 * Each stored row is reduced against all earlier rows, so a new vector is
 * cleared at every stored pivot by walking the rows in insertion order. Rows
 * are divided by the gcd of their entries after each update.
 */
class IntegerRankAccumulator {
 public:
  explicit IntegerRankAccumulator(std::size_t width) : width_(width) {}

  /// Returns true when `v` was independent of the rows seen so far.
  bool add(std::vector<std::int64_t> v);
  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return width_; }

 private:
  struct Row {
    std::vector<std::int64_t> values;
    std::size_t pivot;
  };
  std::size_t width_;
  std::vector<Row> rows_;
};

struct FacetReport {
  Scenario scenario;
  ExpressionFamily family;
  std::int64_t dimension = 0;
  std::uint64_t saturating_count = 0;
  std::int64_t affine_rank = 0;
  bool is_facet = false;
  Rational classical_max;
};

/// Indices of strategies whose value equals the expression's bound, ascending.
std::vector<std::uint64_t> saturating_strategies(const BellExpression& expression,
                                                 const EnumerationOptions& options = {});

FacetReport facet_check(const BellExpression& expression, const EnumerationOptions& options = {});

}  // namespace cfbell
