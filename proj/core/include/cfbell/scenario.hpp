#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "cfbell/error.hpp"
#include "cfbell/rational.hpp"

namespace cfbell {

/// Setting labels are 1 and 2, one entry per party.
using Settings = std::vector<int>;
/// Outcome labels in [0, d), one entry per party.
using Outcomes = std::vector<int>;

/**
 * N parties, two settings each, d outcomes per measurement.
 *
 * The spin S = (d-1)/2 is kept as an exact rational so that half-integer
 * spins for even d are never rounded.
 */
class Scenario {
 public:
  Scenario(int parties, int outcomes);

  int parties() const noexcept { return parties_; }
  int outcomes() const noexcept { return outcomes_; }
  static constexpr int settings() noexcept { return 2; }
  Rational spin() const { return Rational(outcomes_ - 1, 2); }

  /// d^N, the number of outcome tuples per settings tuple.
  std::size_t outcome_tuples() const noexcept { return outcome_tuples_; }
  /// 2^N, the number of settings tuples.
  std::size_t settings_tuples() const noexcept { return std::size_t{1} << parties_; }

  /// Mixed-radix index of an outcome tuple, party 1 most significant.
  std::size_t outcome_index(std::span<const int> outcomes) const;
  Outcomes outcomes_at(std::size_t index) const;
  /// Binary index of a settings tuple, party 1 most significant.
  std::size_t settings_index(std::span<const int> settings) const;
  Settings settings_at(std::size_t index) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  int parties_;
  int outcomes_;
  std::size_t outcome_tuples_;
};

/// Euclidean residue of x modulo d, always in [0, d).
int euclid_mod(std::int64_t x, int d);

/// Normalized multipartite weight f/S with f = S - M[(-1)^chi sum(x), d], chi = prod(settings).
Rational weight_multipartite(std::span<const int> settings, std::span<const int> outcomes,
                             const Scenario& scenario);

/// Normalized two-party weight f/S with f = S - M[eps(i-j)(m+n), d] and eps(0) = +1.
Rational weight_bipartite(int i, int j, int m, int n, const Scenario& scenario);

enum class ExpressionFamily {
  multipartite,      ///< Q_{1..1} + Q_{1212..} + Q_{2121..} - Q_{2..2}
  bipartite_legacy,  ///< Q_11 + Q_12 - Q_21 + Q_22, two parties only
  reduced_tripartite ///< three-party expression with party 3 clamped to outcome 0
};

std::string_view to_string(ExpressionFamily family);
ExpressionFamily parse_family(std::string_view text);

/**
 * One signed correlator of a Bell expression.
 *
 * `parity` is the factor (+1 or -1) applied to the outcome sum inside the
 * residue, so the term weight is (d-1-2*M[parity*sum(x), d]) / (d-1).
 */
struct Term {
  Settings settings;
  int sign = 1;
  int parity = 1;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Integer numerator of a term weight over the common denominator d-1.
inline int weight_numerator(int parity, std::int64_t outcome_sum, int d) {
  return (d - 1) - 2 * euclid_mod(parity * outcome_sum, d);
}

class BellExpression {
 public:
  /// Builds an expression from explicit terms; the four-term family invariants are checked.
  BellExpression(Scenario scenario, ExpressionFamily family, std::vector<Term> terms,
                 Rational bound = Rational(2));

  const Scenario& scenario() const noexcept { return scenario_; }
  ExpressionFamily family() const noexcept { return family_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const Rational& classical_bound() const noexcept { return bound_; }

  /// Same terms, different bound. Used to probe facet certification.
  BellExpression with_bound(Rational bound) const;

 private:
  Scenario scenario_;
  ExpressionFamily family_;
  std::vector<Term> terms_;
  Rational bound_;
};

/// The family's canonical expression for `scenario`.
BellExpression bell_expression(const Scenario& scenario, ExpressionFamily family);

/// Term weight (exact) for one outcome tuple.
Rational term_weight(const Term& term, std::span<const int> outcomes, const Scenario& scenario);

/**
 * Joint outcome probabilities, one dense block of d^N entries per settings
 * tuple. Blocks are stored in settings-index order, entries in outcome-index
 * order (party 1 most significant in both).
 */
template <typename Scalar>
class BasicProbabilityTable {
 public:
  explicit BasicProbabilityTable(Scenario scenario)
      : scenario_(std::move(scenario)),
        data_(scenario_.settings_tuples() * scenario_.outcome_tuples(), Scalar(0)) {}

  BasicProbabilityTable(Scenario scenario, std::vector<Scalar> data)
      : scenario_(std::move(scenario)), data_(std::move(data)) {
    if (data_.size() != scenario_.settings_tuples() * scenario_.outcome_tuples())
      throw DomainError("probability table has wrong size");
  }

  const Scenario& scenario() const noexcept { return scenario_; }

  std::span<Scalar> block(std::size_t settings_index) {
    check_block(settings_index);
    return {data_.data() + settings_index * scenario_.outcome_tuples(),
            scenario_.outcome_tuples()};
  }
  std::span<const Scalar> block(std::size_t settings_index) const {
    check_block(settings_index);
    return {data_.data() + settings_index * scenario_.outcome_tuples(),
            scenario_.outcome_tuples()};
  }
  std::span<const Scalar> block(std::span<const int> settings) const {
    return block(scenario_.settings_index(settings));
  }

  Scalar& at(std::span<const int> settings, std::span<const int> outcomes) {
    return block(scenario_.settings_index(settings))[scenario_.outcome_index(outcomes)];
  }
  const Scalar& at(std::span<const int> settings, std::span<const int> outcomes) const {
    return block(scenario_.settings_index(settings))[scenario_.outcome_index(outcomes)];
  }

  const std::vector<Scalar>& data() const noexcept { return data_; }

  /**
   * Throws DomainError unless every entry is non-negative and every block
   * sums to one. Floating tables get 1e-12 slack on positivity and 1e-9 on
   * the sums; rational tables are checked exactly.
   */
  void check_normalized() const;

 private:
  void check_block(std::size_t settings_index) const {
    if (settings_index >= scenario_.settings_tuples())
      throw DomainError("settings tuple not in table");
  }

  Scenario scenario_;
  std::vector<Scalar> data_;
};

using ProbabilityTable = BasicProbabilityTable<double>;
using ExactProbabilityTable = BasicProbabilityTable<Rational>;

/// Every entry equal to 1/d^N.
ProbabilityTable uniform_table(const Scenario& scenario);
ExactProbabilityTable exact_uniform_table(const Scenario& scenario);

/// (1-lambda)*a + lambda*b, block by block.
ProbabilityTable mix(const ProbabilityTable& a, const ProbabilityTable& b, double lambda);

/// Correlator of one term: sum over outcomes of weight * probability.
double correlation(const ProbabilityTable& table, const Term& term);
Rational correlation(const ExactProbabilityTable& table, const Term& term);

/// Correlator for a settings tuple, weight chosen by `family`.
double correlation(const ProbabilityTable& table, std::span<const int> settings,
                   ExpressionFamily family = ExpressionFamily::multipartite);
Rational correlation(const ExactProbabilityTable& table, std::span<const int> settings,
                     ExpressionFamily family = ExpressionFamily::multipartite);

/// Signed sum of the expression's correlators.
double bell_value(const BellExpression& expression, const ProbabilityTable& table);
Rational bell_value(const BellExpression& expression, const ExactProbabilityTable& table);

/// Parity factor the family assigns to a settings tuple.
int family_parity(ExpressionFamily family, std::span<const int> settings);

}  // namespace cfbell
