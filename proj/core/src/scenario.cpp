#include "cfbell/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace cfbell {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const char* first = part.data();
    const char* last = part.data() + part.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
      throw DomainError("malformed rational '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text));
  const auto den = parse_int(std::string_view(text).substr(slash + 1));
  if (den == 0) throw DomainError("zero denominator in '" + text + "'");
  return Rational(parse_int(std::string_view(text).substr(0, slash)), den);
}

Scenario::Scenario(int parties, int outcomes) : parties_(parties), outcomes_(outcomes) {
  if (parties < 2) throw InvalidScenario("scenario needs at least 2 parties");
  if (outcomes < 2) throw InvalidScenario("scenario needs at least 2 outcomes");
  if (parties > 30) throw InvalidScenario("too many parties");
  std::size_t count = 1;
  for (int j = 0; j < parties; ++j) {
    if (count > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(outcomes))
      throw InvalidScenario("outcome space too large");
    count *= static_cast<std::size_t>(outcomes);
  }
  outcome_tuples_ = count;
}

std::size_t Scenario::outcome_index(std::span<const int> outcomes) const {
  if (outcomes.size() != static_cast<std::size_t>(parties_))
    throw DomainError("outcome tuple has wrong length");
  std::size_t index = 0;
  for (int x : outcomes) {
    if (x < 0 || x >= outcomes_) throw DomainError("outcome out of range");
    index = index * static_cast<std::size_t>(outcomes_) + static_cast<std::size_t>(x);
  }
  return index;
}

Outcomes Scenario::outcomes_at(std::size_t index) const {
  Outcomes out(static_cast<std::size_t>(parties_));
  for (int j = parties_ - 1; j >= 0; --j) {
    out[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(outcomes_));
    index /= static_cast<std::size_t>(outcomes_);
  }
  return out;
}

std::size_t Scenario::settings_index(std::span<const int> settings) const {
  if (settings.size() != static_cast<std::size_t>(parties_))
    throw DomainError("settings tuple has wrong length");
  std::size_t index = 0;
  for (int s : settings) {
    if (s != 1 && s != 2) throw DomainError("setting labels are 1 and 2");
    index = (index << 1) | static_cast<std::size_t>(s - 1);
  }
  return index;
}

Settings Scenario::settings_at(std::size_t index) const {
  Settings out(static_cast<std::size_t>(parties_));
  for (int j = parties_ - 1; j >= 0; --j) {
    out[static_cast<std::size_t>(j)] = static_cast<int>(index & 1U) + 1;
    index >>= 1;
  }
  return out;
}

int euclid_mod(std::int64_t x, int d) {
  if (d < 2) throw InvalidScenario("modulus must be at least 2");
  const auto r = x % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

namespace {

std::int64_t checked_sum(std::span<const int> outcomes, const Scenario& scenario) {
  if (outcomes.size() != static_cast<std::size_t>(scenario.parties()))
    throw DomainError("outcome tuple has wrong length");
  std::int64_t sum = 0;
  for (int x : outcomes) {
    if (x < 0 || x >= scenario.outcomes()) throw DomainError("outcome out of range");
    sum += x;
  }
  return sum;
}

Rational weight_from_parity(int parity, std::int64_t sum, int d) {
  return Rational(weight_numerator(parity, sum, d), d - 1);
}

}  // namespace

int family_parity(ExpressionFamily family, std::span<const int> settings) {
  switch (family) {
    case ExpressionFamily::multipartite:
    case ExpressionFamily::reduced_tripartite: {
      // (-1)^chi with chi = prod(i_j) is -1 exactly when every setting is 1.
      const bool all_ones = std::all_of(settings.begin(), settings.end(), [](int s) { return s == 1; });
      return all_ones ? -1 : 1;
    }
    case ExpressionFamily::bipartite_legacy:
      if (settings.size() != 2) throw FamilyMismatch("bipartite-legacy weights need exactly 2 parties");
      return settings[0] - settings[1] >= 0 ? 1 : -1;
  }
  return 1;
}

Rational weight_multipartite(std::span<const int> settings, std::span<const int> outcomes,
                             const Scenario& scenario) {
  scenario.settings_index(settings);  // validates labels and length
  const auto sum = checked_sum(outcomes, scenario);
  return weight_from_parity(family_parity(ExpressionFamily::multipartite, settings), sum,
                            scenario.outcomes());
}

Rational weight_bipartite(int i, int j, int m, int n, const Scenario& scenario) {
  if (scenario.parties() != 2) throw FamilyMismatch("bipartite weight needs a 2-party scenario");
  const int settings[2] = {i, j};
  const int outcomes[2] = {m, n};
  scenario.settings_index(settings);
  const auto sum = checked_sum(outcomes, scenario);
  return weight_from_parity(family_parity(ExpressionFamily::bipartite_legacy, settings), sum,
                            scenario.outcomes());
}

Rational term_weight(const Term& term, std::span<const int> outcomes, const Scenario& scenario) {
  return weight_from_parity(term.parity, checked_sum(outcomes, scenario), scenario.outcomes());
}

std::string_view to_string(ExpressionFamily family) {
  switch (family) {
    case ExpressionFamily::multipartite: return "multipartite";
    case ExpressionFamily::bipartite_legacy: return "bipartite-legacy";
    case ExpressionFamily::reduced_tripartite: return "reduced-tripartite";
  }
  return "unknown";
}

ExpressionFamily parse_family(std::string_view text) {
  if (text == "multipartite") return ExpressionFamily::multipartite;
  if (text == "bipartite-legacy" || text == "bipartite") return ExpressionFamily::bipartite_legacy;
  if (text == "reduced-tripartite" || text == "reduced") return ExpressionFamily::reduced_tripartite;
  throw DomainError("unknown expression family '" + std::string(text) + "'");
}

BellExpression::BellExpression(Scenario scenario, ExpressionFamily family, std::vector<Term> terms,
                               Rational bound)
    : scenario_(std::move(scenario)), family_(family), terms_(std::move(terms)), bound_(bound) {
  if (terms_.size() != 4) throw DomainError("a Bell expression has exactly 4 terms");
  std::set<std::size_t> seen;
  for (const auto& t : terms_) {
    if (!seen.insert(scenario_.settings_index(t.settings)).second)
      throw DomainError("Bell expression terms must use distinct settings tuples");
    if ((t.sign != 1 && t.sign != -1) || (t.parity != 1 && t.parity != -1))
      throw DomainError("term sign and parity must be +1 or -1");
  }
  if (family_ != ExpressionFamily::multipartite && scenario_.parties() != 2)
    throw FamilyMismatch(std::string(to_string(family_)) + " expressions need exactly 2 parties");
}

BellExpression BellExpression::with_bound(Rational bound) const {
  BellExpression copy = *this;
  copy.bound_ = bound;
  return copy;
}

BellExpression bell_expression(const Scenario& scenario, ExpressionFamily family) {
  const int n = scenario.parties();
  auto make = [&](Settings s, int sign) {
    return Term{s, sign, family_parity(family, s)};
  };
  if (family == ExpressionFamily::bipartite_legacy) {
    if (n != 2) throw FamilyMismatch("bipartite-legacy expression exists only for N = 2");
    return BellExpression(scenario, family,
                          {make({1, 1}, 1), make({1, 2}, 1), make({2, 1}, -1), make({2, 2}, 1)});
  }
  if (family == ExpressionFamily::reduced_tripartite && n != 2)
    throw FamilyMismatch("reduced-tripartite expression is a 2-party functional");

  Settings ones(static_cast<std::size_t>(n), 1);
  Settings twos(static_cast<std::size_t>(n), 2);
  Settings alt1(static_cast<std::size_t>(n));
  Settings alt2(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    alt1[static_cast<std::size_t>(j)] = j % 2 == 0 ? 1 : 2;
    alt2[static_cast<std::size_t>(j)] = j % 2 == 0 ? 2 : 1;
  }
  return BellExpression(scenario, family,
                        {make(ones, 1), make(alt1, 1), make(alt2, 1), make(twos, -1)});
}

template <typename Scalar>
void BasicProbabilityTable<Scalar>::check_normalized() const {
  const auto blocks = scenario_.settings_tuples();
  for (std::size_t b = 0; b < blocks; ++b) {
    Scalar total(0);
    for (const auto& p : block(b)) {
      if constexpr (std::is_floating_point_v<Scalar>) {
        if (!(p >= -1e-12)) throw DomainError("negative probability in table");
      } else {
        if (p < Scalar(0)) throw DomainError("negative probability in table");
      }
      total += p;
    }
    if constexpr (std::is_floating_point_v<Scalar>) {
      if (std::abs(total - 1.0) > 1e-9) throw DomainError("table block does not sum to 1");
    } else {
      if (total != Scalar(1)) throw DomainError("table block does not sum to 1");
    }
  }
}

template class BasicProbabilityTable<double>;
template class BasicProbabilityTable<Rational>;

ProbabilityTable uniform_table(const Scenario& scenario) {
  return ProbabilityTable(
      scenario, std::vector<double>(scenario.settings_tuples() * scenario.outcome_tuples(),
                                    1.0 / static_cast<double>(scenario.outcome_tuples())));
}

ExactProbabilityTable exact_uniform_table(const Scenario& scenario) {
  const Rational p(1, static_cast<std::int64_t>(scenario.outcome_tuples()));
  return ExactProbabilityTable(
      scenario, std::vector<Rational>(scenario.settings_tuples() * scenario.outcome_tuples(), p));
}

ProbabilityTable mix(const ProbabilityTable& a, const ProbabilityTable& b, double lambda) {
  if (!(a.scenario() == b.scenario())) throw DomainError("mixing tables of different scenarios");
  std::vector<double> out(a.data().size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (1.0 - lambda) * a.data()[k] + lambda * b.data()[k];
  return ProbabilityTable(a.scenario(), std::move(out));
}

namespace {

/// Sum of weight * p over one block, with weights taken as integer numerators over d-1.
template <typename Scalar>
Scalar block_correlation(const BasicProbabilityTable<Scalar>& table, std::span<const int> settings,
                         int parity) {
  const auto& sc = table.scenario();
  const int d = sc.outcomes();
  const auto block = table.block(settings);
  // Outcome sums are accumulated by walking the mixed-radix digits.
  Outcomes digits(static_cast<std::size_t>(sc.parties()), 0);
  std::int64_t sum = 0;
  Scalar acc(0);
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (block[k] != Scalar(0)) acc += Scalar(weight_numerator(parity, sum, d)) * block[k];
    for (int j = sc.parties() - 1; j >= 0; --j) {
      auto& digit = digits[static_cast<std::size_t>(j)];
      if (++digit < d) {
        ++sum;
        break;
      }
      digit = 0;
      sum -= d - 1;
    }
  }
  return acc / Scalar(d - 1);
}

}  // namespace

double correlation(const ProbabilityTable& table, const Term& term) {
  return block_correlation(table, term.settings, term.parity);
}

Rational correlation(const ExactProbabilityTable& table, const Term& term) {
  return block_correlation(table, term.settings, term.parity);
}

double correlation(const ProbabilityTable& table, std::span<const int> settings,
                   ExpressionFamily family) {
  return block_correlation(table, settings, family_parity(family, settings));
}

Rational correlation(const ExactProbabilityTable& table, std::span<const int> settings,
                     ExpressionFamily family) {
  return block_correlation(table, settings, family_parity(family, settings));
}

namespace {

template <typename Scalar>
Scalar signed_sum(const BellExpression& expression, const BasicProbabilityTable<Scalar>& table) {
  if (!(expression.scenario() == table.scenario()))
    throw DomainError("table and expression belong to different scenarios");
  Scalar total(0);
  for (const auto& t : expression.terms())
    total += Scalar(t.sign) * block_correlation(table, t.settings, t.parity);
  return total;
}

}  // namespace

double bell_value(const BellExpression& expression, const ProbabilityTable& table) {
  return signed_sum(expression, table);
}

Rational bell_value(const BellExpression& expression, const ExactProbabilityTable& table) {
  return signed_sum(expression, table);
}

}  // namespace cfbell
