#include "cfbell/local_polytope.hpp"

#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "parallel.hpp"

namespace cfbell {

DeterministicStrategy::DeterministicStrategy(Scenario scenario, std::vector<int> assignment)
    : scenario_(std::move(scenario)), assignment_(std::move(assignment)) {
  if (assignment_.size() != static_cast<std::size_t>(2 * scenario_.parties()))
    throw DomainError("strategy needs one outcome per party and setting");
  for (int x : assignment_)
    if (x < 0 || x >= scenario_.outcomes()) throw DomainError("strategy outcome out of range");
}

DeterministicStrategy DeterministicStrategy::from_index(const Scenario& scenario,
                                                        std::uint64_t index) {
  const auto count = strategy_count(scenario, std::numeric_limits<std::uint64_t>::max());
  if (index >= count) throw DomainError("strategy index out of range");
  std::vector<int> a(static_cast<std::size_t>(2 * scenario.parties()));
  const auto d = static_cast<std::uint64_t>(scenario.outcomes());
  for (auto& x : a) {
    x = static_cast<int>(index % d);
    index /= d;
  }
  return DeterministicStrategy(scenario, std::move(a));
}

std::uint64_t DeterministicStrategy::index() const {
  std::uint64_t index = 0;
  const auto d = static_cast<std::uint64_t>(scenario_.outcomes());
  for (auto it = assignment_.rbegin(); it != assignment_.rend(); ++it)
    index = index * d + static_cast<std::uint64_t>(*it);
  return index;
}

bool DeterministicStrategy::advance() {
  for (auto& x : assignment_) {
    if (++x < scenario_.outcomes()) return true;
    x = 0;
  }
  return false;
}

std::uint64_t strategy_count(const Scenario& scenario, std::uint64_t budget) {
  const auto d = static_cast<std::uint64_t>(scenario.outcomes());
  std::uint64_t count = 1;
  bool overflow = false;
  for (int k = 0; k < 2 * scenario.parties(); ++k) {
    if (count > std::numeric_limits<std::uint64_t>::max() / d) {
      overflow = true;
      break;
    }
    count *= d;
  }
  if (overflow || count > budget) {
    const std::string size = overflow ? std::string("more than 2^64")
                                      : std::to_string(count);
    throw ResourceError("enumeration of d^(2N) = " + std::to_string(scenario.outcomes()) + "^" +
                        std::to_string(2 * scenario.parties()) + " = " + size +
                        " strategies exceeds budget " + std::to_string(budget));
  }
  return count;
}

StrategyEnumerator::StrategyEnumerator(const Scenario& scenario, std::uint64_t budget)
    : StrategyEnumerator(scenario, 0, strategy_count(scenario, budget), budget) {}

StrategyEnumerator::StrategyEnumerator(const Scenario& scenario, std::uint64_t first,
                                       std::uint64_t last, std::uint64_t budget)
    : position_(first),
      last_(std::min(last, strategy_count(scenario, budget))),
      current_(DeterministicStrategy::from_index(scenario, first < last_ ? first : 0)) {}

void StrategyEnumerator::next() {
  if (done()) return;
  ++position_;
  if (!done()) current_.advance();
}

ExactProbabilityTable strategy_table(const DeterministicStrategy& strategy) {
  const auto& sc = strategy.scenario();
  ExactProbabilityTable table(sc);
  Outcomes outcomes(static_cast<std::size_t>(sc.parties()));
  for (std::size_t b = 0; b < sc.settings_tuples(); ++b) {
    const auto settings = sc.settings_at(b);
    for (int j = 0; j < sc.parties(); ++j)
      outcomes[static_cast<std::size_t>(j)] = strategy.outcome(j, settings[static_cast<std::size_t>(j)]);
    table.block(b)[sc.outcome_index(outcomes)] = Rational(1);
  }
  return table;
}

namespace {

/// Numerator of the strategy value over the common denominator d-1.
std::int64_t value_numerator(const BellExpression& expression, std::span<const int> assignment) {
  const int d = expression.scenario().outcomes();
  std::int64_t total = 0;
  for (const auto& t : expression.terms()) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < t.settings.size(); ++j)
      sum += assignment[2 * j + static_cast<std::size_t>(t.settings[j] - 1)];
    total += t.sign * weight_numerator(t.parity, sum, d);
  }
  return total;
}

}  // namespace

Rational strategy_value(const BellExpression& expression, const DeterministicStrategy& strategy) {
  if (!(expression.scenario() == strategy.scenario()))
    throw DomainError("strategy and expression belong to different scenarios");
  return Rational(value_numerator(expression, strategy.assignment()),
                  expression.scenario().outcomes() - 1);
}

ClassicalMaximum classical_maximum_range(const BellExpression& expression, std::uint64_t first,
                                         std::uint64_t last) {
  const auto& sc = expression.scenario();
  const std::int64_t den = sc.outcomes() - 1;
  const std::int64_t span = 4 * den;  // |numerator| <= 4(d-1)
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * span + 1), 0);

  StrategyEnumerator e(sc, first, last, std::numeric_limits<std::uint64_t>::max());
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  std::uint64_t best_index = first;
  std::uint64_t seen = 0;
  for (; !e.done(); e.next()) {
    const auto num = value_numerator(expression, e.current().assignment());
    ++counts[static_cast<std::size_t>(num + span)];
    if (num > best) {
      best = num;
      best_index = e.position();
    }
    ++seen;
  }

  ClassicalMaximum out{Rational(0), DeterministicStrategy::from_index(sc, best_index), {}, seen};
  if (seen == 0) return out;
  out.maximum = Rational(best, den);
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] != 0)
      out.histogram[Rational(static_cast<std::int64_t>(k) - span, den)] += counts[k];
  return out;
}

ClassicalMaximum merge(const ClassicalMaximum& a, const ClassicalMaximum& b) {
  if (a.strategies == 0) return b;
  if (b.strategies == 0) return a;
  ClassicalMaximum out = a;
  if (b.maximum > a.maximum ||
      (b.maximum == a.maximum && b.argmax.index() < a.argmax.index())) {
    out.maximum = b.maximum;
    out.argmax = b.argmax;
  }
  for (const auto& [value, count] : b.histogram) out.histogram[value] += count;
  out.strategies += b.strategies;
  return out;
}

namespace {

struct Chunks {
  std::uint64_t total;
  std::uint64_t size;
  std::size_t count;
};

Chunks make_chunks(const Scenario& scenario, const EnumerationOptions& options) {
  const auto total = strategy_count(scenario, options.budget);
  // Fixed chunk grid: the partition never depends on the thread count.
  const std::uint64_t size = std::max<std::uint64_t>(1, (total + 255) / 256);
  return {total, size, static_cast<std::size_t>((total + size - 1) / size)};
}

}  // namespace

ClassicalMaximum classical_maximum(const BellExpression& expression,
                                   const EnumerationOptions& options) {
  const auto chunks = make_chunks(expression.scenario(), options);
  std::vector<std::optional<ClassicalMaximum>> parts(chunks.count);
  detail::for_each_index(chunks.count, options.threads, [&](std::size_t i) {
    const auto first = i * chunks.size;
    parts[i] = classical_maximum_range(expression, first, std::min(chunks.total, first + chunks.size));
  });
  ClassicalMaximum out = *parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = merge(out, *parts[i]);
  return out;
}

std::vector<std::int64_t> cg_party_vector(int outcomes, int outcome_setting1, int outcome_setting2) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(2 * outcomes - 1), 0);
  v[0] = 1;
  if (outcome_setting1 < outcomes - 1) v[static_cast<std::size_t>(1 + outcome_setting1)] = 1;
  if (outcome_setting2 < outcomes - 1)
    v[static_cast<std::size_t>(outcomes + outcome_setting2)] = 1;
  return v;
}

std::vector<std::int64_t> cg_vector(const DeterministicStrategy& strategy) {
  const auto& sc = strategy.scenario();
  std::vector<std::int64_t> out{1};
  for (int j = 0; j < sc.parties(); ++j) {
    const auto block = cg_party_vector(sc.outcomes(), strategy.outcome(j, 1), strategy.outcome(j, 2));
    std::vector<std::int64_t> next(out.size() * block.size(), 0);
    for (std::size_t a = 0; a < out.size(); ++a) {
      if (out[a] == 0) continue;
      for (std::size_t b = 0; b < block.size(); ++b) next[a * block.size() + b] = out[a] * block[b];
    }
    out = std::move(next);
  }
  return out;
}

std::int64_t polytope_dimension(const Scenario& scenario) {
  std::int64_t size = 1;
  for (int j = 0; j < scenario.parties(); ++j) {
    if (size > std::numeric_limits<std::int64_t>::max() / (2 * scenario.outcomes() - 1))
      throw ResourceError("Collins-Gisin space too large");
    size *= 2 * scenario.outcomes() - 1;
  }
  return size - 1;
}

namespace {

std::int64_t row_gcd(const std::vector<std::int64_t>& v, std::size_t from) {
  std::int64_t g = 0;
  for (std::size_t k = from; k < v.size() && g != 1; ++k)
    if (v[k] != 0) g = std::gcd(g, v[k]);
  return g;
}

constexpr std::int64_t kRenormalizeAbove = std::int64_t{1} << 31;

}  // namespace

__extension__ using Wide = __int128;

bool IntegerRankAccumulator::add(std::vector<std::int64_t> v) {
  if (v.size() != width_) throw DomainError("rank accumulator: vector has wrong width");
  for (const auto& row : rows_) {
    const std::int64_t c = v[row.pivot];
    if (c == 0) continue;
    const std::int64_t a = row.values[row.pivot];
    // v <- a*v - c*row, exact; row entries before its pivot are zero.
    std::int64_t largest = 0;
    for (std::size_t k = row.pivot; k < width_; ++k) {
      const Wide x = static_cast<Wide>(a) * v[k] - static_cast<Wide>(c) * row.values[k];
      if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
        throw NumericError("integer overflow in fraction-free elimination", 0.0);
      v[k] = static_cast<std::int64_t>(x);
      largest = std::max(largest, std::abs(v[k]));
    }
    if (a != 1 && a != -1) {
      for (std::size_t k = 0; k < row.pivot; ++k) {
        const Wide x = static_cast<Wide>(a) * v[k];
        if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
          throw NumericError("integer overflow in fraction-free elimination", 0.0);
        v[k] = static_cast<std::int64_t>(x);
        largest = std::max(largest, std::abs(v[k]));
      }
    } else if (a == -1) {
      for (std::size_t k = 0; k < row.pivot; ++k) v[k] = -v[k];
    }
    if (largest > kRenormalizeAbove) {
      const auto g = row_gcd(v, 0);
      if (g > 1)
        for (auto& x : v) x /= g;
    }
  }
  std::size_t pivot = 0;
  while (pivot < width_ && v[pivot] == 0) ++pivot;
  if (pivot == width_) return false;
  const auto g = row_gcd(v, pivot);
  const std::int64_t s = v[pivot] < 0 ? -g : g;
  for (auto& x : v) x /= s;
  rows_.push_back({std::move(v), pivot});
  return true;
}

std::vector<std::uint64_t> saturating_strategies(const BellExpression& expression,
                                                 const EnumerationOptions& options) {
  const auto& sc = expression.scenario();
  const auto chunks = make_chunks(sc, options);
  const auto& bound = expression.classical_bound();
  const std::int64_t den = sc.outcomes() - 1;
  std::vector<std::vector<std::uint64_t>> parts(chunks.count);
  detail::for_each_index(chunks.count, options.threads, [&](std::size_t i) {
    const auto first = i * chunks.size;
    StrategyEnumerator e(sc, first, std::min(chunks.total, first + chunks.size),
                         std::numeric_limits<std::uint64_t>::max());
    for (; !e.done(); e.next()) {
      const auto num = value_numerator(expression, e.current().assignment());
      if (num * bound.denominator() == bound.numerator() * den) parts[i].push_back(e.position());
    }
  });
  std::vector<std::uint64_t> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

FacetReport facet_check(const BellExpression& expression, const EnumerationOptions& options) {
  const auto& sc = expression.scenario();
  FacetReport report{sc, expression.family(), polytope_dimension(sc), 0, 0, false, Rational(0)};
  report.classical_max = classical_maximum(expression, options).maximum;

  const auto saturating = saturating_strategies(expression, options);
  report.saturating_count = saturating.size();
  if (saturating.empty()) return report;

  const auto target = static_cast<std::size_t>(report.dimension - 1);
  const auto origin = cg_vector(DeterministicStrategy::from_index(sc, saturating.front()));
  IntegerRankAccumulator rank(origin.size());
  for (std::size_t k = 1; k < saturating.size() && rank.rank() < target; ++k) {
    auto v = cg_vector(DeterministicStrategy::from_index(sc, saturating[k]));
    for (std::size_t c = 0; c < v.size(); ++c) v[c] -= origin[c];
    rank.add(std::move(v));
  }
  report.affine_rank = static_cast<std::int64_t>(rank.rank());
  report.is_facet = report.classical_max == expression.classical_bound() &&
                    report.affine_rank == report.dimension - 1;
  return report;
}

}  // namespace cfbell
