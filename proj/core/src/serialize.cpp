#include "cfbell/serialize.hpp"

#include <cstdio>
#include <sstream>

namespace cfbell {

Json to_json(const FacetReport& report) {
  return Json{{"n", report.scenario.parties()},
              {"d", report.scenario.outcomes()},
              {"family", std::string(to_string(report.family))},
              {"dimension", report.dimension},
              {"classical_max", to_string(report.classical_max)},
              {"saturating_count", report.saturating_count},
              {"affine_rank", report.affine_rank},
              {"is_facet", report.is_facet}};
}

Json to_json(const BellExpression& expression) {
  Json terms = Json::array();
  for (const auto& t : expression.terms())
    terms.push_back({{"settings", t.settings}, {"sign", t.sign}, {"parity", t.parity}});
  return Json{{"n", expression.scenario().parties()},
              {"d", expression.scenario().outcomes()},
              {"family", std::string(to_string(expression.family()))},
              {"terms", terms},
              {"bound", to_string(expression.classical_bound())}};
}

Json to_json(const ClassicalMaximum& result) {
  Json assignment = Json::array();
  const auto& sc = result.argmax.scenario();
  for (int j = 0; j < sc.parties(); ++j)
    assignment.push_back({result.argmax.outcome(j, 1), result.argmax.outcome(j, 2)});
  Json histogram = Json::array();
  for (const auto& [value, count] : result.histogram)
    histogram.push_back({{"value", to_string(value)}, {"count", count}});
  return Json{{"classical_max", to_string(result.maximum)},
              {"argmax", {{"index", result.argmax.index()}, {"assignment", assignment}}},
              {"histogram", histogram},
              {"strategies", result.strategies}};
}

Json to_json(const StateVector& state) {
  Json amps = Json::array();
  for (Eigen::Index k = 0; k < state.amplitudes().size(); ++k)
    amps.push_back({state.amplitudes()(k).real(), state.amplitudes()(k).imag()});
  return Json{{"n", state.scenario().parties()}, {"d", state.scenario().outcomes()}, {"amplitudes", amps}};
}

StateVector state_from_json(const Json& j) {
  try {
    const Scenario sc(j.at("n").get<int>(), j.at("d").get<int>());
    const auto& amps = j.at("amplitudes");
    ComplexVector v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t k = 0; k < amps.size(); ++k) {
      const auto& a = amps[k];
      if (!a.is_array() || a.size() != 2) throw DomainError("amplitude must be a [re, im] pair");
      v(static_cast<Eigen::Index>(k)) = Complex(a[0].get<double>(), a[1].get<double>());
    }
    return StateVector(sc, std::move(v));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed state JSON: ") + e.what());
  }
}

Json to_json(const PhaseConfiguration& config) {
  Json parties = Json::array();
  const auto& sc = config.scenario();
  for (int j = 0; j < sc.parties(); ++j)
    parties.push_back({config.phases(j, 1), config.phases(j, 2)});
  return Json{{"n", sc.parties()}, {"d", sc.outcomes()}, {"phases", parties}};
}

PhaseConfiguration phases_from_json(const Json& j) {
  try {
    const Scenario sc(j.at("n").get<int>(), j.at("d").get<int>());
    return PhaseConfiguration(sc, j.at("phases").get<std::vector<std::vector<std::vector<double>>>>());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed phase JSON: ") + e.what());
  }
}

Json to_json(const BlochSettings& settings) {
  Json parties = Json::array();
  for (const auto& party : settings.angles) {
    Json s = Json::array();
    for (const auto& a : party) s.push_back({{"theta", a[0]}, {"phi", a[1]}});
    parties.push_back(s);
  }
  return Json{{"angles", parties}};
}

namespace {

Json starts_json(const std::vector<StartSummary>& starts) {
  Json out = Json::array();
  for (const auto& s : starts)
    out.push_back({{"start", s.index}, {"value", s.value}, {"converged", s.converged}});
  return out;
}

}  // namespace

Json to_json(const OptimizationResult& result) {
  Json j{{"best_value", result.best_value},
         {"measurements", std::string(to_string(result.measurements))}};
  if (result.phases) j["phases"] = to_json(*result.phases);
  if (result.bloch) j["bloch"] = to_json(*result.bloch);
  if (!result.state_parameters.empty()) j["state_parameters"] = result.state_parameters;
  if (result.state) j["state"] = to_json(*result.state);
  if (!result.trace.empty()) j["trace"] = result.trace;
  j["starts"] = starts_json(result.starts);
  j["converged"] = result.converged;
  return j;
}

Json to_json(const MerminResult& result) {
  return Json{{"best_value", result.best_value},
              {"bloch", to_json(result.settings)},
              {"starts", starts_json(result.starts)},
              {"converged", result.converged}};
}

namespace {

std::string digits(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += std::to_string(x);
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string table_to_csv(const ProbabilityTable& table) {
  std::ostringstream out;
  out << "settings,outcomes,probability\n";
  const auto& sc = table.scenario();
  for (std::size_t b = 0; b < sc.settings_tuples(); ++b) {
    const auto settings = digits(sc.settings_at(b));
    const auto block = table.block(b);
    for (std::size_t k = 0; k < block.size(); ++k)
      out << settings << ',' << digits(sc.outcomes_at(k)) << ',' << format_double(block[k]) << '\n';
  }
  return out.str();
}

std::string sweep_to_csv(StateFamily family, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  for (auto name : family_parameter_names(family)) out << name << ',';
  out << "best_value,converged\n";
  for (const auto& row : rows) {
    for (double p : row.parameters) out << format_double(p) << ',';
    out << format_double(row.best_value) << ',' << (row.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace cfbell
