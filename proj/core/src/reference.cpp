#include "cfbell/reference.hpp"

namespace cfbell {

namespace {

Eigen::Matrix2cd pauli_along(const std::array<double, 3>& n) {
  Eigen::Matrix2cd m;
  m(0, 0) = n[2];
  m(0, 1) = Complex(n[0], -n[1]);
  m(1, 0) = Complex(n[0], n[1]);
  m(1, 1) = -n[2];
  return m;
}

void check_three_qubits(const StateVector& state) {
  if (!(state.scenario() == Scenario(3, 2))) throw DomainError("Mermin inequality needs a 3-qubit state");
}

}  // namespace

double correlator3(const StateVector& state, const std::array<double, 3>& a,
                   const std::array<double, 3>& b, const std::array<double, 3>& c) {
  check_three_qubits(state);
  const auto A = pauli_along(a);
  const auto B = pauli_along(b);
  const auto C = pauli_along(c);
  const auto& v = state.amplitudes();
  Complex acc = 0.0;
  for (int r = 0; r < 8; ++r)
    for (int s = 0; s < 8; ++s) {
      const Complex entry = A(r >> 2, s >> 2) * B((r >> 1) & 1, (s >> 1) & 1) * C(r & 1, s & 1);
      acc += std::conj(v(r)) * entry * v(s);
    }
  return acc.real();
}

double mermin3_value(const StateVector& state, const BlochSettings& settings) {
  check_three_qubits(state);
  if (settings.parties() != 3) throw DomainError("Mermin settings need 3 parties");
  auto E = [&](int i, int j, int k) {
    return correlator3(state, settings.direction(0, i), settings.direction(1, j),
                       settings.direction(2, k));
  };
  return E(1, 1, 2) + E(1, 2, 1) + E(2, 1, 1) - E(2, 2, 2);
}

MerminResult mermin3_max(const StateVector& state, const OptimizerConfig& config) {
  check_three_qubits(state);
  const Objective f = [&](std::span<const double> x) {
    return mermin3_value(state, BlochSettings::from_free(3, x));
  };
  auto ms = multistart_maximize(f, 12, config);
  MerminResult r;
  r.settings = BlochSettings::from_free(3, ms.best.x);
  r.best_value = mermin3_value(state, r.settings);
  r.starts = std::move(ms.starts);
  r.converged = ms.best.converged;
  r.iterations = ms.evaluations;
  return r;
}

BellExpression reduce_to_bipartite(const BellExpression& expression) {
  if (expression.scenario().parties() != 3 || expression.family() != ExpressionFamily::multipartite)
    throw DomainError("reduction applies to the 3-party multipartite expression only");
  const Scenario reduced(2, expression.scenario().outcomes());
  std::vector<Term> terms;
  for (const auto& t : expression.terms())
    terms.push_back(Term{{t.settings[0], t.settings[1]}, t.sign, t.parity});
  return BellExpression(reduced, ExpressionFamily::reduced_tripartite, std::move(terms),
                        expression.classical_bound());
}

}  // namespace cfbell
