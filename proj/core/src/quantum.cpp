#include "cfbell/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace cfbell {

namespace {

void check_dimension(const Scenario& scenario) {
  if (scenario.outcome_tuples() > kMaxHilbertDimension)
    throw ResourceError("joint dimension d^N = " + std::to_string(scenario.outcome_tuples()) +
                        " exceeds the dense engine cap of " + std::to_string(kMaxHilbertDimension));
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - std::numbers::pi;  // (-pi, pi]
}

}  // namespace

StateVector::StateVector(Scenario scenario, ComplexVector amplitudes)
    : scenario_(std::move(scenario)), amplitudes_(std::move(amplitudes)) {
  check_dimension(scenario_);
  if (static_cast<std::size_t>(amplitudes_.size()) != scenario_.outcome_tuples())
    throw DomainError("state has " + std::to_string(amplitudes_.size()) + " amplitudes, expected " +
                      std::to_string(scenario_.outcome_tuples()));
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-4)
    throw DomainError("state norm " + std::to_string(norm) + " is not within 1e-4 of 1");
  amplitudes_ /= norm;
}

StateVector StateVector::basis(const Scenario& scenario, std::size_t index) {
  check_dimension(scenario);
  if (index >= scenario.outcome_tuples()) throw DomainError("basis index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(scenario.outcome_tuples()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(scenario, std::move(v));
}

PhaseConfiguration::PhaseConfiguration(Scenario scenario,
                                       std::vector<std::vector<std::vector<double>>> phases)
    : scenario_(std::move(scenario)), phases_(std::move(phases)) {
  if (phases_.size() != static_cast<std::size_t>(scenario_.parties()))
    throw DomainError("phase configuration needs one entry per party");
  for (auto& party : phases_) {
    if (party.size() != 2) throw DomainError("phase configuration needs two settings per party");
    for (auto& v : party) {
      if (v.size() != static_cast<std::size_t>(scenario_.outcomes()))
        throw DomainError("phase vector length must equal d");
      const double shift = v.front();
      for (auto& x : v) {
        if (!std::isfinite(x)) throw DomainError("phase must be finite");
        x -= shift;
      }
    }
  }
}

PhaseConfiguration PhaseConfiguration::zeros(const Scenario& scenario) {
  return PhaseConfiguration(
      scenario, std::vector<std::vector<std::vector<double>>>(
                    static_cast<std::size_t>(scenario.parties()),
                    std::vector<std::vector<double>>(
                        2, std::vector<double>(static_cast<std::size_t>(scenario.outcomes()), 0.0))));
}

PhaseConfiguration PhaseConfiguration::from_free(const Scenario& scenario,
                                                 std::span<const double> free) {
  const auto d = static_cast<std::size_t>(scenario.outcomes());
  if (free.size() != 2 * static_cast<std::size_t>(scenario.parties()) * (d - 1))
    throw DomainError("wrong number of free phases");
  std::vector<std::vector<std::vector<double>>> phases(static_cast<std::size_t>(scenario.parties()));
  std::size_t k = 0;
  for (auto& party : phases) {
    party.resize(2);
    for (auto& v : party) {
      v.assign(d, 0.0);
      for (std::size_t l = 1; l < d; ++l) v[l] = free[k++];
    }
  }
  return PhaseConfiguration(scenario, std::move(phases));
}

std::vector<double> PhaseConfiguration::free_parameters() const {
  std::vector<double> out;
  out.reserve(free_count());
  for (const auto& party : phases_)
    for (const auto& v : party) out.insert(out.end(), v.begin() + 1, v.end());
  return out;
}

PhaseConfiguration PhaseConfiguration::wrapped() const {
  auto phases = phases_;
  for (auto& party : phases)
    for (auto& v : party)
      for (auto& x : v) x = wrap_angle(x);
  return PhaseConfiguration(scenario_, std::move(phases));
}

std::array<double, 3> BlochSettings::direction(int party, int setting) const {
  const auto& a = angles.at(static_cast<std::size_t>(party)).at(static_cast<std::size_t>(setting - 1));
  return {std::sin(a[0]) * std::cos(a[1]), std::sin(a[0]) * std::sin(a[1]), std::cos(a[0])};
}

BlochSettings BlochSettings::from_free(std::size_t parties, std::span<const double> free) {
  if (free.size() != 4 * parties) throw DomainError("wrong number of Bloch angles");
  BlochSettings out;
  out.angles.resize(parties);
  std::size_t k = 0;
  for (auto& party : out.angles)
    for (auto& s : party) {
      s[0] = free[k++];
      s[1] = free[k++];
    }
  return out;
}

std::vector<double> BlochSettings::free_parameters() const {
  std::vector<double> out;
  for (const auto& party : angles)
    for (const auto& s : party) {
      out.push_back(s[0]);
      out.push_back(s[1]);
    }
  return out;
}

MeasurementSet::MeasurementSet(Scenario scenario, std::vector<std::array<ComplexMatrix, 2>> unitaries)
    : scenario_(std::move(scenario)), unitaries_(std::move(unitaries)) {
  if (unitaries_.size() != static_cast<std::size_t>(scenario_.parties()))
    throw DomainError("measurement set needs one entry per party");
  const auto d = static_cast<Eigen::Index>(scenario_.outcomes());
  for (const auto& party : unitaries_)
    for (const auto& u : party)
      if (u.rows() != d || u.cols() != d) throw DomainError("measurement unitary must be d x d");
}

MeasurementSet MeasurementSet::from_phases(const PhaseConfiguration& config) {
  const auto& sc = config.scenario();
  std::vector<std::array<ComplexMatrix, 2>> us(static_cast<std::size_t>(sc.parties()));
  for (int j = 0; j < sc.parties(); ++j)
    for (int s = 1; s <= 2; ++s)
      us[static_cast<std::size_t>(j)][static_cast<std::size_t>(s - 1)] =
          beamsplitter_unitary(config.phases(j, s), sc.outcomes());
  return MeasurementSet(sc, std::move(us));
}

MeasurementSet MeasurementSet::from_bloch(const Scenario& scenario, const BlochSettings& settings) {
  if (scenario.outcomes() != 2) throw DomainError("Bloch measurements need qubits (d = 2)");
  if (settings.parties() != static_cast<std::size_t>(scenario.parties()))
    throw DomainError("Bloch settings need one entry per party");
  std::vector<std::array<ComplexMatrix, 2>> us(settings.parties());
  for (std::size_t j = 0; j < settings.parties(); ++j)
    for (std::size_t s = 0; s < 2; ++s)
      us[j][s] = bloch_unitary(settings.angles[j][s][0], settings.angles[j][s][1]);
  return MeasurementSet(scenario, std::move(us));
}

ComplexMatrix beamsplitter_unitary(std::span<const double> phases, int d) {
  if (d < 2) throw InvalidScenario("beamsplitter needs d >= 2");
  if (phases.size() != static_cast<std::size_t>(d))
    throw DomainError("phase vector length " + std::to_string(phases.size()) + " != d = " +
                      std::to_string(d));
  ComplexMatrix u(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      // alpha^{kl}: reduce the exponent mod d to keep the angle small.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % d) / d +
                           phases[static_cast<std::size_t>(l)];
      u(k, l) = norm * std::polar(1.0, angle);
    }
  return u;
}

ComplexMatrix bloch_unitary(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  // |+n> = (c, e s), |-n> = (s, -e c); rows hold the conjugated kets.
  ComplexMatrix u(2, 2);
  u(0, 0) = c;
  u(0, 1) = std::conj(e) * s;
  u(1, 0) = s;
  u(1, 1) = -std::conj(e) * c;
  return u;
}

ComplexVector apply_local(const StateVector& state, const MeasurementSet& measurements,
                          std::span<const int> settings) {
  const auto& sc = state.scenario();
  if (!(sc == measurements.scenario())) throw DomainError("state and measurements differ in scenario");
  sc.settings_index(settings);
  const auto d = static_cast<std::size_t>(sc.outcomes());
  const auto dim = sc.outcome_tuples();
  ComplexVector current = state.amplitudes();
  ComplexVector scratch(static_cast<Eigen::Index>(dim));
  std::size_t inner = dim;
  for (int j = 0; j < sc.parties(); ++j) {
    inner /= d;
    const std::size_t outer = dim / (inner * d);
    const auto& u = measurements.unitary(j, settings[static_cast<std::size_t>(j)]);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < inner; ++i) {
          Complex acc = 0.0;
          for (std::size_t l = 0; l < d; ++l)
            acc += u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                   current(static_cast<Eigen::Index>((o * d + l) * inner + i));
          scratch(static_cast<Eigen::Index>((o * d + k) * inner + i)) = acc;
        }
    current.swap(scratch);
  }
  return current;
}

ProbabilityTable joint_probabilities(const StateVector& state, const MeasurementSet& measurements) {
  const auto& sc = state.scenario();
  ProbabilityTable table(sc);
  for (std::size_t b = 0; b < sc.settings_tuples(); ++b) {
    const auto amps = apply_local(state, measurements, sc.settings_at(b));
    auto block = table.block(b);
    for (std::size_t k = 0; k < block.size(); ++k)
      block[k] = std::norm(amps(static_cast<Eigen::Index>(k)));
  }
  return table;
}

ProbabilityTable joint_probabilities(const StateVector& state, const PhaseConfiguration& config) {
  return joint_probabilities(state, MeasurementSet::from_phases(config));
}

namespace {

/// Weight numerators over d-1 for every outcome index of one term.
std::vector<int> term_weights(const Term& term, const Scenario& sc) {
  std::vector<int> w(sc.outcome_tuples());
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::int64_t sum = 0;
    for (int x : sc.outcomes_at(k)) sum += x;
    w[k] = weight_numerator(term.parity, sum, sc.outcomes());
  }
  return w;
}

void check_pair(const Scenario& a, const BellExpression& expression) {
  if (!(a == expression.scenario())) throw DomainError("expression and measurements differ in scenario");
}

}  // namespace

double quantum_bell_value(const StateVector& state, const MeasurementSet& measurements,
                          const BellExpression& expression) {
  const auto& sc = state.scenario();
  check_pair(sc, expression);
  double total = 0.0;
  for (const auto& t : expression.terms()) {
    const auto amps = apply_local(state, measurements, t.settings);
    const auto w = term_weights(t, sc);
    double q = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      q += w[k] * std::norm(amps(static_cast<Eigen::Index>(k)));
    total += t.sign * q / (sc.outcomes() - 1);
  }
  return total;
}

double quantum_bell_value(const StateVector& state, const PhaseConfiguration& config,
                          const BellExpression& expression) {
  return quantum_bell_value(state, MeasurementSet::from_phases(config), expression);
}

BellOperator::BellOperator(const MeasurementSet& measurements, const BellExpression& expression)
    : measurements_(measurements), expression_(expression) {
  const auto& sc = measurements.scenario();
  check_pair(sc, expression);
  check_dimension(sc);
  const auto dim = static_cast<Eigen::Index>(sc.outcome_tuples());
  matrix_ = ComplexMatrix::Zero(dim, dim);
  for (const auto& t : expression.terms()) {
    ComplexMatrix w = ComplexMatrix::Identity(1, 1);
    for (int j = 0; j < sc.parties(); ++j) {
      const auto& u = measurements.unitary(j, t.settings[static_cast<std::size_t>(j)]);
      ComplexMatrix next(w.rows() * u.rows(), w.cols() * u.cols());
      for (Eigen::Index a = 0; a < w.rows(); ++a)
        for (Eigen::Index b = 0; b < w.cols(); ++b)
          next.block(a * u.rows(), b * u.cols(), u.rows(), u.cols()) = w(a, b) * u;
      w = std::move(next);
    }
    const auto weights = term_weights(t, sc);
    Eigen::VectorXd diag(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
      diag(k) = t.sign * static_cast<double>(weights[static_cast<std::size_t>(k)]) / (sc.outcomes() - 1);
    matrix_.noalias() += w.adjoint() * diag.asDiagonal() * w;
  }
  // Remove rounding asymmetry so the matrix is Hermitian to machine precision.
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
}

double BellOperator::expectation(const StateVector& state) const {
  if (!(state.scenario() == scenario())) throw DomainError("state and operator differ in scenario");
  const auto& v = state.amplitudes();
  return (v.adjoint() * matrix_ * v)(0, 0).real();
}

BellOperator bell_operator(const PhaseConfiguration& config, const BellExpression& expression) {
  return BellOperator(MeasurementSet::from_phases(config), expression);
}

BellOperator bell_operator(const MeasurementSet& measurements, const BellExpression& expression) {
  return BellOperator(measurements, expression);
}

Eigenpair max_eigenpair(const ComplexMatrix& hermitian, const Scenario& scenario) {
  check_dimension(scenario);
  if (static_cast<std::size_t>(hermitian.rows()) != scenario.outcome_tuples() ||
      hermitian.rows() != hermitian.cols())
    throw DomainError("operator dimension does not match the scenario");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw NumericError("Hermitian eigensolver did not converge", std::numeric_limits<double>::infinity());
  const Eigen::Index top = hermitian.rows() - 1;  // eigenvalues are ascending
  const double lambda = solver.eigenvalues()(top);
  ComplexVector v = solver.eigenvectors().col(top);
  // Fix the global phase: largest-magnitude component real and positive.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v *= std::polar(1.0, -std::arg(v(arg)));
  v.normalize();
  const double residual = (hermitian * v - lambda * v).norm();
  const double scale = std::max(1.0, std::abs(lambda));
  if (residual > 1e-9 * scale)
    throw NumericError("dominant eigenpair residual " + std::to_string(residual) + " too large", residual);
  return {lambda, StateVector(scenario, std::move(v)), residual};
}

Eigenpair max_eigenpair(const BellOperator& op) {
  return max_eigenpair(op.matrix(), op.scenario());
}

StateVector ghz_qubit(double theta) {
  const Scenario sc(3, 2);
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = std::cos(theta);
  v(7) = std::sin(theta);
  return StateVector(sc, std::move(v));
}

StateVector ghz_qutrit(double theta1, double theta2) {
  const Scenario sc(3, 3);
  ComplexVector v = ComplexVector::Zero(27);
  v(0) = std::sin(theta1) * std::sin(theta2);
  v(13) = std::sin(theta1) * std::cos(theta2);
  v(26) = std::cos(theta1);
  return StateVector(sc, std::move(v));
}

StateVector ghz_max(int parties, int d) {
  const Scenario sc(parties, d);
  check_dimension(sc);
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(sc.outcome_tuples()));
  for (int x = 0; x < d; ++x) {
    const Outcomes repeated(static_cast<std::size_t>(parties), x);
    v(static_cast<Eigen::Index>(sc.outcome_index(repeated))) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  return StateVector(sc, std::move(v));
}

StateVector w_state(double beta, double xi) {
  const Scenario sc(3, 2);
  ComplexVector v = ComplexVector::Zero(8);
  v(1) = std::sin(beta) * std::sin(xi);
  v(2) = std::sin(beta) * std::cos(xi);
  v(4) = std::cos(beta);
  return StateVector(sc, std::move(v));
}

double noise_threshold(double violation) {
  if (!(violation > 0.0)) throw DomainError("noise threshold needs a positive violation");
  return std::max(0.0, 1.0 - 2.0 / violation);
}

}  // namespace cfbell
