#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cfbell/scenario.hpp"

namespace cfbell {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Largest joint dimension d^N the dense engine accepts.
inline constexpr std::size_t kMaxHilbertDimension = 10'000;

/**
 * Pure state on the d^N joint space, basis |x_1 x_2 ... x_N> with party 1
 * most significant.
 */
class StateVector {
 public:
  /// Renormalizes when |norm - 1| <= 1e-4; larger deviations throw DomainError.
  StateVector(Scenario scenario, ComplexVector amplitudes);

  static StateVector basis(const Scenario& scenario, std::size_t index);

  const Scenario& scenario() const noexcept { return scenario_; }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  Scenario scenario_;
  ComplexVector amplitudes_;
};

/**
 * Beamsplitter phase vectors, one per (party, setting), in the gauge phi^0 = 0.
 * Construction shifts each vector so that its first entry is zero.
 */
class PhaseConfiguration {
 public:
  /// phases[party][setting-1] is a length-d vector in radians.
  PhaseConfiguration(Scenario scenario, std::vector<std::vector<std::vector<double>>> phases);

  static PhaseConfiguration zeros(const Scenario& scenario);
  /// From the 2N(d-1) free phases, ordered party, setting, component 1..d-1.
  static PhaseConfiguration from_free(const Scenario& scenario, std::span<const double> free);

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<double>& phases(int party, int setting) const {
    return phases_[static_cast<std::size_t>(party)][static_cast<std::size_t>(setting - 1)];
  }
  std::vector<double> free_parameters() const;
  std::size_t free_count() const noexcept {
    return static_cast<std::size_t>(2 * scenario_.parties() * (scenario_.outcomes() - 1));
  }
  /// Same settings with every angle wrapped into (-pi, pi].
  PhaseConfiguration wrapped() const;

 private:
  Scenario scenario_;
  std::vector<std::vector<std::vector<double>>> phases_;
};

/// Qubit measurement directions (polar, azimuthal) for every (party, setting).
struct BlochSettings {
  /// angles[party][setting-1] = {theta, phi}.
  std::vector<std::array<std::array<double, 2>, 2>> angles;

  /// Unit vector for one (party, setting).
  std::array<double, 3> direction(int party, int setting) const;
  std::size_t parties() const noexcept { return angles.size(); }
  static BlochSettings from_free(std::size_t parties, std::span<const double> free);
  std::vector<double> free_parameters() const;
};

/**
 * One d x d unitary per (party, setting). Row k of a unitary is the outcome
 * k, column l the input basis state, so the amplitude of outcome tuple x is
 * <x| U_1 (x) ... (x) U_N |psi>.
 */
class MeasurementSet {
 public:
  MeasurementSet(Scenario scenario, std::vector<std::array<ComplexMatrix, 2>> unitaries);

  static MeasurementSet from_phases(const PhaseConfiguration& config);
  /// Qubit projective measurements along Bloch directions; outcome 0 is the +1 eigenvector.
  static MeasurementSet from_bloch(const Scenario& scenario, const BlochSettings& settings);

  const Scenario& scenario() const noexcept { return scenario_; }
  const ComplexMatrix& unitary(int party, int setting) const {
    return unitaries_[static_cast<std::size_t>(party)][static_cast<std::size_t>(setting - 1)];
  }

 private:
  Scenario scenario_;
  std::vector<std::array<ComplexMatrix, 2>> unitaries_;
};

/// U_kl = alpha^{kl} exp(i phi^l) / sqrt(d) with alpha = exp(2 pi i / d).
ComplexMatrix beamsplitter_unitary(std::span<const double> phases, int d);

/// Qubit unitary whose rows are <+n| and <-n| for the direction (theta, phi).
ComplexMatrix bloch_unitary(double theta, double phi);

/// (U_1 (x) ... (x) U_N) |psi> for the settings tuple, without forming the Kronecker product.
ComplexVector apply_local(const StateVector& state, const MeasurementSet& measurements,
                          std::span<const int> settings);

ProbabilityTable joint_probabilities(const StateVector& state, const MeasurementSet& measurements);
ProbabilityTable joint_probabilities(const StateVector& state, const PhaseConfiguration& config);

/// Bell value computed from the expression's four blocks only.
double quantum_bell_value(const StateVector& state, const MeasurementSet& measurements,
                          const BellExpression& expression);
double quantum_bell_value(const StateVector& state, const PhaseConfiguration& config,
                          const BellExpression& expression);

/// Hermitian operator B with <psi|B|psi> equal to the Bell value at fixed measurements.
class BellOperator {
 public:
  BellOperator(const MeasurementSet& measurements, const BellExpression& expression);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const Scenario& scenario() const noexcept { return measurements_.scenario(); }
  const MeasurementSet& measurements() const noexcept { return measurements_; }
  const BellExpression& expression() const noexcept { return expression_; }
  double expectation(const StateVector& state) const;

 private:
  MeasurementSet measurements_;
  BellExpression expression_;
  ComplexMatrix matrix_;
};

BellOperator bell_operator(const PhaseConfiguration& config, const BellExpression& expression);
BellOperator bell_operator(const MeasurementSet& measurements, const BellExpression& expression);

struct Eigenpair {
  double value;
  StateVector state;
  double residual;  ///< |Bv - lambda v|
};

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
Eigenpair max_eigenpair(const BellOperator& op);
Eigenpair max_eigenpair(const ComplexMatrix& hermitian, const Scenario& scenario);

/// cos(theta)|000> + sin(theta)|111>
StateVector ghz_qubit(double theta);
/// sin t1 sin t2 |000> + sin t1 cos t2 |111> + cos t1 |222>
StateVector ghz_qutrit(double theta1, double theta2);
/// (1/sqrt d) sum_x |x...x>
StateVector ghz_max(int parties, int d);
/// sin b sin x |001> + sin b cos x |010> + cos b |100>
StateVector w_state(double beta, double xi);

/// Largest white-noise fraction F with (1-F) * violation >= 2, i.e. max(0, 1 - 2/violation).
double noise_threshold(double violation);

}  // namespace cfbell
