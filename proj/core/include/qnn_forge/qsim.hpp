#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qnn_forge/circuit.hpp"
#include "qnn_forge/pauli.hpp"
#include "qnn_forge/state_vector.hpp"

namespace qnn_forge {

/// A classical input string z in {-1,+1}^n with its binary label.
struct LabeledString {
  std::vector<int> z;
  int label = 1;

  /// Throws InvalidInputError unless every entry and the label are exactly +-1.
  void validate() const;
};

/// |z>|1>: z_i = +1 maps to |0>, z_i = -1 to |1>, readout wire is |1>.
StateVector basis_state(std::span<const int> z);

/// exp(-i theta P)|psi> = cos(theta)|psi> - i sin(theta) P|psi>.
StateVector apply_pauli_rotation(const StateVector& state, const PauliString& p, double theta);

/// Applies the gates in order, gate 0 first.
StateVector apply_sequence(const StateVector& state, const Circuit& circuit,
                           std::span<const double> thetas);

/// <psi|P|psi>.
cplx expectation(const StateVector& state, const PauliString& p);

/// Observable that measures `op` on the readout wire only.
PauliString readout_observable(int n, PauliOp op = PauliOp::Z);

/// Throws InvalidObservableError unless `obs` is a non-identity Pauli acting on
/// the readout wire alone.
void validate_observable(const PauliString& obs, int n);

/// Predicted label <z,1| U^dag O U |z,1> in [-1, 1]. Rounding excess past +-1
/// is clipped; anything larger throws NumericError.
double predicted_label(const Circuit& circuit, std::span<const double> thetas,
                       std::span<const int> z, const PauliString& observable);

/// Mean of `shots` simulated +-1 measurement outcomes with P(+1) = (1 + l)/2.
/// Deterministic in `seed`; draws from the shot stream only.
double sample_label(const Circuit& circuit, std::span<const double> thetas,
                    std::span<const int> z, const PauliString& observable,
                    std::uint64_t shots, std::uint64_t seed);

/// 1 - label * ltilde.
double loss(int label, double ltilde) noexcept;

}  // namespace qnn_forge
