#include "qnn_forge/qsim.hpp"

#include <algorithm>
#include <cmath>

#include "qnn_forge/error.hpp"
#include "qnn_forge/rng.hpp"

namespace qnn_forge {
namespace {

constexpr double kImagTolerance = 1e-10;

void check_length(const PauliString& p, int n) {
  if (p.n() != n) {
    throw DimensionError("Pauli string over " + std::to_string(p.size()) +
                         " wires does not match a state of " + std::to_string(n + 1) + " wires");
  }
}

// psi <- cos(theta) psi - i sin(theta) P psi, using `scratch` for P psi.
void rotate(std::vector<cplx>& psi, std::vector<cplx>& scratch, const PauliString& p,
            double theta) {
  p.apply(psi, scratch);
  const double c = std::cos(theta);
  const cplx minus_i_s{0.0, -std::sin(theta)};
  for (std::size_t b = 0; b < psi.size(); ++b) psi[b] = c * psi[b] + minus_i_s * scratch[b];
}

std::vector<cplx> evolve(const Circuit& circuit, std::span<const double> thetas,
                         std::span<const int> z) {
  if (thetas.size() != circuit.size()) {
    throw DimensionError("circuit has " + std::to_string(circuit.size()) + " gates but " +
                         std::to_string(thetas.size()) + " angles were given");
  }
  if (static_cast<int>(z.size()) != circuit.n()) {
    throw DimensionError("input string of length " + std::to_string(z.size()) +
                         " for a circuit over n=" + std::to_string(circuit.n()));
  }
  const StateVector input = basis_state(z);
  std::vector<cplx> psi(input.amps().begin(), input.amps().end());
  std::vector<cplx> scratch(psi.size());
  for (std::size_t k = 0; k < circuit.size(); ++k) rotate(psi, scratch, circuit[k].pauli, thetas[k]);
  return psi;
}

cplx inner_expectation(std::span<const cplx> psi, const PauliString& p) {
  std::vector<cplx> p_psi(psi.size());
  p.apply(psi, p_psi);
  cplx acc{0.0, 0.0};
  for (std::size_t b = 0; b < psi.size(); ++b) acc += std::conj(psi[b]) * p_psi[b];
  return acc;
}

}  // namespace

void LabeledString::validate() const {
  for (int v : z) {
    if (v != 1 && v != -1) throw InvalidInputError("string entries must be +1 or -1");
  }
  if (label != 1 && label != -1) throw InvalidInputError("labels must be +1 or -1");
}

StateVector basis_state(std::span<const int> z) {
  const int n = static_cast<int>(z.size());
  if (n > kMaxWires) {
    throw DimensionError("n=" + std::to_string(n) + " exceeds the limit of " +
                         std::to_string(kMaxWires) + " wires");
  }
  std::size_t index = 1;  // readout wire, bit 0, is |1>
  for (int w = 0; w < n; ++w) {
    if (z[w] == -1) {
      index |= std::size_t{1} << (n - w);
    } else if (z[w] != 1) {
      throw InvalidInputError("entry " + std::to_string(w) + " of z is " + std::to_string(z[w]) +
                              "; entries must be +1 or -1");
    }
  }
  std::vector<cplx> amps(std::size_t{1} << (n + 1));
  amps[index] = 1.0;
  return StateVector(n, std::move(amps));
}

StateVector apply_pauli_rotation(const StateVector& state, const PauliString& p, double theta) {
  check_length(p, state.n());
  std::vector<cplx> psi(state.amps().begin(), state.amps().end());
  std::vector<cplx> scratch(psi.size());
  rotate(psi, scratch, p, theta);
  return StateVector(state.n(), std::move(psi));
}

StateVector apply_sequence(const StateVector& state, const Circuit& circuit,
                           std::span<const double> thetas) {
  if (thetas.size() != circuit.size()) {
    throw DimensionError("circuit has " + std::to_string(circuit.size()) + " gates but " +
                         std::to_string(thetas.size()) + " angles were given");
  }
  if (circuit.n() != state.n()) throw DimensionError("circuit and state wire counts differ");
  std::vector<cplx> psi(state.amps().begin(), state.amps().end());
  std::vector<cplx> scratch(psi.size());
  for (std::size_t k = 0; k < circuit.size(); ++k) rotate(psi, scratch, circuit[k].pauli, thetas[k]);
  return StateVector(state.n(), std::move(psi));
}

cplx expectation(const StateVector& state, const PauliString& p) {
  check_length(p, state.n());
  return inner_expectation(state.amps(), p);
}

PauliString readout_observable(int n, PauliOp op) { return PauliString::single(n, n, op); }

void validate_observable(const PauliString& obs, int n) {
  if (obs.n() != n) {
    throw InvalidObservableError("observable spans " + std::to_string(obs.size()) +
                                 " wires, circuit has " + std::to_string(n + 1));
  }
  if (obs.touches_data_wires()) {
    throw InvalidObservableError("observable " + obs.str() + " acts on non-readout wires");
  }
  if (obs.is_identity()) throw InvalidObservableError("observable must be X, Y or Z on the readout");
}

double predicted_label(const Circuit& circuit, std::span<const double> thetas,
                       std::span<const int> z, const PauliString& observable) {
  validate_observable(observable, circuit.n());
  const std::vector<cplx> psi = evolve(circuit, thetas, z);
  const cplx e = inner_expectation(psi, observable);
  if (!(std::abs(e.imag()) <= kImagTolerance)) {
    throw NumericError("expectation has imaginary part " + std::to_string(e.imag()));
  }
  // Rounding in the evolution can push |<P>| a few ulps past 1.
  if (!(std::abs(e.real()) <= 1.0 + kImagTolerance)) {
    throw NumericError("expectation " + std::to_string(e.real()) + " outside [-1, 1]");
  }
  return std::clamp(e.real(), -1.0, 1.0);
}

double sample_label(const Circuit& circuit, std::span<const double> thetas,
                    std::span<const int> z, const PauliString& observable,
                    std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw InvalidInputError("shots must be positive");
  const double ltilde = predicted_label(circuit, thetas, z, observable);
  const double p_plus = std::clamp((1.0 + ltilde) / 2.0, 0.0, 1.0);
  CounterRng rng(seed, Stream::kShots);
  std::int64_t sum = 0;
  for (std::uint64_t s = 0; s < shots; ++s) sum += rng.uniform() < p_plus ? 1 : -1;
  return static_cast<double>(sum) / static_cast<double>(shots);
}

double loss(int label, double ltilde) noexcept { return 1.0 - label * ltilde; }

}  // namespace qnn_forge
