#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qnn_forge/pauli.hpp"

namespace qnn_forge {

/// Pure state of n data wires plus one readout wire. Construction validates
/// the length (2^(n+1)) and unit norm within 1e-10.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-10;

  StateVector(int n, std::vector<cplx> amps);

  int n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amps() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm() const noexcept;

 private:
  int n_;
  std::vector<cplx> amps_;
};

double l2_norm(std::span<const cplx> v) noexcept;

}  // namespace qnn_forge
