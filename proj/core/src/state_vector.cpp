#include "qnn_forge/state_vector.hpp"

#include <cmath>

#include "qnn_forge/error.hpp"

namespace qnn_forge {

double l2_norm(std::span<const cplx> v) noexcept {
  double s = 0.0;
  for (const cplx& a : v) s += std::norm(a);
  return std::sqrt(s);
}

StateVector::StateVector(int n, std::vector<cplx> amps) : n_(n), amps_(std::move(amps)) {
  if (n < 0 || n > kMaxWires) {
    throw DimensionError("wire count n=" + std::to_string(n) + " outside [0, " +
                         std::to_string(kMaxWires) + "]");
  }
  if (amps_.size() != (std::size_t{1} << (n + 1))) {
    throw DimensionError("state of n=" + std::to_string(n) + " needs " +
                         std::to_string(std::size_t{1} << (n + 1)) + " amplitudes, got " +
                         std::to_string(amps_.size()));
  }
  const double nrm = norm();
  if (!(std::abs(nrm - 1.0) <= kNormTolerance)) {
    throw InvalidInputError("state vector norm " + std::to_string(nrm) + " is not 1");
  }
}

double StateVector::norm() const noexcept { return l2_norm(amps_); }

}  // namespace qnn_forge
