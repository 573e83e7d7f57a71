#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qnn_forge/circuit.hpp"
#include "qnn_forge/pauli.hpp"

namespace qnn_forge {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dense recurrent dynamics are diagnostics only and stay small.
inline constexpr int kMaxDenseWires = 3;

/// Kronecker product of the single-wire matrices, wire 0 as the most
/// significant factor (same layout as StateVector).
CMatrix dense_pauli(const PauliString& p);

/// cos(theta) I - i sin(theta) P.
CMatrix dense_rotation(const PauliString& p, double theta);

/// U = U_last ... U_first for the circuit on at most kMaxDenseWires total
/// wires. Throws DimensionError for wider circuits.
CMatrix dense_unitary(const Circuit& circuit, std::span<const double> thetas);

struct RecurrentState {
  CVector H;       // unit L2 norm
  CVector Z;       // last pre-activation
  CMatrix E;       // input embedding, dim(H) x dim(x)
  Eigen::MatrixXd W_out;  // readout, rows x 2 dim(H)

  /// Throws DimensionError if E or W_out do not fit H.
  void check_dimensions() const;
};

/// f(Z) = Z when |Z|_1 >= 0, else 0. The second branch cannot trigger.
CVector f_sigma(const CVector& z);

/// Z' = U H + E x_next, H' = f_sigma(Z') / |f_sigma(Z')|_2. Throws
/// DimensionError on mismatched shapes and NumericError if Z' vanishes.
RecurrentState recurrent_step(const RecurrentState& state, const CMatrix& U, const CVector& x_next);
RecurrentState recurrent_step(const RecurrentState& state, const Circuit& circuit,
                              std::span<const double> thetas, const CVector& x_next);

/// W_out (Re H; Im H).
Eigen::VectorXd recurrent_output(const RecurrentState& state);

struct NormBoundReport {
  /// |df/dx_nu| with df/dx_nu = df/dx_last prod_k D_{k+1} U^T.
  double lhs = 0.0;
  /// |df/dx_last| prod_k |D_{k+1}|.
  double rhs = 0.0;
  /// max_k | |D_{k+1} U^T| - |D_{k+1}| |.
  double transpose_dev = 0.0;
  bool pass = false;
};

/// Jacobian norm bound along a trajectory Z_nu, ..., Z_T (at least two
/// entries), spectral norms throughout. df_dx_last is a 1 x dim row.
NormBoundReport norm_bound_check(std::span<const CVector> trajectory, const CMatrix& U,
                                 const CMatrix& df_dx_last);

}  // namespace qnn_forge
