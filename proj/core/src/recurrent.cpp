#include "qnn_forge/recurrent.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "qnn_forge/error.hpp"

namespace qnn_forge {
namespace {

Eigen::Matrix2cd single_wire(PauliOp op) {
  const cplx i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (op) {
    case PauliOp::I: m << 1.0, 0.0, 0.0, 1.0; break;
    case PauliOp::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case PauliOp::Y: m << 0.0, -i, i, 0.0; break;
    case PauliOp::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

}  // namespace

CMatrix dense_pauli(const PauliString& p) {
  if (static_cast<int>(p.size()) > kMaxDenseWires) {
    throw DimensionError("dense matrices are limited to " + std::to_string(kMaxDenseWires) +
                         " wires, got " + std::to_string(p.size()));
  }
  CMatrix out = CMatrix::Identity(1, 1);
  for (PauliOp op : p.ops()) out = kron(out, single_wire(op));
  return out;
}

CMatrix dense_rotation(const PauliString& p, double theta) {
  const CMatrix P = dense_pauli(p);
  return std::cos(theta) * CMatrix::Identity(P.rows(), P.cols()) - cplx{0.0, std::sin(theta)} * P;
}

CMatrix dense_unitary(const Circuit& circuit, std::span<const double> thetas) {
  if (circuit.n() + 1 > kMaxDenseWires) {
    throw DimensionError("dense unitaries are limited to " + std::to_string(kMaxDenseWires) +
                         " wires, circuit has " + std::to_string(circuit.n() + 1));
  }
  if (thetas.size() != circuit.size()) {
    throw DimensionError("expected " + std::to_string(circuit.size()) + " angles, got " +
                         std::to_string(thetas.size()));
  }
  const Eigen::Index dim = Eigen::Index{1} << (circuit.n() + 1);
  CMatrix U = CMatrix::Identity(dim, dim);
  for (std::size_t k = 0; k < circuit.size(); ++k) U = dense_rotation(circuit[k].pauli, thetas[k]) * U;
  return U;
}

void RecurrentState::check_dimensions() const {
  if (E.rows() != H.size()) {
    throw DimensionError("E has " + std::to_string(E.rows()) + " rows, H has dimension " +
                         std::to_string(H.size()));
  }
  if (W_out.size() != 0 && W_out.cols() != 2 * H.size()) {
    throw DimensionError("W_out needs " + std::to_string(2 * H.size()) + " columns");
  }
}

CVector f_sigma(const CVector& z) {
  if (z.lpNorm<1>() >= 0.0) return z;
  return CVector::Zero(z.size());
}

RecurrentState recurrent_step(const RecurrentState& state, const CMatrix& U, const CVector& x_next) {
  state.check_dimensions();
  if (U.rows() != state.H.size() || U.cols() != state.H.size()) {
    throw DimensionError("U is " + std::to_string(U.rows()) + "x" + std::to_string(U.cols()) +
                         ", H has dimension " + std::to_string(state.H.size()));
  }
  if (x_next.size() != state.E.cols()) {
    throw DimensionError("x has dimension " + std::to_string(x_next.size()) + ", E expects " +
                         std::to_string(state.E.cols()));
  }
  RecurrentState next = state;
  next.Z = U * state.H + state.E * x_next;
  const CVector activated = f_sigma(next.Z);
  const double norm = activated.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("recurrent state cannot be normalized");
  next.H = activated / norm;
  return next;
}

RecurrentState recurrent_step(const RecurrentState& state, const Circuit& circuit,
                              std::span<const double> thetas, const CVector& x_next) {
  return recurrent_step(state, dense_unitary(circuit, thetas), x_next);
}

Eigen::VectorXd recurrent_output(const RecurrentState& state) {
  state.check_dimensions();
  Eigen::VectorXd stacked(2 * state.H.size());
  stacked << state.H.real(), state.H.imag();
  return state.W_out * stacked;
}

NormBoundReport norm_bound_check(std::span<const CVector> trajectory, const CMatrix& U,
                                 const CMatrix& df_dx_last) {
  NormBoundReport report;
  if (trajectory.size() < 2) return report;
  const CMatrix Ut = U.transpose();
  CMatrix chain = df_dx_last;
  double product = 1.0;
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const CMatrix D = trajectory[k].asDiagonal();
    const CMatrix factor = D * Ut;
    const double d_norm = trajectory[k].cwiseAbs().maxCoeff();
    report.transpose_dev = std::max(report.transpose_dev, std::abs(spectral_norm(factor) - d_norm));
    chain = chain * factor;
    product *= d_norm;
  }
  report.lhs = spectral_norm(chain);
  report.rhs = spectral_norm(df_dx_last) * product;
  const double slack = 1e-12 * std::max(1.0, report.rhs);
  report.pass = report.lhs <= report.rhs + slack &&
                report.transpose_dev <= 1e-10 * std::max(1.0, product);
  return report;
}

}  // namespace qnn_forge
