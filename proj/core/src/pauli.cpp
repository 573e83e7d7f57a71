#include "qnn_forge/pauli.hpp"

#include <bit>

#include "qnn_forge/error.hpp"

namespace qnn_forge {

char to_char(PauliOp op) noexcept {
  switch (op) {
    case PauliOp::I: return 'I';
    case PauliOp::X: return 'X';
    case PauliOp::Y: return 'Y';
    case PauliOp::Z: return 'Z';
  }
  return '?';
}

PauliOp pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return PauliOp::I;
    case 'X': case 'x': return PauliOp::X;
    case 'Y': case 'y': return PauliOp::Y;
    case 'Z': case 'z': return PauliOp::Z;
    default: break;
  }
  throw InvalidInputError(std::string("unknown Pauli symbol '") + c + "'");
}

PauliString::PauliString(std::vector<PauliOp> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw InvalidInputError("Pauli string needs at least the readout wire");
  if (ops_.size() > static_cast<std::size_t>(kMaxWires) + 1) {
    throw DimensionError("Pauli string spans " + std::to_string(ops_.size()) +
                         " wires; at most " + std::to_string(kMaxWires + 1) + " supported");
  }
  const int top = n();
  int y_count = 0;
  for (int w = 0; w <= top; ++w) {
    const std::uint64_t bit = std::uint64_t{1} << (top - w);
    switch (ops_[w]) {
      case PauliOp::I: break;
      case PauliOp::X: x_mask_ |= bit; break;
      case PauliOp::Y: x_mask_ |= bit; z_mask_ |= bit; ++y_count; break;
      case PauliOp::Z: z_mask_ |= bit; break;
    }
  }
  // Y = iXZ, so each Y contributes a global factor i on top of the Z sign.
  static constexpr cplx kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  y_phase_ = kPowersOfI[y_count % 4];
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<PauliOp> ops;
  ops.reserve(text.size());
  for (char c : text) ops.push_back(pauli_from_char(c));
  return PauliString(std::move(ops));
}

PauliString PauliString::single(int n, int wire, PauliOp op) {
  if (n < 0 || wire < 0 || wire > n) throw IndexError("wire index out of range");
  std::vector<PauliOp> ops(static_cast<std::size_t>(n) + 1, PauliOp::I);
  ops[wire] = op;
  return PauliString(std::move(ops));
}

bool PauliString::touches_data_wires() const noexcept {
  return ((x_mask_ | z_mask_) >> 1) != 0;
}

void PauliString::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t dim = std::size_t{1} << ops_.size();
  if (in.size() != dim || out.size() != dim) {
    throw DimensionError("Pauli string over " + std::to_string(ops_.size()) +
                         " wires applied to a vector of length " + std::to_string(in.size()));
  }
  for (std::size_t b = 0; b < dim; ++b) {
    const bool odd = (std::popcount(b & z_mask_) & 1) != 0;
    out[b ^ x_mask_] = (odd ? -y_phase_ : y_phase_) * in[b];
  }
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(ops_.size());
  for (PauliOp op : ops_) s.push_back(to_char(op));
  return s;
}

}  // namespace qnn_forge
