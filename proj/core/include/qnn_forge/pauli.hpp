#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qnn_forge {

using cplx = std::complex<double>;

/// Largest supported count of data wires (the readout wire comes on top).
inline constexpr int kMaxWires = 12;

enum class PauliOp : std::uint8_t { I, X, Y, Z };

char to_char(PauliOp op) noexcept;
PauliOp pauli_from_char(char c);

/// Tensor product of single-wire Paulis over n+1 wires; wire n is the readout.
///
/// Amplitude indexing is big-endian in the wire number: wire w controls bit
/// (n - w) of the basis index, so the readout wire is bit 0 and wire 0 is the
/// most significant bit. Under this layout P|b> = phase(b) |b ^ x_mask>.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<PauliOp> ops);
  /// Parses e.g. "XIZ" (wire 0 first). Throws InvalidInputError.
  static PauliString parse(std::string_view text);
  /// Identity everywhere except `op` on `wire`.
  static PauliString single(int n, int wire, PauliOp op);

  /// Number of data wires, i.e. size() - 1.
  int n() const noexcept { return static_cast<int>(ops_.size()) - 1; }
  std::size_t size() const noexcept { return ops_.size(); }
  PauliOp operator[](std::size_t wire) const { return ops_[wire]; }
  const std::vector<PauliOp>& ops() const noexcept { return ops_; }

  std::uint64_t x_mask() const noexcept { return x_mask_; }
  std::uint64_t z_mask() const noexcept { return z_mask_; }
  /// True when the operator is not the identity on any wire other than the readout.
  bool touches_data_wires() const noexcept;
  bool is_identity() const noexcept { return x_mask_ == 0 && z_mask_ == 0; }

  /// out = P * in. Both spans have length 2^(n+1) and must not alias.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<PauliOp> ops_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  cplx y_phase_{1.0, 0.0};
};

}  // namespace qnn_forge
