#pragma once

#include <vector>

#include "qnn_forge/pauli.hpp"

namespace qnn_forge {

/// One Pauli rotation exp(-i theta P), bound to a vertex of the environmental graph.
struct Gate {
  PauliString pauli;
  int vertex = 0;
};

/// Ordered gate list. Gate k is applied k-th (first gate acts first on the
/// input). Angles are supplied separately, one per gate, in gate order.
class Circuit {
 public:
  Circuit(int n, std::vector<Gate> gates);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return gates_.size(); }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const Gate& operator[](std::size_t k) const { return gates_[k]; }

 private:
  int n_;
  std::vector<Gate> gates_;
};

/// Reference ansatz over n data wires plus readout: each layer applies an X
/// rotation on every wire, then ZZ rotations on each nearest-neighbour pair
/// (w, w+1). Vertex ids run 1..L in gate order.
Circuit reference_ansatz(int n, int layers);

}  // namespace qnn_forge
