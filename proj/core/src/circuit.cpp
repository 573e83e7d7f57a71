#include "qnn_forge/circuit.hpp"

#include <unordered_set>

#include "qnn_forge/error.hpp"

namespace qnn_forge {

Circuit::Circuit(int n, std::vector<Gate> gates) : n_(n), gates_(std::move(gates)) {
  if (n < 0 || n > kMaxWires) throw DimensionError("circuit wire count out of range");
  std::unordered_set<int> seen;
  for (const Gate& g : gates_) {
    if (g.pauli.n() != n) {
      throw DimensionError("gate on vertex " + std::to_string(g.vertex) + " spans " +
                           std::to_string(g.pauli.size()) + " wires, circuit has " +
                           std::to_string(n + 1));
    }
    if (!seen.insert(g.vertex).second) {
      throw InvalidInputError("vertex id " + std::to_string(g.vertex) + " bound to two gates");
    }
  }
}

Circuit reference_ansatz(int n, int layers) {
  if (layers < 1) throw InvalidInputError("ansatz needs at least one layer");
  std::vector<Gate> gates;
  int vertex = 1;
  for (int layer = 0; layer < layers; ++layer) {
    for (int w = 0; w <= n; ++w) {
      gates.push_back({PauliString::single(n, w, PauliOp::X), vertex++});
    }
    for (int w = 0; w < n; ++w) {
      std::vector<PauliOp> ops(static_cast<std::size_t>(n) + 1, PauliOp::I);
      ops[w] = PauliOp::Z;
      ops[w + 1] = PauliOp::Z;
      gates.push_back({PauliString(std::move(ops)), vertex++});
    }
  }
  return Circuit(n, std::move(gates));
}

}  // namespace qnn_forge
