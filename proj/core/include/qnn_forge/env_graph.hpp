#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnn_forge/circuit.hpp"
#include "qnn_forge/pauli.hpp"

namespace qnn_forge {

/// Directed arc from -> to carrying the gate parameter of `to`.
struct Arc {
  int from = 0;
  int to = 0;
  double theta = 0.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Vertex {
  int id = 0;
  PauliString pauli;   // empty for the input vertex 0
  double bias = 0.0;   // B_i
  double label = 0.0;  // v_i, an identifier-valued offset (default 0)
};

/// Environmental graph. Vertex 0 holds the input |z,1>, vertices 1..L are the
/// unitaries and L is the output unitary. The gate parameter of vertex j sits
/// on every in-arc of j, so all in-arcs of j carry the same value.
///
/// Construction checks ids, arc endpoints, duplicate arcs and the shared
/// in-arc parameter. Acyclicity is established by topological_order(), which
/// every algorithm calls before touching the graph; validate() additionally
/// checks that vertex 0 is a source and L is the only sink.
class EnvGraph {
 public:
  EnvGraph(int n, std::vector<Vertex> vertices, std::vector<Arc> arcs);

  int n() const noexcept { return n_; }
  /// Id of the output vertex, L.
  int output() const noexcept { return static_cast<int>(vertices_.size()) - 1; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const Vertex& vertex(int v) const;

  /// Parent / child ids in ascending order. Throws UnknownVertexError.
  const std::vector<int>& parents(int v) const;
  const std::vector<int>& children(int v) const;

  /// Index into arcs() of from -> to, if present.
  std::optional<std::size_t> find_arc(int from, int to) const;
  double arc_theta(int from, int to) const;

  /// Gate parameter of vertex v (1..L); 0 for a vertex without in-arcs.
  double theta(int v) const;
  /// (theta_1, ..., theta_L).
  std::vector<double> thetas() const;

  EnvGraph with_thetas(std::span<const double> thetas) const;
  EnvGraph with_biases(std::span<const double> biases) const;
  EnvGraph with_labels(std::span<const double> labels) const;

  /// Full structural check: acyclic, vertex 0 has no in-arcs, L is the unique
  /// sink (hence on every maximal path). Throws NotADagError or InvalidInputError.
  void validate() const;

 private:
  int n_;
  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

/// Permutation of vertex ids in which every arc points forward.
struct Ordering {
  std::vector<int> order;

  /// position[v] = index of v in order.
  std::vector<std::size_t> positions() const;
};

/// Kahn's algorithm with ascending-id tie breaking. Throws NotADagError naming
/// a vertex that lies on a cycle.
Ordering topological_order(const EnvGraph& g);

std::vector<int> parents(const EnvGraph& g, int v);
std::vector<int> children(const EnvGraph& g, int v);

/// sum_v (transition_ok_v + output_ok_v) - 2|V|. Zero iff every constraint holds.
/// Each mask is indexed by vertex id and must cover all vertices.
int constraint_residual_qnn(const EnvGraph& g, const std::vector<bool>& transition_ok,
                            const std::vector<bool>& output_ok);

/// Same count for the recurrent network's diffuse constraint.
int diffusion_residual(const EnvGraph& g, const std::vector<bool>& transition_ok,
                       const std::vector<bool>& output_ok);

/// A constraint machine whose diffuse residual vanishes is a diffusion machine.
bool is_diffusion_machine(const EnvGraph& g, const std::vector<bool>& transition_ok,
                          const std::vector<bool>& output_ok);

/// Builds the graph of a circuit: gate k becomes vertex circuit[k].vertex,
/// with an arc from the previous gate touching each of its wires (or from
/// vertex 0 if none). Any sink other than the last gate is wired into it.
/// thetas are in gate order.
EnvGraph graph_from_circuit(const Circuit& circuit, std::span<const double> thetas);

/// Throws InvalidInputError unless the circuit binds vertices 1..L exactly
/// once each and its gate order respects every arc of g.
void validate_circuit_order(const Circuit& circuit, const EnvGraph& g);

/// Circuit whose gates are the unitaries of g in topological order.
Circuit circuit_from_graph(const EnvGraph& g);

/// Gate angles of the circuit read from the graph, in gate order.
std::vector<double> circuit_thetas(const Circuit& circuit, const EnvGraph& g);

}  // namespace qnn_forge
