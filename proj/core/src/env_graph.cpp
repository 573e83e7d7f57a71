#include "qnn_forge/env_graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "qnn_forge/error.hpp"

namespace qnn_forge {

EnvGraph::EnvGraph(int n, std::vector<Vertex> vertices, std::vector<Arc> arcs)
    : n_(n), vertices_(std::move(vertices)), arcs_(std::move(arcs)) {
  if (n < 0 || n > kMaxWires) {
    throw InvalidInputError("graph wire count n=" + std::to_string(n) + " outside [0, " +
                            std::to_string(kMaxWires) + "]");
  }
  if (vertices_.empty()) throw InvalidInputError("graph needs the input vertex 0");
  const int count = static_cast<int>(vertices_.size());
  for (int v = 0; v < count; ++v) {
    if (vertices_[v].id != v) {
      throw InvalidInputError("vertex ids must be 0..L in order; found " +
                              std::to_string(vertices_[v].id) + " at position " + std::to_string(v));
    }
    if (v > 0 && vertices_[v].pauli.n() != n) {
      throw DimensionError("vertex " + std::to_string(v) + " has a Pauli string over " +
                           std::to_string(vertices_[v].pauli.size()) + " wires");
    }
  }
  parents_.assign(count, {});
  children_.assign(count, {});
  std::set<std::pair<int, int>> seen;
  for (const Arc& a : arcs_) {
    if (a.from < 0 || a.from >= count) {
      throw UnknownVertexError("arc source " + std::to_string(a.from) + " is not a vertex");
    }
    if (a.to < 0 || a.to >= count) {
      throw UnknownVertexError("arc target " + std::to_string(a.to) + " is not a vertex");
    }
    if (!seen.emplace(a.from, a.to).second) {
      throw InvalidInputError("duplicate arc " + std::to_string(a.from) + "->" +
                              std::to_string(a.to));
    }
    parents_[a.to].push_back(a.from);
    children_[a.from].push_back(a.to);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // All in-arcs of a vertex carry that vertex's gate parameter.
  std::vector<const Arc*> first_in(count, nullptr);
  for (const Arc& a : arcs_) {
    if (first_in[a.to] == nullptr) {
      first_in[a.to] = &a;
    } else if (first_in[a.to]->theta != a.theta) {
      throw InvalidInputError("in-arcs of vertex " + std::to_string(a.to) +
                              " carry different gate parameters");
    }
  }
}

const Vertex& EnvGraph::vertex(int v) const {
  if (v < 0 || v >= static_cast<int>(vertices_.size())) {
    throw UnknownVertexError("unknown vertex id " + std::to_string(v));
  }
  return vertices_[v];
}

const std::vector<int>& EnvGraph::parents(int v) const {
  vertex(v);
  return parents_[v];
}

const std::vector<int>& EnvGraph::children(int v) const {
  vertex(v);
  return children_[v];
}

std::optional<std::size_t> EnvGraph::find_arc(int from, int to) const {
  for (std::size_t k = 0; k < arcs_.size(); ++k) {
    if (arcs_[k].from == from && arcs_[k].to == to) return k;
  }
  return std::nullopt;
}

double EnvGraph::arc_theta(int from, int to) const {
  const auto k = find_arc(from, to);
  if (!k) {
    throw UnknownVertexError("no arc " + std::to_string(from) + "->" + std::to_string(to));
  }
  return arcs_[*k].theta;
}

double EnvGraph::theta(int v) const {
  vertex(v);
  for (const Arc& a : arcs_) {
    if (a.to == v) return a.theta;
  }
  return 0.0;
}

std::vector<double> EnvGraph::thetas() const {
  std::vector<double> out(vertices_.size() - 1, 0.0);
  for (const Arc& a : arcs_) {
    if (a.to > 0) out[a.to - 1] = a.theta;
  }
  return out;
}

EnvGraph EnvGraph::with_thetas(std::span<const double> thetas) const {
  if (thetas.size() != vertices_.size() - 1) {
    throw DimensionError("expected " + std::to_string(vertices_.size() - 1) +
                         " gate parameters, got " + std::to_string(thetas.size()));
  }
  std::vector<Arc> arcs = arcs_;
  for (Arc& a : arcs) {
    if (a.to > 0) a.theta = thetas[a.to - 1];
  }
  return EnvGraph(n_, vertices_, std::move(arcs));
}

EnvGraph EnvGraph::with_biases(std::span<const double> biases) const {
  if (biases.size() != vertices_.size()) throw DimensionError("one bias per vertex required");
  std::vector<Vertex> vs = vertices_;
  for (std::size_t v = 0; v < vs.size(); ++v) vs[v].bias = biases[v];
  return EnvGraph(n_, std::move(vs), arcs_);
}

EnvGraph EnvGraph::with_labels(std::span<const double> labels) const {
  if (labels.size() != vertices_.size()) throw DimensionError("one label per vertex required");
  std::vector<Vertex> vs = vertices_;
  for (std::size_t v = 0; v < vs.size(); ++v) vs[v].label = labels[v];
  return EnvGraph(n_, std::move(vs), arcs_);
}

void EnvGraph::validate() const {
  topological_order(*this);
  if (!parents_[0].empty()) throw InvalidInputError("input vertex 0 must not have in-arcs");
  const int out = output();
  if (!children_[out].empty()) {
    throw InvalidInputError("output vertex " + std::to_string(out) + " must not have out-arcs");
  }
  for (int v = 0; v < out; ++v) {
    if (children_[v].empty()) {
      throw InvalidInputError("vertex " + std::to_string(v) +
                              " is a sink; every maximal path must end at the output vertex");
    }
  }
}

std::vector<std::size_t> Ordering::positions() const {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
  return pos;
}

Ordering topological_order(const EnvGraph& g) {
  const int count = static_cast<int>(g.vertex_count());
  std::vector<int> indegree(count);
  for (int v = 0; v < count; ++v) indegree[v] = static_cast<int>(g.parents(v).size());

  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < count; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  Ordering result;
  result.order.reserve(count);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    result.order.push_back(v);
    for (int c : g.children(v)) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(result.order.size()) == count) return result;

  // Every unsorted vertex still has an unsorted parent, so walking parents
  // inside that set must revisit a vertex, and that vertex is on a cycle.
  int v = 0;
  while (indegree[v] == 0) ++v;
  std::vector<bool> visited(count, false);
  while (!visited[v]) {
    visited[v] = true;
    for (int p : g.parents(v)) {
      if (indegree[p] > 0) {
        v = p;
        break;
      }
    }
  }
  throw NotADagError(v);
}

std::vector<int> parents(const EnvGraph& g, int v) { return g.parents(v); }
std::vector<int> children(const EnvGraph& g, int v) { return g.children(v); }

namespace {

int residual(const EnvGraph& g, const std::vector<bool>& transition_ok,
             const std::vector<bool>& output_ok) {
  const std::size_t count = g.vertex_count();
  for (const auto* mask : {&transition_ok, &output_ok}) {
    if (mask->size() < count) {
      throw InvalidInputError("constraint indicators missing for vertex " +
                              std::to_string(mask->size()));
    }
    if (mask->size() > count) {
      throw UnknownVertexError("constraint indicators given for unknown vertex " +
                               std::to_string(count));
    }
  }
  int sum = 0;
  for (std::size_t v = 0; v < count; ++v) {
    sum += static_cast<int>(transition_ok[v]) + static_cast<int>(output_ok[v]);
  }
  return sum - 2 * static_cast<int>(count);
}

}  // namespace

int constraint_residual_qnn(const EnvGraph& g, const std::vector<bool>& transition_ok,
                            const std::vector<bool>& output_ok) {
  return residual(g, transition_ok, output_ok);
}

int diffusion_residual(const EnvGraph& g, const std::vector<bool>& transition_ok,
                       const std::vector<bool>& output_ok) {
  return residual(g, transition_ok, output_ok);
}

bool is_diffusion_machine(const EnvGraph& g, const std::vector<bool>& transition_ok,
                          const std::vector<bool>& output_ok) {
  return diffusion_residual(g, transition_ok, output_ok) == 0;
}

EnvGraph graph_from_circuit(const Circuit& circuit, std::span<const double> thetas) {
  const std::size_t gate_count = circuit.size();
  if (thetas.size() != gate_count) throw DimensionError("one angle per gate required");
  if (gate_count == 0) throw InvalidInputError("circuit has no gates");

  std::vector<Vertex> vertices(gate_count + 1);
  vertices[0].id = 0;
  std::vector<double> theta_of(gate_count + 1, 0.0);
  for (std::size_t k = 0; k < gate_count; ++k) {
    const int v = circuit[k].vertex;
    if (v < 1 || v > static_cast<int>(gate_count)) {
      throw InvalidInputError("circuit vertex ids must be 1..L; found " + std::to_string(v));
    }
    vertices[v] = Vertex{v, circuit[k].pauli, 0.0, 0.0};
    theta_of[v] = thetas[k];
  }

  const int wires = circuit.n() + 1;
  std::vector<int> last_on_wire(wires, 0);
  std::set<std::pair<int, int>> arc_set;
  for (std::size_t k = 0; k < gate_count; ++k) {
    const Gate& gate = circuit[k];
    bool touched = false;
    for (int w = 0; w < wires; ++w) {
      if (gate.pauli[w] == PauliOp::I) continue;
      touched = true;
      arc_set.emplace(last_on_wire[w], gate.vertex);
      last_on_wire[w] = gate.vertex;
    }
    if (!touched) arc_set.emplace(k == 0 ? 0 : circuit[k - 1].vertex, gate.vertex);
  }
  const int out = circuit[gate_count - 1].vertex;
  if (out != static_cast<int>(gate_count)) {
    throw InvalidInputError("the last gate of the circuit must be bound to vertex L");
  }
  std::vector<bool> has_child(gate_count + 1, false);
  for (const auto& [from, to] : arc_set) has_child[from] = true;
  for (std::size_t k = 0; k + 1 < gate_count; ++k) {
    const int v = circuit[k].vertex;
    if (!has_child[v]) arc_set.emplace(v, out);
  }

  std::vector<Arc> arcs;
  arcs.reserve(arc_set.size());
  for (const auto& [from, to] : arc_set) arcs.push_back({from, to, theta_of[to]});
  return EnvGraph(circuit.n(), std::move(vertices), std::move(arcs));
}

void validate_circuit_order(const Circuit& circuit, const EnvGraph& g) {
  const std::size_t count = g.vertex_count();
  if (circuit.size() + 1 != count) {
    throw InvalidInputError("circuit has " + std::to_string(circuit.size()) +
                            " gates but the graph has " + std::to_string(count - 1) + " unitaries");
  }
  std::vector<std::size_t> position(count, 0);
  std::vector<bool> bound(count, false);
  for (std::size_t k = 0; k < circuit.size(); ++k) {
    const int v = circuit[k].vertex;
    if (v < 1 || v >= static_cast<int>(count) || bound[v]) {
      throw InvalidInputError("circuit vertex " + std::to_string(v) + " is not a fresh unitary id");
    }
    bound[v] = true;
    position[v] = k + 1;
  }
  for (const Arc& a : g.arcs()) {
    if (a.from > 0 && position[a.from] >= position[a.to]) {
      throw InvalidInputError("gate order violates arc " + std::to_string(a.from) + "->" +
                              std::to_string(a.to));
    }
  }
}

Circuit circuit_from_graph(const EnvGraph& g) {
  std::vector<Gate> gates;
  gates.reserve(g.vertex_count() - 1);
  for (int v : topological_order(g).order) {
    if (v != 0) gates.push_back({g.vertex(v).pauli, v});
  }
  return Circuit(g.n(), std::move(gates));
}

std::vector<double> circuit_thetas(const Circuit& circuit, const EnvGraph& g) {
  std::vector<double> out;
  out.reserve(circuit.size());
  for (const Gate& gate : circuit.gates()) out.push_back(g.theta(gate.vertex));
  return out;
}

}  // namespace qnn_forge
