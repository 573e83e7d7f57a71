#include "qnn_forge/side_network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qnn_forge/error.hpp"

namespace qnn_forge {
namespace {

constexpr double kUnitFactorTolerance = 1e-12;

SideInfo forward_impl(const EnvGraph& g, double x0_value, std::span<const double> arc_thetas) {
  const Ordering ord = topological_order(g);
  const std::size_t count = g.vertex_count();
  SideInfo side{std::vector<double>(count, 0.0), std::vector<double>(count, 0.0),
                std::vector<double>(count, 0.0)};

  // Incoming arc lists in arc order, so the summation order is fixed.
  std::vector<std::vector<std::size_t>> in_arcs(count);
  for (std::size_t k = 0; k < g.arcs().size(); ++k) in_arcs[g.arcs()[k].to].push_back(k);

  for (int v : ord.order) {
    if (v == 0) {
      side.V[0] = x0_value;
      continue;
    }
    double w = 0.0;
    for (std::size_t k : in_arcs[v]) w += arc_thetas[k] * side.V[g.arcs()[k].from];
    const Vertex& vx = g.vertex(v);
    side.W[v] = w;
    side.Q[v] = w + vx.bias;
    side.V[v] = vx.label + side.Q[v];
  }
  return side;
}

}  // namespace

double GradientTable::at(int vertex, int parent) const {
  for (const GradientEntry& e : entries) {
    if (e.vertex == vertex && e.parent == parent) return e.value;
  }
  throw UnknownVertexError("no gradient entry for arc " + std::to_string(parent) + "->" +
                           std::to_string(vertex));
}

double GradientTable::max_abs() const noexcept {
  double m = 0.0;
  for (const GradientEntry& e : entries) m = std::max(m, std::abs(e.value));
  return m;
}

SideInfo forward_side(const EnvGraph& g, double x0_value) {
  std::vector<double> arc_thetas;
  arc_thetas.reserve(g.arcs().size());
  for (const Arc& a : g.arcs()) arc_thetas.push_back(a.theta);
  return forward_impl(g, x0_value, arc_thetas);
}

SideInfo forward_side(const EnvGraph& g, double x0_value, std::span<const double> arc_thetas) {
  if (arc_thetas.size() != g.arcs().size()) {
    throw DimensionError("expected " + std::to_string(g.arcs().size()) + " arc parameters, got " +
                         std::to_string(arc_thetas.size()));
  }
  return forward_impl(g, x0_value, arc_thetas);
}

ErrorTable backward_errors(const EnvGraph& g, const SideInfo& side, double delta_L_seed,
                           ErrorRecursion recursion) {
  const Ordering ord = topological_order(g);
  const std::size_t count = g.vertex_count();
  if (side.V.size() != count || side.Q.size() != count || side.W.size() != count) {
    throw DimensionError("side information does not match the graph");
  }
  std::vector<std::vector<std::size_t>> out_arcs(count);
  for (std::size_t k = 0; k < g.arcs().size(); ++k) out_arcs[g.arcs()[k].from].push_back(k);

  ErrorTable errs{std::vector<double>(count, 0.0), std::vector<double>(count, 0.0)};
  const int out = g.output();
  errs.delta[out] = delta_L_seed;
  for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
    const int z = *it;
    if (z == out) continue;
    double sum = 0.0;
    for (std::size_t k : out_arcs[z]) {
      const Arc& a = g.arcs()[k];
      sum += a.theta * errs.delta[a.to];
    }
    errs.delta[z] = recursion == ErrorRecursion::kQScaled && z != 0 ? side.Q[z] * sum : sum;
  }
  for (std::size_t v = 0; v < count; ++v) errs.delta_prime[v] = side.W[v] * errs.delta[v];
  return errs;
}

GateUpdate make_gate_update(const SideInfo& side) {
  return GateUpdate{std::vector<double>(side.W.begin() + 1, side.W.end())};
}

GateUpdateResult update_gates(const EnvGraph& g, const GateUpdate& upd) {
  const int out = g.output();
  if (upd.delta_theta.size() != static_cast<std::size_t>(out)) {
    throw DimensionError("gate update has " + std::to_string(upd.delta_theta.size()) +
                         " entries for " + std::to_string(out) + " unitaries");
  }
  GateUpdateResult result{g.thetas(), {}};
  for (int z = out; z >= 1; --z) {
    const double factor = upd.delta_theta[z - 1];
    if (!std::isfinite(factor)) {
      throw NumericError("non-finite update factor for vertex " + std::to_string(z));
    }
    if (std::abs(factor - 1.0) <= kUnitFactorTolerance) continue;
    if (factor == 0.0) result.annihilated.push_back(z);
    result.thetas[z - 1] = factor * result.thetas[z - 1];
  }
  return result;
}

GradientTable gradient_table(const EnvGraph& g, const SideInfo& side, const ErrorTable& errs) {
  GradientTable table;
  for (const Arc& a : g.arcs()) {
    if (a.to < 2) continue;
    table.entries.push_back({a.to, a.from, errs.delta_prime[a.to] * side.W[a.from]});
  }
  return table;
}

GradientTable arc_sensitivities(const EnvGraph& g, const SideInfo& side, const ErrorTable& errs) {
  GradientTable table;
  for (const Arc& a : g.arcs()) {
    table.entries.push_back({a.to, a.from, errs.delta[a.to] * side.V[a.from]});
  }
  return table;
}

double default_input_scalar(std::span<const int> z) {
  const double sum = std::accumulate(z.begin(), z.end(), 0.0);
  return (sum + 1.0) / static_cast<double>(z.size() + 1);
}

}  // namespace qnn_forge
