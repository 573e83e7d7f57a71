#pragma once

#include <span>
#include <vector>

#include "qnn_forge/env_graph.hpp"

namespace qnn_forge {

// Classical side information carried along the environmental graph.
//
// Per-vertex quantities (V, Q, W, delta) are indexed by vertex id and have
// length L+1. Gate-parameter vectors (thetas, delta_theta) have length L with
// entry k belonging to vertex k+1.

/// Forward pass values. Q_i = sum_{h in parents(i)} theta_hi V_h + B_i,
/// W_i = Q_i - B_i, V_i = v_i + Q_i; for the input vertex V_0 = x0, Q_0 = W_0 = 0.
struct SideInfo {
  std::vector<double> V;
  std::vector<double> Q;
  std::vector<double> W;
};

/// Backward errors. delta_prime_i = delta_theta_i * delta_i with delta_theta_i = W_i.
struct ErrorTable {
  std::vector<double> delta;
  std::vector<double> delta_prime;
};

struct GateUpdate {
  std::vector<double> delta_theta;
};

struct GradientEntry {
  int vertex = 0;  // i
  int parent = 0;  // j, a parent of i
  double value = 0.0;

  friend bool operator==(const GradientEntry&, const GradientEntry&) = default;
};

/// g_{ij} = delta'_i W_j for every arc j -> i with i >= 2, in arc order.
struct GradientTable {
  std::vector<GradientEntry> entries;

  double at(int vertex, int parent) const;
  double max_abs() const noexcept;
};

enum class ErrorRecursion {
  /// delta_z = sum_{c in children(z)} theta_zc delta_c.
  kConsistent,
  /// delta_z = Q_z * sum_{c in children(z)} theta_zc delta_c (kept for comparison only).
  kQScaled,
};

SideInfo forward_side(const EnvGraph& g, double x0_value);

/// Forward pass with an independent parameter per arc (arc_thetas[k] replaces
/// g.arcs()[k].theta). Used to differentiate with respect to single arcs.
SideInfo forward_side(const EnvGraph& g, double x0_value, std::span<const double> arc_thetas);

/// Seeds delta_L and recurses in reverse topological order. In the classical
/// chain mode (seed 1, consistent recursion) delta_i = dV_L/dQ_i exactly.
/// Entry 0 is the sensitivity to the input scalar V_0.
ErrorTable backward_errors(const EnvGraph& g, const SideInfo& side, double delta_L_seed,
                           ErrorRecursion recursion = ErrorRecursion::kConsistent);

/// delta_theta_i = W_i for i = 1..L.
GateUpdate make_gate_update(const SideInfo& side);

struct GateUpdateResult {
  std::vector<double> thetas;
  /// Vertices whose update factor was exactly 0, zeroing their parameter.
  std::vector<int> annihilated;
};

/// For z = L..1: keep theta_z when |delta_theta_z - 1| <= 1e-12, otherwise
/// multiply it by delta_theta_z. Throws NumericError on a non-finite factor.
GateUpdateResult update_gates(const EnvGraph& g, const GateUpdate& upd);

GradientTable gradient_table(const EnvGraph& g, const SideInfo& side, const ErrorTable& errs);

/// delta_i * V_j for every arc j -> i: the exact derivative of V_L with respect
/// to that arc's parameter in the classical chain mode.
GradientTable arc_sensitivities(const EnvGraph& g, const SideInfo& side, const ErrorTable& errs);

/// Input scalar derived from the data: (sum_i z_i + 1) / (n + 1).
double default_input_scalar(std::span<const int> z);

}  // namespace qnn_forge
