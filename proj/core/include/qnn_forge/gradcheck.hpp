#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qnn_forge/circuit.hpp"
#include "qnn_forge/env_graph.hpp"
#include "qnn_forge/qsim.hpp"
#include "qnn_forge/rng.hpp"
#include "qnn_forge/side_network.hpp"

namespace qnn_forge {

// ---------------------------------------------------------------------------
// Gradients of the quantum loss
// ---------------------------------------------------------------------------

/// d ltilde / d theta_i = ltilde(theta_i + pi/4) - ltilde(theta_i - pi/4).
/// Exact because every generator squares to the identity.
double param_shift_grad(const Circuit& circuit, std::span<const double> thetas,
                        std::span<const int> z, const PauliString& observable, std::size_t i);

/// All components of d ltilde / d theta.
std::vector<double> param_shift_gradient(const Circuit& circuit, std::span<const double> thetas,
                                         std::span<const int> z, const PauliString& observable);

/// d L / d theta = -label * d ltilde / d theta for L = 1 - label * ltilde.
std::vector<double> loss_gradient(const Circuit& circuit, std::span<const double> thetas,
                                  const LabeledString& item, const PauliString& observable);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central difference (f(x + h e_i) - f(x - h e_i)) / 2h. Throws NumericError
/// if either evaluation is not finite.
double finite_diff(const ScalarFunction& f, std::span<const double> x, std::size_t i,
                   double h = 1e-5);

// ---------------------------------------------------------------------------
// Closed-form Hessian of the side network
// ---------------------------------------------------------------------------

/// L(V_L) = (V_L - target)^2 / 2 on the side network output.
struct SurrogateLoss {
  double target = 0.0;

  double value(double v) const noexcept { return 0.5 * (v - target) * (v - target); }
  double first(double v) const noexcept { return v - target; }
  double second(double) const noexcept { return 1.0; }
};

/// d2[l][i] = d delta_i / d Q_l, dense over vertex ids.
class SecondErrorTable {
 public:
  explicit SecondErrorTable(std::size_t vertex_count = 0)
      : count_(vertex_count), values_(vertex_count * vertex_count, 0.0) {}

  std::size_t vertex_count() const noexcept { return count_; }
  double at(int l, int i) const { return values_.at(index(l, i)); }
  void set(int l, int i, double value) { values_.at(index(l, i)) = value; }

 private:
  std::size_t index(int l, int i) const {
    return static_cast<std::size_t>(l) * count_ + static_cast<std::size_t>(i);
  }

  std::size_t count_;
  std::vector<double> values_;
};

/// Second derivatives over pairs of arc parameters, indexed by arc position in
/// the graph. Arc (j -> i) carries parameter theta_ij.
class HessianTable {
 public:
  HessianTable() = default;
  explicit HessianTable(std::vector<Arc> arcs)
      : arcs_(std::move(arcs)), values_(arcs_.size() * arcs_.size(), 0.0) {}

  std::size_t size() const noexcept { return arcs_.size(); }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  double at(std::size_t a, std::size_t b) const { return values_.at(a * arcs_.size() + b); }
  void set(std::size_t a, std::size_t b, double v) { values_.at(a * arcs_.size() + b) = v; }
  /// Entry for arcs (parent_a -> vertex_a), (parent_b -> vertex_b).
  double at_arcs(int parent_a, int vertex_a, int parent_b, int vertex_b) const;
  double max_asymmetry() const noexcept;

 private:
  std::vector<Arc> arcs_;
  std::vector<double> values_;
};

/// d delta_i / d Q_l for every vertex pair under the given error recursion.
/// With the consistent recursion the side network is linear, so every entry is 0.
SecondErrorTable second_error_table(const EnvGraph& g, const SideInfo& side,
                                    ErrorRecursion recursion = ErrorRecursion::kConsistent);

/// Closed-form Hessian of the surrogate loss with respect to arc parameters:
///
///   h(ji, ml) = sum_{Y,Z} L''_{YZ} d^Z_i d^Y_l V_j V_m
///             + sum_Y L'_Y [ d2^Y(l,i) V_m V_j + [i <= m] r(i,m) d^Y_l V_j
///                                             + [l <= j] r(l,j) d^Y_i V_m ]
///
/// where d^Y_i = dV_Y/dQ_i, r(i,m) = dV_m/dQ_i and [a <= b] is the topological
/// ordering indicator. The output set is {L}.
HessianTable hessian_closed_form(const EnvGraph& g, const SideInfo& side, const SurrogateLoss& loss);

/// Finite-difference Hessian of the surrogate loss over arc parameters. The
/// loss is quadratic in each single arc parameter, so the stencils are exact
/// up to rounding for any h.
HessianTable hessian_finite_difference(const EnvGraph& g, double x0_value,
                                       const SurrogateLoss& loss, double h = 1e-3);

struct SparsityReport {
  bool ok = true;
  /// (l, i) pairs with a nonzero entry but no arc between l and i.
  std::vector<std::pair<int, int>> violations;
};

/// Checks that d2(l, i) vanishes whenever l and i are not joined by an arc.
SparsityReport second_error_sparsity(const EnvGraph& g, const SecondErrorTable& d2,
                                     double tolerance = 0.0);

// ---------------------------------------------------------------------------
// Random instances and the combined report used by the CLI
// ---------------------------------------------------------------------------

/// Random non-identity Pauli rotations on n data wires plus readout.
Circuit random_circuit(CounterRng& rng, int n, int gates);

/// Random environmental graph with `vertex_count` vertices (>= 2) that passes
/// EnvGraph::validate(). Gate parameters are uniform in [-theta_range, theta_range].
EnvGraph random_env_graph(CounterRng& rng, int vertex_count, int n, double theta_range,
                          bool random_bias_and_labels = false);

struct GradcheckOptions {
  int cases = 100;
  std::uint64_t seed = 0;
  int max_n = 4;
  int max_gates = 8;
  int max_vertices = 6;
};

struct GradcheckReport {
  double max_grad_dev = 0.0;
  double max_hess_dev = 0.0;
  bool sparsity_ok = true;
  int cases = 0;
};

GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace qnn_forge
