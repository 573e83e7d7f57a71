#include "qnn_forge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnn_forge/error.hpp"

namespace qnn_forge {
namespace {

constexpr double kShift = std::numbers::pi / 4.0;

// r[z] = dV_target/dQ_z for every vertex z.
std::vector<double> sensitivities_to(const EnvGraph& g, const Ordering& ord, int target) {
  std::vector<double> r(g.vertex_count(), 0.0);
  r[target] = 1.0;
  for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
    const int z = *it;
    if (z == target) continue;
    double sum = 0.0;
    for (int c : g.children(z)) sum += g.arc_theta(z, c) * r[c];
    r[z] = sum;
  }
  return r;
}

}  // namespace

double param_shift_grad(const Circuit& circuit, std::span<const double> thetas,
                        std::span<const int> z, const PauliString& observable, std::size_t i) {
  if (i >= thetas.size() || thetas.size() != circuit.size()) {
    throw IndexError("gate index " + std::to_string(i) + " out of range for " +
                     std::to_string(circuit.size()) + " gates");
  }
  std::vector<double> shifted(thetas.begin(), thetas.end());
  shifted[i] = thetas[i] + kShift;
  const double plus = predicted_label(circuit, shifted, z, observable);
  shifted[i] = thetas[i] - kShift;
  const double minus = predicted_label(circuit, shifted, z, observable);
  return plus - minus;
}

std::vector<double> param_shift_gradient(const Circuit& circuit, std::span<const double> thetas,
                                         std::span<const int> z, const PauliString& observable) {
  std::vector<double> grad(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    grad[i] = param_shift_grad(circuit, thetas, z, observable, i);
  }
  return grad;
}

std::vector<double> loss_gradient(const Circuit& circuit, std::span<const double> thetas,
                                  const LabeledString& item, const PauliString& observable) {
  std::vector<double> grad = param_shift_gradient(circuit, thetas, item.z, observable);
  for (double& gi : grad) gi = -item.label * gi;
  return grad;
}

double finite_diff(const ScalarFunction& f, std::span<const double> x, std::size_t i, double h) {
  if (i >= x.size()) throw IndexError("coordinate index out of range");
  std::vector<double> probe(x.begin(), x.end());
  probe[i] = x[i] + h;
  const double up = f(probe);
  probe[i] = x[i] - h;
  const double down = f(probe);
  if (!std::isfinite(up) || !std::isfinite(down)) {
    throw NumericError("function is not finite near coordinate " + std::to_string(i));
  }
  return (up - down) / (2.0 * h);
}

double HessianTable::at_arcs(int parent_a, int vertex_a, int parent_b, int vertex_b) const {
  std::optional<std::size_t> a, b;
  for (std::size_t k = 0; k < arcs_.size(); ++k) {
    if (arcs_[k].from == parent_a && arcs_[k].to == vertex_a) a = k;
    if (arcs_[k].from == parent_b && arcs_[k].to == vertex_b) b = k;
  }
  if (!a || !b) throw UnknownVertexError("Hessian lookup on an arc that is not in the graph");
  return at(*a, *b);
}

double HessianTable::max_asymmetry() const noexcept {
  double m = 0.0;
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    for (std::size_t b = a + 1; b < arcs_.size(); ++b) m = std::max(m, std::abs(at(a, b) - at(b, a)));
  }
  return m;
}

SecondErrorTable second_error_table(const EnvGraph& g, const SideInfo& side,
                                    ErrorRecursion recursion) {
  const Ordering ord = topological_order(g);
  const ErrorTable errs = backward_errors(g, side, 1.0, recursion);
  const std::size_t count = g.vertex_count();
  const int out = g.output();
  SecondErrorTable d2(count);

  for (int l = 0; l < static_cast<int>(count); ++l) {
    // dQ_z/dQ_l, propagated forward from l. Q_0 is an input and never moves.
    std::vector<double> dq(count, 0.0);
    if (l != 0) {
      dq[l] = 1.0;
      for (int z : ord.order) {
        if (z == l || z == 0) continue;
        double sum = 0.0;
        for (int h : g.parents(z)) sum += g.arc_theta(h, z) * dq[h];
        dq[z] = sum;
      }
    }
    std::vector<double> dd(count, 0.0);  // d delta_z / dQ_l
    for (auto it = ord.order.rbegin(); it != ord.order.rend(); ++it) {
      const int z = *it;
      if (z == out) continue;
      double s = 0.0;
      double sd = 0.0;
      for (int c : g.children(z)) {
        const double th = g.arc_theta(z, c);
        s += th * errs.delta[c];
        sd += th * dd[c];
      }
      if (recursion == ErrorRecursion::kQScaled && z != 0) {
        dd[z] = dq[z] * s + side.Q[z] * sd;
      } else {
        dd[z] = sd;
      }
    }
    for (int i = 0; i < static_cast<int>(count); ++i) d2.set(l, i, dd[i]);
  }
  return d2;
}

HessianTable hessian_closed_form(const EnvGraph& g, const SideInfo& side, const SurrogateLoss& loss) {
  const Ordering ord = topological_order(g);
  const std::vector<std::size_t> pos = ord.positions();
  const std::size_t count = g.vertex_count();
  if (side.V.size() != count) throw DimensionError("side information does not match the graph");

  // rho[m][i] = dV_m / dQ_i.
  std::vector<std::vector<double>> rho(count);
  for (int m = 0; m < static_cast<int>(count); ++m) rho[m] = sensitivities_to(g, ord, m);
  const SecondErrorTable d2 = second_error_table(g, side, ErrorRecursion::kConsistent);

  const std::vector<int> outputs{g.output()};
  const std::vector<double>& V = side.V;
  HessianTable table(g.arcs());
  for (std::size_t a = 0; a < g.arcs().size(); ++a) {
    const int j = g.arcs()[a].from;
    const int i = g.arcs()[a].to;
    for (std::size_t b = 0; b < g.arcs().size(); ++b) {
      const int m = g.arcs()[b].from;
      const int l = g.arcs()[b].to;
      double h = 0.0;
      for (int y : outputs) {
        for (int zo : outputs) {
          const double l2 = y == zo ? loss.second(V[y]) : 0.0;
          h += l2 * rho[zo][i] * rho[y][l] * V[j] * V[m];
        }
      }
      for (int y : outputs) {
        double inner = d2.at(l, i) * V[m] * V[j];
        if (pos[i] <= pos[m]) inner += rho[m][i] * rho[y][l] * V[j];
        if (pos[l] <= pos[j]) inner += rho[j][l] * rho[y][i] * V[m];
        h += loss.first(V[y]) * inner;
      }
      table.set(a, b, h);
    }
  }
  return table;
}

HessianTable hessian_finite_difference(const EnvGraph& g, double x0_value,
                                       const SurrogateLoss& loss, double h) {
  const int out = g.output();
  std::vector<double> base;
  for (const Arc& arc : g.arcs()) base.push_back(arc.theta);
  auto f = [&](const std::vector<double>& t) {
    return loss.value(forward_side(g, x0_value, t).V[out]);
  };
  HessianTable table(g.arcs());
  const double f0 = f(base);
  for (std::size_t a = 0; a < base.size(); ++a) {
    std::vector<double> t = base;
    t[a] = base[a] + h;
    const double up = f(t);
    t[a] = base[a] - h;
    const double down = f(t);
    table.set(a, a, (up - 2.0 * f0 + down) / (h * h));
    for (std::size_t b = a + 1; b < base.size(); ++b) {
      auto eval = [&](double sa, double sb) {
        std::vector<double> tt = base;
        tt[a] += sa;
        tt[b] += sb;
        return f(tt);
      };
      const double v = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
      table.set(a, b, v);
      table.set(b, a, v);
    }
  }
  return table;
}

SparsityReport second_error_sparsity(const EnvGraph& g, const SecondErrorTable& d2,
                                     double tolerance) {
  SparsityReport report;
  const int count = static_cast<int>(d2.vertex_count());
  if (count != static_cast<int>(g.vertex_count())) {
    throw DimensionError("second-error table does not match the graph");
  }
  for (int l = 0; l < count; ++l) {
    for (int i = 0; i < count; ++i) {
      if (std::abs(d2.at(l, i)) <= tolerance) continue;
      if (g.find_arc(i, l) || g.find_arc(l, i)) continue;
      report.ok = false;
      report.violations.emplace_back(l, i);
    }
  }
  return report;
}

Circuit random_circuit(CounterRng& rng, int n, int gates) {
  std::vector<Gate> out;
  for (int k = 0; k < gates; ++k) {
    std::vector<PauliOp> ops(static_cast<std::size_t>(n) + 1);
    bool nontrivial = false;
    while (!nontrivial) {
      for (auto& op : ops) {
        op = static_cast<PauliOp>(rng.below(4));
        nontrivial = nontrivial || op != PauliOp::I;
      }
    }
    out.push_back({PauliString(std::move(ops)), k + 1});
  }
  return Circuit(n, std::move(out));
}

EnvGraph random_env_graph(CounterRng& rng, int vertex_count, int n, double theta_range,
                          bool random_bias_and_labels) {
  if (vertex_count < 2) throw InvalidInputError("random graph needs at least two vertices");
  const int out = vertex_count - 1;
  std::vector<Vertex> vertices(vertex_count);
  for (int v = 0; v < vertex_count; ++v) {
    vertices[v].id = v;
    if (v > 0) {
      vertices[v].pauli = PauliString::single(n, static_cast<int>(rng.below(n + 1)), PauliOp::Z);
    }
    if (random_bias_and_labels && v > 0) {
      vertices[v].bias = rng.uniform(-1.0, 1.0);
      vertices[v].label = rng.uniform(-1.0, 1.0);
    }
  }
  std::vector<double> theta(vertex_count, 0.0);
  for (int v = 1; v < vertex_count; ++v) theta[v] = rng.uniform(-theta_range, theta_range);

  std::vector<std::vector<bool>> adj(vertex_count, std::vector<bool>(vertex_count, false));
  for (int v = 1; v < vertex_count; ++v) {
    bool any = false;
    for (int u = 0; u < v; ++u) {
      if (rng.uniform() < 0.4) {
        adj[u][v] = true;
        any = true;
      }
    }
    if (!any) adj[rng.below(v)][v] = true;
  }
  for (int u = 0; u < out; ++u) {
    bool has_child = false;
    for (int v = u + 1; v < vertex_count; ++v) has_child = has_child || adj[u][v];
    if (!has_child) adj[u][out] = true;
  }
  std::vector<Arc> arcs;
  for (int u = 0; u < vertex_count; ++u) {
    for (int v = 0; v < vertex_count; ++v) {
      if (adj[u][v]) arcs.push_back({u, v, theta[v]});
    }
  }
  return EnvGraph(n, std::move(vertices), std::move(arcs));
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  GradcheckReport report;
  CounterRng rng(options.seed, Stream::kTestCases);
  for (int c = 0; c < options.cases; ++c) {
    const int n = 1 + static_cast<int>(rng.below(options.max_n));
    const int gates = 1 + static_cast<int>(rng.below(options.max_gates));
    const Circuit circuit = random_circuit(rng, n, gates);
    std::vector<double> thetas(gates);
    for (double& t : thetas) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    std::vector<int> z(n);
    for (int& zi : z) zi = rng.below(2) == 0 ? 1 : -1;
    const PauliString obs = readout_observable(n, PauliOp::Z);
    const ScalarFunction f = [&](std::span<const double> t) {
      return predicted_label(circuit, t, z, obs);
    };
    for (int i = 0; i < gates; ++i) {
      const double shift = param_shift_grad(circuit, thetas, z, obs, i);
      const double fd = finite_diff(f, thetas, i, 1e-5);
      report.max_grad_dev = std::max(report.max_grad_dev, std::abs(shift - fd));
    }

    const int vertices = 2 + static_cast<int>(rng.below(options.max_vertices - 1));
    const EnvGraph g = random_env_graph(rng, vertices, 1, 1.0, true);
    const double x0 = rng.uniform(-1.0, 1.0);
    const SurrogateLoss surrogate{rng.uniform(-1.0, 1.0)};
    const SideInfo side = forward_side(g, x0);
    const HessianTable closed = hessian_closed_form(g, side, surrogate);
    const HessianTable fd = hessian_finite_difference(g, x0, surrogate);
    for (std::size_t a = 0; a < closed.size(); ++a) {
      for (std::size_t b = 0; b < closed.size(); ++b) {
        const double dev = std::abs(closed.at(a, b) - fd.at(a, b)) / std::max(1.0, std::abs(fd.at(a, b)));
        report.max_hess_dev = std::max(report.max_hess_dev, dev);
      }
    }
    report.sparsity_ok =
        report.sparsity_ok && second_error_sparsity(g, second_error_table(g, side)).ok;
    ++report.cases;
  }
  return report;
}

}  // namespace qnn_forge
