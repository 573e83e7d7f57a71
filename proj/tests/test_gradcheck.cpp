#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnn_forge/error.hpp"
#include "qnn_forge/gradcheck.hpp"

using namespace qnn_forge;
using std::numbers::pi;

TEST(ParamShift, ReadoutRotationClosedForm) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{pi / 8};
  // ltilde = -cos(2 theta), so the derivative is 2 sin(2 theta) = sqrt(2).
  EXPECT_NEAR(param_shift_grad(c, theta, std::vector<int>{}, readout_observable(0), 0),
              1.4142135623730951, 1e-14);
}

TEST(ParamShift, StationaryAtExtremum) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  for (double t : {0.0, pi / 2, -pi / 2}) {
    const std::vector<double> theta{t};
    EXPECT_NEAR(param_shift_grad(c, theta, std::vector<int>{}, readout_observable(0), 0), 0.0, 1e-10);
  }
}

TEST(ParamShift, IndexOutOfRange) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{0.1};
  EXPECT_THROW(param_shift_grad(c, theta, std::vector<int>{}, readout_observable(0), 1), IndexError);
}

TEST(ParamShift, AgreesWithFiniteDifference) {
  CounterRng rng(41, Stream::kTestCases);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int gates = 1 + static_cast<int>(rng.below(8));
    const Circuit c = random_circuit(rng, n, gates);
    std::vector<double> thetas(gates);
    for (double& t : thetas) t = rng.uniform(-pi, pi);
    std::vector<int> z(n);
    for (int& zi : z) zi = rng.below(2) ? 1 : -1;
    const PauliString obs = readout_observable(n);
    const std::vector<double> shift = param_shift_gradient(c, thetas, z, obs);
    for (int i = 0; i < gates; ++i) {
      auto f = [&](double x) {
        std::vector<double> t = thetas;
        t[i] = x;
        return predicted_label(c, t, z, obs);
      };
      worst = std::max(worst, std::abs(shift[i] - oracle::central(f, thetas[i], 1e-5)));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ParamShift, LossGradientSign) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{0.3};
  const PauliString obs = readout_observable(0);
  const double dl = param_shift_grad(c, theta, std::vector<int>{}, obs, 0);
  EXPECT_EQ(loss_gradient(c, theta, {{}, 1}, obs)[0], -dl);
  EXPECT_EQ(loss_gradient(c, theta, {{}, -1}, obs)[0], dl);
}

TEST(FiniteDiff, Basics) {
  const std::vector<double> x{0.0, 2.0};
  const ScalarFunction quad = [](std::span<const double> v) { return 3.0 * v[1] * v[1] + v[0]; };
  EXPECT_NEAR(finite_diff(quad, x, 1), 12.0, 1e-8);
  const ScalarFunction constant = [](std::span<const double>) { return 4.0; };
  EXPECT_EQ(finite_diff(constant, x, 0), 0.0);
  const ScalarFunction sine = [](std::span<const double> v) { return std::sin(v[0]); };
  EXPECT_NEAR(finite_diff(sine, x, 0), 1.0, 1e-10);
  const ScalarFunction bad = [](std::span<const double> v) { return v[0] > 0 ? INFINITY : 0.0; };
  EXPECT_THROW(finite_diff(bad, x, 0), NumericError);
}

namespace {

std::vector<Vertex> plain_vertices(int count) {
  std::vector<Vertex> vs(count);
  for (int v = 0; v < count; ++v) {
    vs[v].id = v;
    if (v > 0) vs[v].pauli = PauliString::single(1, 0, PauliOp::Z);
  }
  return vs;
}

}  // namespace

TEST(Hessian, ChainMixedEntry) {
  // V_2 = b a x0 with x0 = 1, so L = (ab)^2 / 2 and d2L/da db = 2ab.
  const double a = 0.5, b = 0.3;
  const EnvGraph g(1, plain_vertices(3), {{0, 1, a}, {1, 2, b}});
  const SurrogateLoss loss{0.0};
  const HessianTable closed = hessian_closed_form(g, forward_side(g, 1.0), loss);
  const HessianTable fd = hessian_finite_difference(g, 1.0, loss);
  EXPECT_NEAR(closed.at_arcs(0, 1, 1, 2), 0.3, 1e-14);
  EXPECT_NEAR(fd.at_arcs(0, 1, 1, 2), 0.3, 1e-6);
  EXPECT_NEAR(closed.at_arcs(0, 1, 0, 1), b * b, 1e-14);
}

TEST(Hessian, GaussNewtonAtZeroResidual) {
  CounterRng rng(42, Stream::kTestCases);
  const EnvGraph g = random_env_graph(rng, 5, 1, 1.0, true);
  const SideInfo s = forward_side(g, 0.8);
  const HessianTable closed = hessian_closed_form(g, s, SurrogateLoss{s.V[g.output()]});
  const ErrorTable e = backward_errors(g, s, 1.0);
  for (std::size_t p = 0; p < closed.size(); ++p) {
    for (std::size_t q = 0; q < closed.size(); ++q) {
      const Arc& x = closed.arcs()[p];
      const Arc& y = closed.arcs()[q];
      EXPECT_NEAR(closed.at(p, q), e.delta[x.to] * e.delta[y.to] * s.V[x.from] * s.V[y.from], 1e-14);
    }
  }
}

TEST(Hessian, SymmetricAndMatchesFiniteDifference) {
  CounterRng rng(43, Stream::kTestCases);
  double worst = 0.0, asym = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const EnvGraph g = random_env_graph(rng, 2 + static_cast<int>(rng.below(5)), 1, 1.0, true);
    const double x0 = rng.uniform(-1.0, 1.0);
    const SurrogateLoss loss{rng.uniform(-1.0, 1.0)};
    const HessianTable closed = hessian_closed_form(g, forward_side(g, x0), loss);
    const HessianTable fd = hessian_finite_difference(g, x0, loss);
    asym = std::max(asym, closed.max_asymmetry());
    for (std::size_t p = 0; p < closed.size(); ++p) {
      for (std::size_t q = 0; q < closed.size(); ++q) {
        worst = std::max(worst, std::abs(closed.at(p, q) - fd.at(p, q)) /
                                    std::max(1.0, std::abs(fd.at(p, q))));
      }
    }
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_LE(asym, 1e-10);
}

TEST(Sparsity, LinearNetworkHasNoSecondErrors) {
  CounterRng rng(44, Stream::kTestCases);
  for (int trial = 0; trial < 50; ++trial) {
    const EnvGraph g = random_env_graph(rng, 2 + static_cast<int>(rng.below(7)), 1, 1.0, true);
    const double x0 = rng.uniform(-1.0, 1.0);
    const SideInfo s = forward_side(g, x0);
    const SecondErrorTable d2 = second_error_table(g, s);
    const ErrorTable e = backward_errors(g, s, 1.0);
    for (int l = 0; l <= g.output(); ++l) {
      // delta_i does not move when Q_l is perturbed through B_l.
      std::vector<double> biases(g.vertex_count());
      for (std::size_t v = 0; v < g.vertex_count(); ++v) biases[v] = g.vertices()[v].bias;
      biases[l] += 1e-3;
      const EnvGraph shifted = g.with_biases(biases);
      const ErrorTable e2 = backward_errors(shifted, forward_side(shifted, x0), 1.0);
      for (int i = 0; i <= g.output(); ++i) {
        EXPECT_EQ(d2.at(l, i), 0.0);
        EXPECT_NEAR(e2.delta[i], e.delta[i], 1e-15);
      }
    }
    EXPECT_TRUE(second_error_sparsity(g, d2).ok);
  }
}

TEST(Sparsity, InjectedViolationIsReported) {
  const EnvGraph g(1, plain_vertices(3), {{0, 1, 0.5}, {1, 2, 0.3}});
  SecondErrorTable d2(3);
  d2.set(1, 2, 0.25);  // arc 1 -> 2 exists
  EXPECT_TRUE(second_error_sparsity(g, d2).ok);
  d2.set(0, 2, 0.5);  // no arc between 0 and 2
  const SparsityReport r = second_error_sparsity(g, d2);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (std::pair<int, int>{0, 2}));
}

TEST(Sparsity, EmptyGraphPasses) {
  const EnvGraph g(0, {Vertex{}}, {});
  EXPECT_TRUE(second_error_sparsity(g, SecondErrorTable(1)).ok);
}

TEST(RunGradcheck, ReportWithinBudget) {
  GradcheckOptions o;
  o.cases = 30;
  o.seed = 9;
  const GradcheckReport r = run_gradcheck(o);
  EXPECT_EQ(r.cases, 30);
  EXPECT_LE(r.max_grad_dev, 1e-6);
  EXPECT_LE(r.max_hess_dev, 1e-6);
  EXPECT_TRUE(r.sparsity_ok);
}
