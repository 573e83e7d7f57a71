#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnn_forge/error.hpp"
#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/graph_json.hpp"
#include "qnn_forge/qsim.hpp"

using namespace qnn_forge;

namespace {

std::vector<Vertex> plain_vertices(int count, int n = 1) {
  std::vector<Vertex> vs(count);
  for (int v = 0; v < count; ++v) {
    vs[v].id = v;
    if (v > 0) vs[v].pauli = PauliString::single(n, 0, PauliOp::Z);
  }
  return vs;
}

EnvGraph chain() { return EnvGraph(1, plain_vertices(3), {{0, 1, 0.5}, {1, 2, 0.3}}); }

EnvGraph diamond() {
  return EnvGraph(1, plain_vertices(4), {{0, 1, 0.1}, {0, 2, 0.2}, {1, 3, 0.4}, {2, 3, 0.4}});
}

}  // namespace

TEST(TopologicalOrder, Chain) {
  EXPECT_EQ(topological_order(chain()).order, (std::vector<int>{0, 1, 2}));
}

TEST(TopologicalOrder, DiamondTieBreak) {
  EXPECT_EQ(topological_order(diamond()).order, (std::vector<int>{0, 1, 2, 3}));
}

TEST(TopologicalOrder, TieBreakPrefersLowerId) {
  // 0 -> 2 -> 1 -> 3 and 0 -> 3: only 2 is ready after 0.
  const EnvGraph g(1, plain_vertices(4), {{0, 2, 0.1}, {2, 1, 0.2}, {1, 3, 0.3}, {0, 3, 0.3}});
  EXPECT_EQ(topological_order(g).order, (std::vector<int>{0, 2, 1, 3}));
}

TEST(TopologicalOrder, CycleNamesAVertexOnIt) {
  const EnvGraph g(1, plain_vertices(3), {{0, 1, 0.5}, {1, 2, 0.3}, {2, 1, 0.5}});
  try {
    topological_order(g);
    FAIL() << "cycle not detected";
  } catch (const NotADagError& e) {
    EXPECT_TRUE(e.vertex() == 1 || e.vertex() == 2) << e.vertex();
  }
  EXPECT_THROW(g.validate(), NotADagError);
}

TEST(TopologicalOrder, RandomDagsRespectEveryArc) {
  CounterRng rng(21, Stream::kTestCases);
  for (int trial = 0; trial < 2000; ++trial) {
    const int count = 2 + static_cast<int>(rng.below(63));
    const EnvGraph g = oracle::random_dag(rng, count, 0.15);
    const Ordering o = topological_order(g);
    ASSERT_EQ(o.order.size(), static_cast<std::size_t>(count));
    const std::vector<std::size_t> pos = o.positions();
    for (const Arc& a : g.arcs()) EXPECT_LT(pos[a.from], pos[a.to]);
    EXPECT_EQ(topological_order(g).order, o.order);
    g.validate();
  }
}

TEST(Adjacency, ChainAndDiamond) {
  EXPECT_EQ(parents(chain(), 2), (std::vector<int>{1}));
  EXPECT_TRUE(children(chain(), 2).empty());
  EXPECT_EQ(parents(diamond(), 3), (std::vector<int>{1, 2}));
  EXPECT_EQ(children(diamond(), 0), (std::vector<int>{1, 2}));
  EXPECT_THROW(parents(chain(), 7), UnknownVertexError);
  EXPECT_THROW(children(chain(), -1), UnknownVertexError);
}

TEST(EnvGraph, RejectsMismatchedInArcParameters) {
  EXPECT_THROW(EnvGraph(1, plain_vertices(4), {{0, 1, 0.1}, {0, 2, 0.2}, {1, 3, 0.4}, {2, 3, 0.5}}),
               InvalidInputError);
}

TEST(EnvGraph, RejectsBadArcs) {
  EXPECT_THROW(EnvGraph(1, plain_vertices(3), {{0, 5, 0.1}}), UnknownVertexError);
  EXPECT_THROW(EnvGraph(1, plain_vertices(3), {{0, 1, 0.1}, {0, 1, 0.1}}), InvalidInputError);
}

TEST(EnvGraph, ValidateRequiresUniqueSink) {
  const EnvGraph g(1, plain_vertices(3), {{0, 1, 0.1}, {0, 2, 0.2}});
  EXPECT_THROW(g.validate(), InvalidInputError);
  chain().validate();
}

TEST(EnvGraph, ThetasFollowInArcs) {
  const EnvGraph g = diamond();
  EXPECT_EQ(g.thetas(), (std::vector<double>{0.1, 0.2, 0.4}));
  const EnvGraph h = g.with_thetas(std::vector<double>{1.0, 2.0, 3.0});
  EXPECT_EQ(h.arc_theta(1, 3), 3.0);
  EXPECT_EQ(h.arc_theta(2, 3), 3.0);
  EXPECT_EQ(g.arc_theta(1, 3), 0.4);
}

TEST(Residuals, ConstraintCounts) {
  const EnvGraph g4 = diamond();
  EXPECT_EQ(constraint_residual_qnn(g4, std::vector<bool>(4, true), std::vector<bool>(4, true)), 0);
  std::vector<bool> one_off(4, true);
  one_off[2] = false;
  EXPECT_EQ(constraint_residual_qnn(g4, one_off, std::vector<bool>(4, true)), -1);
  const EnvGraph g3 = chain();
  EXPECT_EQ(constraint_residual_qnn(g3, std::vector<bool>(3, false), std::vector<bool>(3, false)), -6);
  EXPECT_THROW(constraint_residual_qnn(g3, std::vector<bool>(2, true), std::vector<bool>(3, true)),
               InvalidInputError);
}

TEST(Residuals, DiffusionPredicate) {
  const EnvGraph g = diamond();
  EXPECT_EQ(diffusion_residual(g, std::vector<bool>(4, true), std::vector<bool>(4, true)), 0);
  EXPECT_TRUE(is_diffusion_machine(g, std::vector<bool>(4, true), std::vector<bool>(4, true)));
  std::vector<bool> off(4, true);
  off[0] = false;
  EXPECT_FALSE(is_diffusion_machine(g, std::vector<bool>(4, true), off));
  const EnvGraph single(1, plain_vertices(1), {});
  EXPECT_EQ(diffusion_residual(single, {true}, {true}), 0);
}

TEST(Residuals, ZeroExactlyWhenAllHoldExhaustive) {
  for (int count = 1; count <= 10; ++count) {
    std::vector<Arc> arcs;
    for (int v = 1; v < count; ++v) arcs.push_back({v - 1, v, 0.5});
    const EnvGraph g(1, plain_vertices(count), arcs);
    const int bits = 2 * count;
    // Every mask pair for small graphs, a strided sample for the larger ones.
    const std::uint64_t total = std::uint64_t{1} << bits;
    const std::uint64_t step = total > 4096 ? total / 4093 : 1;
    for (std::uint64_t mask = 0; mask < total; mask += step) {
      std::vector<bool> t(count), o(count);
      for (int v = 0; v < count; ++v) {
        t[v] = (mask >> v) & 1;
        o[v] = (mask >> (count + v)) & 1;
      }
      const bool all = mask == total - 1;
      EXPECT_EQ(constraint_residual_qnn(g, t, o) == 0, all);
      EXPECT_EQ(is_diffusion_machine(g, t, o), all);
    }
    std::vector<bool> all_true(count, true);
    EXPECT_EQ(constraint_residual_qnn(g, all_true, all_true), 0);
  }
}

TEST(GraphJson, RoundTripIsExact) {
  CounterRng rng(22, Stream::kTestCases);
  for (int trial = 0; trial < 50; ++trial) {
    const EnvGraph g = random_env_graph(rng, 2 + static_cast<int>(rng.below(8)), 2, 3.0, true);
    const EnvGraph back = parse_graph(dump_graph(g));
    EXPECT_EQ(back.arcs(), g.arcs());
    ASSERT_EQ(back.vertex_count(), g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      EXPECT_EQ(back.vertices()[v].bias, g.vertices()[v].bias);
      EXPECT_EQ(back.vertices()[v].label, g.vertices()[v].label);
      EXPECT_EQ(back.vertices()[v].pauli, g.vertices()[v].pauli);
    }
  }
  EXPECT_THROW(parse_graph("{\"n\": 1}"), InvalidInputError);
  EXPECT_THROW(parse_graph("not json"), InvalidInputError);
}

TEST(CircuitGraph, ReferenceAnsatzRoundTrip) {
  const Circuit c = reference_ansatz(2, 2);
  std::vector<double> thetas(c.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) thetas[k] = 0.1 * static_cast<double>(k + 1);
  const EnvGraph g = graph_from_circuit(c, thetas);
  g.validate();
  validate_circuit_order(c, g);
  EXPECT_EQ(circuit_thetas(c, g), thetas);
  const Circuit back = circuit_from_graph(g);
  ASSERT_EQ(back.size(), c.size());
  validate_circuit_order(back, g);
  // Same unitary: both orders are topological orders of the wire dependencies.
  const std::vector<int> z{1, -1};
  EXPECT_NEAR(predicted_label(back, circuit_thetas(back, g), z, readout_observable(2, PauliOp::X)),
              predicted_label(c, thetas, z, readout_observable(2, PauliOp::X)), 1e-14);
}

TEST(CircuitGraph, OrderViolationIsRejected) {
  const Circuit c = reference_ansatz(1, 1);
  const std::vector<double> thetas(c.size(), 0.2);
  const EnvGraph g = graph_from_circuit(c, thetas);
  std::vector<Gate> reversed(c.gates().rbegin(), c.gates().rend());
  EXPECT_THROW(validate_circuit_order(Circuit(1, reversed), g), InvalidInputError);
}

TEST(Circuit, DuplicateVertexRejected) {
  const PauliString p = PauliString::parse("XZ");
  EXPECT_THROW(Circuit(1, {{p, 1}, {p, 1}}), InvalidInputError);
}
