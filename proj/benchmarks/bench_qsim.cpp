#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/qsim.hpp"
#include "qnn_forge/rng.hpp"

using namespace qnn_forge;

namespace {

std::vector<int> alternating(int n) {
  std::vector<int> z(n);
  for (int i = 0; i < n; ++i) z[i] = i % 2 ? -1 : 1;
  return z;
}

void BM_Rotation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StateVector psi = basis_state(alternating(n));
  const PauliString p = PauliString::parse(std::string(n, 'X') + "Y");
  for (auto _ : state) benchmark::DoNotOptimize(apply_pauli_rotation(psi, p, 0.3));
  state.SetComplexityN(std::int64_t{1} << (n + 1));
}
BENCHMARK(BM_Rotation)->DenseRange(2, 12, 2)->Complexity(benchmark::oN);

void BM_PredictedLabel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Circuit c = reference_ansatz(n, 2);
  std::vector<double> thetas(c.size(), 0.1);
  const std::vector<int> z = alternating(n);
  const PauliString obs = readout_observable(n, PauliOp::X);
  for (auto _ : state) benchmark::DoNotOptimize(predicted_label(c, thetas, z, obs));
}
BENCHMARK(BM_PredictedLabel)->DenseRange(2, 10, 2);

void BM_ParamShiftGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Circuit c = reference_ansatz(n, 2);
  std::vector<double> thetas(c.size(), 0.1);
  const std::vector<int> z = alternating(n);
  const PauliString obs = readout_observable(n, PauliOp::X);
  for (auto _ : state) benchmark::DoNotOptimize(param_shift_gradient(c, thetas, z, obs));
}
BENCHMARK(BM_ParamShiftGradient)->DenseRange(2, 8, 2);

void BM_ClosedFormHessian(benchmark::State& state) {
  CounterRng rng(1, Stream::kTestCases);
  const EnvGraph g = random_env_graph(rng, static_cast<int>(state.range(0)), 1, 1.0, true);
  const SideInfo side = forward_side(g, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(hessian_closed_form(g, side, SurrogateLoss{0.0}));
}
BENCHMARK(BM_ClosedFormHessian)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
