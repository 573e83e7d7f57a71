#include "qnn_forge/qnn_train.hpp"

#include <algorithm>
#include <cmath>

#include "qnn_forge/error.hpp"
#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/parallel.hpp"
#include "qnn_forge/rng.hpp"

namespace qnn_forge {
namespace {

struct ExampleResult {
  double loss = 0.0;
  std::vector<double> quantum_grad;  // vertex order
  std::vector<double> delta;
  std::vector<double> W;
  std::vector<double> grad;  // gradient table values in entry order
  std::vector<GradientEntry> entries;
};

std::vector<double> gate_order(const Circuit& circuit, std::span<const double> by_vertex) {
  std::vector<double> out;
  out.reserve(circuit.size());
  for (const Gate& gate : circuit.gates()) out.push_back(by_vertex[gate.vertex - 1]);
  return out;
}

std::uint64_t shot_seed(std::uint64_t seed, int round, std::size_t example) {
  CounterRng rng = CounterRng(seed, Stream::kShots).split((static_cast<std::uint64_t>(round) << 32) ^ example);
  return rng();
}

double example_ltilde(const Circuit& circuit, std::span<const double> gate_thetas,
                      const LabeledString& item, const PauliString& obs,
                      const QnnTrainConfig& config, int round, std::size_t index) {
  if (config.shots == 0) return predicted_label(circuit, gate_thetas, item.z, obs);
  return sample_label(circuit, gate_thetas, item.z, obs, config.shots,
                      shot_seed(config.seed, round, index));
}

double round_loss(const EnvGraph& g, const Circuit& circuit, std::span<const double> thetas,
                  std::span<const LabeledString> data, const QnnTrainConfig& config, int round) {
  const PauliString obs = readout_observable(g.n(), config.observable);
  const std::vector<double> gate_thetas = gate_order(circuit, thetas);
  std::vector<double> losses(data.size());
  parallel_for(data.size(), [&](std::size_t e) {
    losses[e] = loss(data[e].label, example_ltilde(circuit, gate_thetas, data[e], obs, config, round, e));
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(data.size());
}

}  // namespace

double mean_loss(const EnvGraph& g, std::span<const double> thetas,
                 std::span<const LabeledString> data, PauliOp observable) {
  QnnTrainConfig config;
  config.observable = observable;
  return round_loss(g, circuit_from_graph(g), thetas, data, config, 0);
}

QnnReport train_qnn(const EnvGraph& g, std::span<const LabeledString> data,
                    const QnnTrainConfig& config) {
  if (config.rounds < 1) throw InvalidInputError("rounds must be at least 1");
  if (data.empty()) throw InvalidInputError("dataset is empty");
  g.validate();
  for (const LabeledString& item : data) {
    item.validate();
    if (static_cast<int>(item.z.size()) != g.n()) {
      throw DimensionError("dataset strings must have length n=" + std::to_string(g.n()));
    }
  }

  const Circuit circuit = circuit_from_graph(g);
  const PauliString obs = readout_observable(g.n(), config.observable);
  const std::size_t unitaries = g.vertex_count() - 1;
  const int out = g.output();

  QnnReport report;
  report.notes.push_back(
      "quantum-coupled seeding: delta_L = dL/dtheta_L from parameter shifts on the quantum loss; "
      "Q_L does not enter the quantum state, so the loss reaches the side network through the "
      "shared gate parameter theta_L");
  if (config.recursion == ErrorRecursion::kQScaled) {
    report.notes.push_back("Q-scaled error recursion: delta_z carries an extra Q_z factor");
  }

  std::vector<double> theta = g.thetas();
  for (int r = 1; r <= config.rounds; ++r) {
    const EnvGraph gr = g.with_thetas(theta);
    const std::vector<double> gate_thetas = gate_order(circuit, theta);

    std::vector<ExampleResult> results(data.size());
    parallel_for(data.size(), [&](std::size_t e) {
      const LabeledString& item = data[e];
      ExampleResult& res = results[e];
      res.loss = loss(item.label, example_ltilde(circuit, gate_thetas, item, obs, config, r, e));

      const std::vector<double> by_gate = loss_gradient(circuit, gate_thetas, item, obs);
      res.quantum_grad.assign(unitaries, 0.0);
      for (std::size_t k = 0; k < circuit.size(); ++k) {
        res.quantum_grad[circuit[k].vertex - 1] = by_gate[k];
      }
      const double x0 = config.input_scalar.value_or(default_input_scalar(item.z));
      const SideInfo side = forward_side(gr, x0);
      const ErrorTable errs = backward_errors(gr, side, res.quantum_grad[out - 1], config.recursion);
      const GradientTable table = gradient_table(gr, side, errs);
      res.delta = errs.delta;
      res.W = side.W;
      res.entries = table.entries;
      for (const GradientEntry& entry : table.entries) res.grad.push_back(entry.value);
    });

    const double count = static_cast<double>(data.size());
    QnnRound round;
    round.r = r;
    round.theta = theta;
    round.delta.assign(g.vertex_count(), 0.0);
    round.quantum_grad.assign(unitaries, 0.0);
    std::vector<double> mean_w(g.vertex_count(), 0.0);
    round.grad.entries = results.front().entries;
    for (GradientEntry& entry : round.grad.entries) entry.value = 0.0;
    for (const ExampleResult& res : results) {
      round.loss += res.loss;
      for (std::size_t v = 0; v < res.delta.size(); ++v) round.delta[v] += res.delta[v];
      for (std::size_t v = 0; v < res.W.size(); ++v) mean_w[v] += res.W[v];
      for (std::size_t k = 0; k < unitaries; ++k) round.quantum_grad[k] += res.quantum_grad[k];
      for (std::size_t k = 0; k < res.grad.size(); ++k) round.grad.entries[k].value += res.grad[k];
    }
    round.loss /= count;
    for (double& d : round.delta) d /= count;
    for (double& w : mean_w) w /= count;
    for (double& q : round.quantum_grad) q /= count;
    for (GradientEntry& entry : round.grad.entries) entry.value /= count;

    if (config.update == QnnUpdateRule::kDescent) {
      for (std::size_t k = 0; k < unitaries; ++k) theta[k] -= config.lambda * round.quantum_grad[k];
    } else {
      SideInfo mean_side;
      mean_side.W = mean_w;
      const GateUpdateResult upd = update_gates(gr, make_gate_update(mean_side));
      theta = upd.thetas;
      round.annihilated = upd.annihilated;
    }
    for (double& t : theta) {
      if (!std::isfinite(t)) throw NumericError("gate parameter became non-finite in round " + std::to_string(r));
      const double clamped = std::clamp(t, -config.clamp_limit, config.clamp_limit);
      if (clamped != t) {
        t = clamped;
        ++round.clamp_events;
      }
    }
    report.clamp_events += round.clamp_events;
    report.rounds.push_back(std::move(round));
  }
  report.initial_loss = report.rounds.front().loss;
  report.final_theta = theta;
  report.final_loss = round_loss(g, circuit, theta, data, config, config.rounds + 1);
  return report;
}

}  // namespace qnn_forge
