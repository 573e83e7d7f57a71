#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnn_forge/env_graph.hpp"
#include "qnn_forge/qsim.hpp"
#include "qnn_forge/side_network.hpp"

namespace qnn_forge {

enum class QnnUpdateRule {
  /// theta <- theta - lambda * dL/dtheta with parameter-shift loss gradients.
  kDescent,
  /// theta'_z = W_z * theta_z unless W_z == 1.
  kMultiplicative,
};

struct QnnTrainConfig {
  int rounds = 1;
  double lambda = 0.05;
  PauliOp observable = PauliOp::Z;
  QnnUpdateRule update = QnnUpdateRule::kDescent;
  /// Constant V_0; when unset each example uses default_input_scalar(z).
  std::optional<double> input_scalar;
  ErrorRecursion recursion = ErrorRecursion::kConsistent;
  /// 0 evaluates exact expectations; otherwise losses use sampled labels.
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  /// Gate parameters are clamped to [-clamp_limit, clamp_limit] after each update.
  double clamp_limit = 2.0 * std::numbers::pi;
};

/// One measurement round: values are taken at `theta`, before the update.
/// Side-network quantities are averaged over the dataset.
struct QnnRound {
  int r = 0;
  double loss = 0.0;
  std::vector<double> theta;
  std::vector<double> delta;
  GradientTable grad;
  /// Mean dL/dtheta from parameter shifts, one entry per unitary.
  std::vector<double> quantum_grad;
  int clamp_events = 0;
  std::vector<int> annihilated;
};

struct QnnReport {
  std::vector<QnnRound> rounds;
  std::vector<double> final_theta;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int clamp_events = 0;
  /// Caveats about how the run was seeded; copied verbatim into JSON reports.
  std::vector<std::string> notes;
};

/// Mean of 1 - l * ltilde over the dataset for gate parameters in vertex order.
double mean_loss(const EnvGraph& g, std::span<const double> thetas,
                 std::span<const LabeledString> data, PauliOp observable);

/// Supervised training over `config.rounds` rounds. Every round runs the
/// quantum evolution for each example, the side-information forward pass,
/// backward errors seeded with dL/dtheta_L (quantum-coupled mode), the
/// gradient table and finally the gate update.
QnnReport train_qnn(const EnvGraph& g, std::span<const LabeledString> data,
                    const QnnTrainConfig& config);

}  // namespace qnn_forge
