#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnn_forge/env_graph.hpp"
#include "qnn_forge/qsim.hpp"

namespace qnn_forge {

/// Record of one measurement round. Parameter vectors over S(theta) = {theta, B}
/// (g, omega) have length L+1 with the bias component last.
struct RoundTrace {
  int r = 0;
  std::vector<int> z;
  int label = 1;
  std::vector<double> theta;  // theta_r, length L
  double bias = 0.0;          // B_r
  double w = 0.0;             // mean of theta_{r-1}
  double phi = 0.0;           // Phi_r
  double ltilde = 0.0;
  double loss = 0.0;
  double dloss_dphi = 0.0;
  std::vector<double> g;
  std::vector<double> omega;
  double lambda = 0.0;

  friend bool operator==(const RoundTrace&, const RoundTrace&) = default;
};

struct PhiStep {
  double phi = 0.0;
  double w = 0.0;
};

/// Scalar side-information recurrence linking consecutive rounds:
/// w_r = mean(theta_prev), Phi_r = sum_i z_i + w_r * Phi_{r-1} + B_r.
PhiStep phi_step(double prev_phi, std::span<const int> z, std::span<const double> theta_prev,
                 double bias);

/// xi_{r,k} = prod_{i=k+1..r} w_i (= dPhi_r/dPhi_k), for 0 <= k < r.
/// traces[i-1] holds round i. Throws IndexError for k >= r or missing rounds.
double xi(std::span<const RoundTrace> traces, int r, int k);

/// g_r from a known dL/dPhi_r:
///   g_r[theta_l] = sum_{k=1..r} dL/dPhi_r * xi_{r,k} * Phi_{k-1} / L
///   g_r[B]       = sum_{k=1..r} dL/dPhi_r * xi_{r,k}
/// with xi_{r,r} = 1 and Phi_0 = 0.
std::vector<double> round_gradient_from_sensitivity(std::span<const RoundTrace> traces, int r,
                                                    double dloss_dphi);

/// dL/dPhi_r = kappa * sum_i quantum_grad_i, then round_gradient_from_sensitivity.
std::vector<double> round_gradient(std::span<const RoundTrace> traces, int r,
                                   std::span<const double> quantum_grad, double kappa);

/// omega_r = (lambda / r) * sum_{k=1..r} g_k.
std::vector<double> omega(std::span<const RoundTrace> traces, int r, double lambda);

struct RoundParameters {
  std::vector<double> theta;
  double bias = 0.0;
};

/// theta_{r+1} = theta_r - omega_r and B_{r+1} = B_r - omega_r[B]. Returns
/// nullopt (no update) once r >= total_rounds.
std::optional<RoundParameters> apply_round_update(std::span<const RoundTrace> traces, int r,
                                                  double lambda, int total_rounds);

/// G = sum_{r=1..R} g_r. Throws IncompleteRunError if any round lacks g_r.
std::vector<double> final_gradient(std::span<const RoundTrace> traces, int total_rounds);

struct RqnnTrainConfig {
  int rounds = 20;
  double lambda = 0.05;
  /// Coupling of Phi_r into the effective gate parameters theta + kappa * Phi_r.
  double kappa = 0.1;
  double initial_bias = 0.0;
  PauliOp observable = PauliOp::Z;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

struct RqnnReport {
  std::vector<RoundTrace> traces;
  std::vector<double> final_gradient;
  std::vector<double> final_theta;
  double final_bias = 0.0;
  std::vector<std::string> notes;
};

/// Recurrent training. Round r feeds example (r-1) mod |data|, evaluates the
/// loss at theta_r + kappa * Phi_r, and updates the shared parameters with the
/// running mean of all gradients so far.
RqnnReport train_rqnn(const EnvGraph& g, std::span<const LabeledString> data,
                      const RqnnTrainConfig& config);

// Trace files: JSON lines, one RoundTrace per line, keys in a fixed order.
nlohmann::ordered_json trace_to_json(const RoundTrace& t);
RoundTrace trace_from_json(const nlohmann::json& doc);
void write_trace(std::ostream& os, std::span<const RoundTrace> traces);
/// Throws CorruptTraceError on malformed lines or an empty trace.
std::vector<RoundTrace> read_trace(std::istream& is);

struct ReplayVerdict {
  bool pass = true;
  /// First round whose recorded values disagree with the recomputation (0 if none).
  int failed_round = 0;
  std::string reason;
  /// Largest |xi_{r,k} - xi_{r,m} xi_{m,k}| seen.
  double max_telescoping_dev = 0.0;
};

/// Recomputes w, Phi, g, omega and the parameter updates from the trace and
/// requires bit-identical agreement; checks xi telescoping to 1e-12.
ReplayVerdict replay_trace(std::span<const RoundTrace> traces);

}  // namespace qnn_forge
