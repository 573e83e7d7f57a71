#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnn_forge/env_graph.hpp"
#include "qnn_forge/qnn_train.hpp"
#include "qnn_forge/qsim.hpp"

namespace qnn_forge {

enum class Mode { kQnn, kRqnn };
enum class InitKind { kZero, kRandom };
enum class DataRule { kParity, kMajority, kConstant };

std::string to_string(Mode m);
std::string to_string(InitKind k);
std::string to_string(DataRule r);
std::string to_string(QnnUpdateRule u);
/// Throws ConfigError for unknown names.
DataRule parse_rule(std::string_view name);

struct DatasetSpec {
  DataRule rule = DataRule::kParity;
  /// Number of random strings. Ignored when `exhaustive` is set.
  int count = 4;
  /// Use every string of {-1,+1}^n once, in lexicographic order (+1 first).
  bool exhaustive = false;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Everything that determines a run. Serialized as JSON with sorted keys; a
/// parse of the dump reproduces the config exactly.
struct ExperimentConfig {
  int n = 2;
  /// Layers of the reference ansatz.
  int layers = 1;
  PauliOp observable = PauliOp::Z;
  int rounds = 1;
  double lambda = 0.05;
  double kappa = 0.1;
  std::uint64_t seed = 0;
  Mode mode = Mode::kQnn;
  std::uint64_t shots = 0;
  InitKind init = InitKind::kRandom;
  /// Random initial angles are uniform in [-init_scale, init_scale].
  double init_scale = 0.5;
  QnnUpdateRule qnn_update = QnnUpdateRule::kDescent;
  DatasetSpec dataset;
  /// Initial bias B_1 of the recurrent trainer.
  double bias_init = 0.0;
  /// Constant input scalar V_0; per-example default when unset.
  std::optional<double> x0;
  /// Use the error recursion with the extra Q_z factor.
  bool q_scaled_delta = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys and bad values throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
std::string dump_config(const ExperimentConfig& c);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Dataset {
  int n = 0;
  std::vector<LabeledString> items;

  /// Throws InvalidInputError unless every item has length n and +-1 entries.
  void validate() const;
};

/// Label of z under the rule: parity is prod z_i, majority is sign(sum z_i)
/// with ties to +1, constant is +1.
int label_of(std::span<const int> z, DataRule rule);

/// `count` strings drawn uniformly from the dataset stream of `seed`.
Dataset gen_data(int n, int count, DataRule rule, std::uint64_t seed);
/// All 2^n strings.
Dataset exhaustive_data(int n, DataRule rule);
Dataset make_dataset(const ExperimentConfig& c);

nlohmann::json dataset_to_json(const Dataset& d);
/// Throws ConfigError on malformed input.
Dataset dataset_from_json(const nlohmann::json& doc);

/// Reference ansatz graph with initial angles drawn per config.init.
EnvGraph build_graph(const ExperimentConfig& c);

struct RunArtifacts {
  nlohmann::json report;
  /// Header r,mean_loss,max_abs_grad,clamp_events.
  std::string metrics_csv;
  /// JSON lines, recurrent mode only.
  std::optional<std::string> trace_jsonl;
};

inline constexpr std::string_view kMetricsHeader = "r,mean_loss,max_abs_grad,clamp_events";

/// Runs the configured trainer. Outputs are a pure function of (config, data).
RunArtifacts run_experiment(const ExperimentConfig& c, const Dataset& data);

/// Writes report.json, metrics.csv and (recurrent mode) trace.jsonl into
/// `dir`, and appends a timestamped line to the sidecar run.log.
void write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir,
                     std::string_view log_line);

/// "%.17g", the round-trip decimal form used in CSV output.
std::string format_double(double v);

}  // namespace qnn_forge
