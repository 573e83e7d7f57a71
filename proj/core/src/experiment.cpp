#include "qnn_forge/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qnn_forge/error.hpp"
#include "qnn_forge/rng.hpp"
#include "qnn_forge/rqnn_train.hpp"

namespace qnn_forge {
namespace {

using nlohmann::json;

template <typename Enum>
Enum parse_enum(const json& value, std::string_view field,
                std::initializer_list<std::pair<std::string_view, Enum>> names) {
  if (!value.is_string()) throw ConfigError(std::string(field) + " must be a string");
  const std::string s = value.get<std::string>();
  for (const auto& [name, e] : names) {
    if (s == name) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError("unknown " + std::string(field) + " '" + s + "' (expected one of " + allowed + ")");
}

template <typename T>
T get_field(const json& doc, std::string_view key) {
  try {
    return doc.at(std::string(key)).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + std::string(key) + "' has the wrong type");
  }
}

PauliOp parse_observable(const json& v) {
  return parse_enum<PauliOp>(v, "observable",
                             {{"X", PauliOp::X}, {"Y", PauliOp::Y}, {"Z", PauliOp::Z}});
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string csv_row(int r, double loss, double grad, int clamps) {
  return std::to_string(r) + ',' + format_double(loss) + ',' + format_double(grad) + ',' +
         std::to_string(clamps) + '\n';
}

json gradient_json(const GradientTable& t) {
  json out = json::array();
  for (const GradientEntry& e : t.entries) {
    out.push_back({{"vertex", e.vertex}, {"parent", e.parent}, {"value", e.value}});
  }
  return out;
}

RunArtifacts run_qnn(const ExperimentConfig& c, const Dataset& data, const EnvGraph& g) {
  QnnTrainConfig tc;
  tc.rounds = c.rounds;
  tc.lambda = c.lambda;
  tc.observable = c.observable;
  tc.update = c.qnn_update;
  tc.input_scalar = c.x0;
  tc.recursion = c.q_scaled_delta ? ErrorRecursion::kQScaled : ErrorRecursion::kConsistent;
  tc.shots = c.shots;
  tc.seed = c.seed;
  const QnnReport rep = train_qnn(g, data.items, tc);

  RunArtifacts a;
  json rounds = json::array();
  std::string csv = std::string(kMetricsHeader) + '\n';
  for (const QnnRound& r : rep.rounds) {
    rounds.push_back({{"r", r.r},
                      {"loss", r.loss},
                      {"theta", r.theta},
                      {"delta", r.delta},
                      {"grad", gradient_json(r.grad)},
                      {"quantum_grad", r.quantum_grad},
                      {"clamp_events", r.clamp_events},
                      {"annihilated", r.annihilated}});
    const double driving = c.qnn_update == QnnUpdateRule::kDescent ? max_abs(r.quantum_grad)
                                                                   : r.grad.max_abs();
    csv += csv_row(r.r, r.loss, driving, r.clamp_events);
  }
  a.report = {{"rounds", rounds},
              {"initial_loss", rep.initial_loss},
              {"final_loss", rep.final_loss},
              {"final_theta", rep.final_theta},
              {"clamp_events", rep.clamp_events},
              {"notes", rep.notes}};
  a.metrics_csv = std::move(csv);
  return a;
}

RunArtifacts run_rqnn(const ExperimentConfig& c, const Dataset& data, const EnvGraph& g) {
  RqnnTrainConfig tc;
  tc.rounds = c.rounds;
  tc.lambda = c.lambda;
  tc.kappa = c.kappa;
  tc.initial_bias = c.bias_init;
  tc.observable = c.observable;
  tc.shots = c.shots;
  tc.seed = c.seed;
  const RqnnReport rep = train_rqnn(g, data.items, tc);

  RunArtifacts a;
  json rounds = json::array();
  std::string csv = std::string(kMetricsHeader) + '\n';
  for (const RoundTrace& t : rep.traces) {
    rounds.push_back({{"r", t.r},
                      {"loss", t.loss},
                      {"theta", t.theta},
                      {"delta", std::vector<double>{t.dloss_dphi}},
                      {"grad", t.g},
                      {"B", t.bias},
                      {"Phi", t.phi},
                      {"omega", t.omega}});
    csv += csv_row(t.r, t.loss, max_abs(t.g), 0);
  }
  a.report = {{"rounds", rounds},
              {"initial_loss", rep.traces.front().loss},
              {"final_loss", rep.traces.back().loss},
              {"final_theta", rep.final_theta},
              {"final_bias", rep.final_bias},
              {"final_gradient", rep.final_gradient},
              {"notes", rep.notes}};
  a.metrics_csv = std::move(csv);
  std::ostringstream trace;
  write_trace(trace, rep.traces);
  a.trace_jsonl = trace.str();
  return a;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << content;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::kQnn ? "qnn" : "rqnn"; }
std::string to_string(InitKind k) { return k == InitKind::kZero ? "zero" : "random"; }
std::string to_string(QnnUpdateRule u) {
  return u == QnnUpdateRule::kDescent ? "descent" : "multiplicative";
}
std::string to_string(DataRule r) {
  switch (r) {
    case DataRule::kParity: return "parity";
    case DataRule::kMajority: return "majority";
    case DataRule::kConstant: return "constant";
  }
  return "parity";
}

DataRule parse_rule(std::string_view name) {
  return parse_enum<DataRule>(json(std::string(name)), "rule",
                              {{"parity", DataRule::kParity},
                               {"majority", DataRule::kMajority},
                               {"constant", DataRule::kConstant}});
}

void ExperimentConfig::validate() const {
  if (n < 1 || n > kMaxWires) {
    throw ConfigError("n must be between 1 and " + std::to_string(kMaxWires) + " (got " +
                      std::to_string(n) + ")");
  }
  if (layers < 1) throw ConfigError("layers must be at least 1");
  if (rounds < 1) throw ConfigError("rounds must be at least 1 (got " + std::to_string(rounds) + ")");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive and finite");
  if (!std::isfinite(kappa)) throw ConfigError("kappa must be finite");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw ConfigError("init_scale must be nonnegative and finite");
  }
  if (!std::isfinite(bias_init)) throw ConfigError("bias_init must be finite");
  if (x0 && !std::isfinite(*x0)) throw ConfigError("x0 must be finite");
  if (observable == PauliOp::I) throw ConfigError("observable must be X, Y or Z");
  if (!dataset.exhaustive && dataset.count < 1) throw ConfigError("dataset.count must be at least 1");
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["layers"] = c.layers;
  j["observable"] = std::string(1, to_char(c.observable));
  j["rounds"] = c.rounds;
  j["lambda"] = c.lambda;
  j["kappa"] = c.kappa;
  j["seed"] = c.seed;
  j["mode"] = to_string(c.mode);
  j["shots"] = c.shots;
  j["init"] = to_string(c.init);
  j["init_scale"] = c.init_scale;
  j["qnn_update"] = to_string(c.qnn_update);
  j["dataset"] = {{"rule", to_string(c.dataset.rule)},
                  {"count", c.dataset.count},
                  {"exhaustive", c.dataset.exhaustive}};
  j["bias_init"] = c.bias_init;
  j["x0"] = c.x0 ? json(*c.x0) : json(nullptr);
  j["q_scaled_delta"] = c.q_scaled_delta;
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "n",    "layers", "observable", "rounds",     "lambda",  "kappa",     "seed",  "mode",
      "shots", "init",  "init_scale", "qnn_update", "dataset", "bias_init", "x0",    "q_scaled_delta"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  if (doc.contains("n")) c.n = get_field<int>(doc, "n");
  if (doc.contains("layers")) c.layers = get_field<int>(doc, "layers");
  if (doc.contains("observable")) c.observable = parse_observable(doc["observable"]);
  if (doc.contains("rounds")) c.rounds = get_field<int>(doc, "rounds");
  if (doc.contains("lambda")) c.lambda = get_field<double>(doc, "lambda");
  if (doc.contains("kappa")) c.kappa = get_field<double>(doc, "kappa");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("mode")) {
    c.mode = parse_enum<Mode>(doc["mode"], "mode", {{"qnn", Mode::kQnn}, {"rqnn", Mode::kRqnn}});
  }
  if (doc.contains("shots")) {
    if (!doc["shots"].is_number_unsigned()) throw ConfigError("shots must be a nonnegative integer");
    c.shots = doc["shots"].get<std::uint64_t>();
  }
  if (doc.contains("init")) {
    c.init = parse_enum<InitKind>(doc["init"], "init",
                                  {{"zero", InitKind::kZero}, {"random", InitKind::kRandom}});
  }
  if (doc.contains("init_scale")) c.init_scale = get_field<double>(doc, "init_scale");
  if (doc.contains("qnn_update")) {
    c.qnn_update = parse_enum<QnnUpdateRule>(
        doc["qnn_update"], "qnn_update",
        {{"descent", QnnUpdateRule::kDescent}, {"multiplicative", QnnUpdateRule::kMultiplicative}});
  }
  if (doc.contains("dataset")) {
    const json& d = doc["dataset"];
    if (!d.is_object()) throw ConfigError("dataset must be an object");
    for (const auto& [key, value] : d.items()) {
      if (key != "rule" && key != "count" && key != "exhaustive") {
        throw ConfigError("unknown dataset key '" + key + "'");
      }
    }
    if (d.contains("rule")) {
      if (!d["rule"].is_string()) throw ConfigError("dataset.rule must be a string");
      c.dataset.rule = parse_rule(d["rule"].get<std::string>());
    }
    if (d.contains("count")) c.dataset.count = get_field<int>(d, "count");
    if (d.contains("exhaustive")) c.dataset.exhaustive = get_field<bool>(d, "exhaustive");
  }
  if (doc.contains("bias_init")) c.bias_init = get_field<double>(doc, "bias_init");
  if (doc.contains("x0") && !doc["x0"].is_null()) c.x0 = get_field<double>(doc, "x0");
  if (doc.contains("q_scaled_delta")) c.q_scaled_delta = get_field<bool>(doc, "q_scaled_delta");
  return c;
}

std::string dump_config(const ExperimentConfig& c) { return config_to_json(c).dump(2) + '\n'; }

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

void Dataset::validate() const {
  for (const LabeledString& item : items) {
    item.validate();
    if (static_cast<int>(item.z.size()) != n) {
      throw InvalidInputError("dataset string of length " + std::to_string(item.z.size()) +
                              " in a dataset with n=" + std::to_string(n));
    }
  }
}

int label_of(std::span<const int> z, DataRule rule) {
  switch (rule) {
    case DataRule::kParity: {
      int p = 1;
      for (int zi : z) p *= zi;
      return p;
    }
    case DataRule::kMajority: {
      int s = 0;
      for (int zi : z) s += zi;
      return s >= 0 ? 1 : -1;
    }
    case DataRule::kConstant: return 1;
  }
  return 1;
}

Dataset gen_data(int n, int count, DataRule rule, std::uint64_t seed) {
  if (n < 1 || n > kMaxWires) {
    throw ConfigError("n must be between 1 and " + std::to_string(kMaxWires));
  }
  if (count < 1) throw ConfigError("count must be at least 1");
  CounterRng rng(seed, Stream::kDataset);
  Dataset d;
  d.n = n;
  for (int k = 0; k < count; ++k) {
    LabeledString item;
    for (int i = 0; i < n; ++i) item.z.push_back(rng.below(2) == 0 ? 1 : -1);
    item.label = label_of(item.z, rule);
    d.items.push_back(std::move(item));
  }
  return d;
}

Dataset exhaustive_data(int n, DataRule rule) {
  if (n < 1 || n > kMaxWires) {
    throw ConfigError("n must be between 1 and " + std::to_string(kMaxWires));
  }
  Dataset d;
  d.n = n;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    LabeledString item;
    for (int i = 0; i < n; ++i) item.z.push_back((b >> (n - 1 - i)) & 1 ? -1 : 1);
    item.label = label_of(item.z, rule);
    d.items.push_back(std::move(item));
  }
  return d;
}

Dataset make_dataset(const ExperimentConfig& c) {
  return c.dataset.exhaustive ? exhaustive_data(c.n, c.dataset.rule)
                              : gen_data(c.n, c.dataset.count, c.dataset.rule, c.seed);
}

json dataset_to_json(const Dataset& d) {
  json items = json::array();
  for (const LabeledString& item : d.items) items.push_back({{"z", item.z}, {"label", item.label}});
  return {{"n", d.n}, {"items", items}};
}

Dataset dataset_from_json(const json& doc) {
  try {
    Dataset d;
    d.n = doc.at("n").get<int>();
    for (const json& item : doc.at("items")) {
      d.items.push_back({item.at("z").get<std::vector<int>>(), item.at("label").get<int>()});
    }
    d.validate();
    return d;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed dataset: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("invalid dataset: ") + e.what());
  }
}

EnvGraph build_graph(const ExperimentConfig& c) {
  const Circuit circuit = reference_ansatz(c.n, c.layers);
  std::vector<double> thetas(circuit.size(), 0.0);
  if (c.init == InitKind::kRandom) {
    CounterRng rng(c.seed, Stream::kInit);
    for (double& t : thetas) t = rng.uniform(-c.init_scale, c.init_scale);
  }
  return graph_from_circuit(circuit, thetas);
}

RunArtifacts run_experiment(const ExperimentConfig& c, const Dataset& data) {
  c.validate();
  if (data.n != c.n) {
    throw ConfigError("dataset has n=" + std::to_string(data.n) + " but config has n=" +
                      std::to_string(c.n));
  }
  if (data.items.empty()) throw ConfigError("dataset is empty");
  data.validate();
  const EnvGraph g = build_graph(c);
  RunArtifacts a = c.mode == Mode::kQnn ? run_qnn(c, data, g) : run_rqnn(c, data, g);
  a.report["config"] = config_to_json(c);
  a.report["seed"] = c.seed;
  a.report["mode"] = to_string(c.mode);
  return a;
}

void write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir,
                     std::string_view log_line) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", a.report.dump(2) + '\n');
  write_file(dir / "metrics.csv", a.metrics_csv);
  if (a.trace_jsonl) write_file(dir / "trace.jsonl", *a.trace_jsonl);

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ofstream log(dir / "run.log", std::ios::app);
  log << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << ' ' << log_line << '\n';
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qnn_forge
