#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qnn_forge/error.hpp"
#include "qnn_forge/experiment.hpp"
#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/graph_json.hpp"
#include "qnn_forge/rqnn_train.hpp"

namespace qnn_forge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;

  // gen-data
  std::optional<int> n;
  std::optional<int> count;
  std::optional<std::string> rule;
  bool exhaustive = false;

  // train
  std::string data;

  // gradcheck
  int cases = 100;

  // hessian
  std::string graph;
  int vertices = 5;
  double x0 = 1.0;
  double target = 0.0;

  // replay
  std::string trace;
};

ExperimentConfig resolve_config(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

void write_json(const json& doc, const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + (dir / name).string());
  os << doc.dump(2) << '\n';
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  if (o.n) c.n = *o.n;
  if (o.count) c.dataset.count = *o.count;
  if (o.rule) c.dataset.rule = parse_rule(*o.rule);
  if (o.exhaustive) c.dataset.exhaustive = true;
  c.validate();
  const json doc = dataset_to_json(make_dataset(c));
  if (o.out.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_json(doc, o.out, "dataset.json");
    out << (fs::path(o.out) / "dataset.json").string() << '\n';
  }
  return kOk;
}

int cmd_train(const Options& o, Mode mode, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  c.mode = mode;
  c.validate();
  const Dataset data = o.data.empty() ? make_dataset(c) : dataset_from_json([&] {
    try {
      return json::parse(read_text(o.data));
    } catch (const json::exception& e) {
      throw ConfigError("dataset is not valid JSON: " + std::string(e.what()));
    }
  }());
  const RunArtifacts a = run_experiment(c, data);
  const fs::path dir = o.out.empty() ? fs::path("out") : fs::path(o.out);
  write_artifacts(a, dir, "train-" + to_string(mode) + " seed=" + std::to_string(c.seed) +
                              " rounds=" + std::to_string(c.rounds));
  out << "initial_loss " << format_double(a.report["initial_loss"].get<double>()) << '\n'
      << "final_loss " << format_double(a.report["final_loss"].get<double>()) << '\n'
      << "wrote " << dir.string() << '\n';
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  if (o.cases < 1) throw ConfigError("--cases must be at least 1");
  GradcheckOptions opts;
  opts.cases = o.cases;
  opts.seed = o.seed.value_or(0);
  const GradcheckReport r = run_gradcheck(opts);
  const json doc = {{"max_grad_dev", r.max_grad_dev},
                    {"max_hess_dev", r.max_hess_dev},
                    {"sparsity_ok", r.sparsity_ok},
                    {"cases", r.cases}};
  if (!o.out.empty()) write_json(doc, o.out, "gradcheck.json");
  out << doc.dump(2) << '\n';
  return kOk;
}

json table_json(const HessianTable& t) {
  json rows = json::array();
  for (std::size_t a = 0; a < t.size(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < t.size(); ++b) row.push_back(t.at(a, b));
    rows.push_back(row);
  }
  return rows;
}

int cmd_hessian(const Options& o, std::ostream& out) {
  std::optional<EnvGraph> g;
  if (!o.graph.empty()) {
    try {
      g = parse_graph(read_text(o.graph));
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("invalid graph: ") + e.what());
    }
  } else {
    if (o.vertices < 2 || o.vertices > 64) throw ConfigError("--vertices must be between 2 and 64");
    CounterRng rng(o.seed.value_or(0), Stream::kTestCases);
    g = random_env_graph(rng, o.vertices, 1, 1.0, true);
  }
  g->validate();
  const SurrogateLoss loss{o.target};
  const SideInfo side = forward_side(*g, o.x0);
  const HessianTable closed = hessian_closed_form(*g, side, loss);
  const HessianTable fd = hessian_finite_difference(*g, o.x0, loss);
  double max_dev = 0.0;
  for (std::size_t a = 0; a < closed.size(); ++a) {
    for (std::size_t b = 0; b < closed.size(); ++b) {
      max_dev = std::max(max_dev, std::abs(closed.at(a, b) - fd.at(a, b)) /
                                      std::max(1.0, std::abs(fd.at(a, b))));
    }
  }
  const SparsityReport sparsity = second_error_sparsity(*g, second_error_table(*g, side));
  json arcs = json::array();
  for (const Arc& arc : closed.arcs()) arcs.push_back({arc.from, arc.to});
  json violations = json::array();
  for (const auto& [l, i] : sparsity.violations) violations.push_back({l, i});
  const json doc = {{"arcs", arcs},
                    {"closed_form", table_json(closed)},
                    {"finite_difference", table_json(fd)},
                    {"max_rel_dev", max_dev},
                    {"max_asymmetry", closed.max_asymmetry()},
                    {"sparsity_ok", sparsity.ok},
                    {"violations", violations},
                    {"graph", graph_to_json(*g)}};
  if (!o.out.empty()) write_json(doc, o.out, "hessian.json");
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_replay(const Options& o, std::ostream& out) {
  std::ifstream is(o.trace, std::ios::binary);
  if (!is) throw CorruptTraceError("cannot read trace " + o.trace);
  const std::vector<RoundTrace> traces = read_trace(is);
  const ReplayVerdict v = replay_trace(traces);
  if (v.pass) {
    out << "PASS " << traces.size() << " rounds, max xi telescoping deviation "
        << format_double(v.max_telescoping_dev) << '\n';
    return kOk;
  }
  out << "FAIL round " << v.failed_round << ": " << v.reason << '\n';
  return kFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum neural network simulator and training harness", "qnn_forge"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", o.config, "Experiment config (JSON)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed, overrides the config");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "Generate a labeled bitstring dataset");
  common(gen, true);
  gen->add_option("--n", o.n, "Data wires");
  gen->add_option("--count", o.count, "Number of strings");
  gen->add_option("--rule", o.rule, "parity, majority or constant");
  gen->add_flag("--exhaustive", o.exhaustive, "Emit every string once");

  CLI::App* qnn = app.add_subcommand("train-qnn", "Train the feed-forward network");
  common(qnn, true);
  qnn->add_option("--data", o.data, "Dataset JSON (generated from the config when omitted)");

  CLI::App* rqnn = app.add_subcommand("train-rqnn", "Train the recurrent network");
  common(rqnn, true);
  rqnn->add_option("--data", o.data, "Dataset JSON (generated from the config when omitted)");

  CLI::App* grad = app.add_subcommand("gradcheck", "Compare analytic and numerical derivatives");
  common(grad, false);
  grad->add_option("--cases", o.cases, "Random cases");

  CLI::App* hess = app.add_subcommand("hessian", "Closed-form vs finite-difference Hessian");
  common(hess, false);
  hess->add_option("--graph", o.graph, "Graph JSON (random graph when omitted)");
  hess->add_option("--vertices", o.vertices, "Vertex count of the random graph");
  hess->add_option("--x0", o.x0, "Input scalar V_0");
  hess->add_option("--target", o.target, "Target of the quadratic loss");

  CLI::App* replay = app.add_subcommand("replay", "Verify a recurrent training trace");
  replay->add_option("trace", o.trace, "trace.jsonl")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_gen_data(o, out);
    if (*qnn) return cmd_train(o, Mode::kQnn, out);
    if (*rqnn) return cmd_train(o, Mode::kRqnn, out);
    if (*grad) return cmd_gradcheck(o, out);
    if (*hess) return cmd_hessian(o, out);
    if (*replay) return cmd_replay(o, out);
  } catch (const CorruptTraceError& e) {
    err << "error: " << e.what() << '\n';
    return kCorruptTrace;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const Error& e) {
    // Everything else the library rejects is a problem with the inputs.
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace qnn_forge::cli
