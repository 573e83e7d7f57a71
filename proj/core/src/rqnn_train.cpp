#include "qnn_forge/rqnn_train.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>

#include "qnn_forge/error.hpp"
#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/rng.hpp"

namespace qnn_forge {
namespace {

constexpr double kTelescopingTolerance = 1e-12;
constexpr int kMaxTelescopingRounds = 256;

void require_rounds(std::span<const RoundTrace> traces, int r) {
  if (r < 1 || r > static_cast<int>(traces.size())) {
    throw IndexError("round " + std::to_string(r) + " is not recorded (" +
                     std::to_string(traces.size()) + " rounds available)");
  }
}

double phi_sensitivity(std::span<const double> quantum_grad, double kappa) {
  double sum = 0.0;
  for (double q : quantum_grad) sum += q;
  return kappa * sum;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(),
                                            [](double x, double y) { return same_bits(x, y); });
}

}  // namespace

PhiStep phi_step(double prev_phi, std::span<const int> z, std::span<const double> theta_prev,
                 double bias) {
  if (theta_prev.empty()) throw InvalidInputError("phi_step needs the previous gate parameters");
  double theta_sum = 0.0;
  for (double t : theta_prev) theta_sum += t;
  double h = 0.0;
  for (int zi : z) h += zi;
  PhiStep step;
  step.w = theta_sum / static_cast<double>(theta_prev.size());
  step.phi = h + step.w * prev_phi + bias;
  return step;
}

double xi(std::span<const RoundTrace> traces, int r, int k) {
  if (k < 0 || k >= r) {
    throw IndexError("xi_{r,k} needs 0 <= k < r; got r=" + std::to_string(r) +
                     ", k=" + std::to_string(k));
  }
  require_rounds(traces, r);
  double product = 1.0;
  for (int i = k + 1; i <= r; ++i) product *= traces[i - 1].w;
  return product;
}

std::vector<double> round_gradient_from_sensitivity(std::span<const RoundTrace> traces, int r,
                                                    double dloss_dphi) {
  require_rounds(traces, r);
  const std::size_t unitaries = traces[r - 1].theta.size();
  if (unitaries == 0) throw InvalidInputError("round has no gate parameters");
  const double inv_l = 1.0 / static_cast<double>(unitaries);

  double theta_part = 0.0;
  double bias_part = 0.0;
  double xi_rk = 1.0;  // xi_{r,r}
  for (int k = r; k >= 1; --k) {
    const double phi_prev = k >= 2 ? traces[k - 2].phi : 0.0;
    theta_part += dloss_dphi * xi_rk * phi_prev * inv_l;
    bias_part += dloss_dphi * xi_rk;
    xi_rk *= traces[k - 1].w;
  }
  std::vector<double> g(unitaries + 1, theta_part);
  g.back() = bias_part;
  return g;
}

std::vector<double> round_gradient(std::span<const RoundTrace> traces, int r,
                                   std::span<const double> quantum_grad, double kappa) {
  return round_gradient_from_sensitivity(traces, r, phi_sensitivity(quantum_grad, kappa));
}

std::vector<double> omega(std::span<const RoundTrace> traces, int r, double lambda) {
  require_rounds(traces, r);
  const std::size_t size = traces[r - 1].g.size();
  std::vector<double> sum(size, 0.0);
  for (int k = 1; k <= r; ++k) {
    const std::vector<double>& gk = traces[k - 1].g;
    if (gk.size() != size) throw IncompleteRunError("round " + std::to_string(k) + " lacks g_k");
    for (std::size_t c = 0; c < size; ++c) sum[c] += gk[c];
  }
  const double scale = lambda / static_cast<double>(r);
  for (double& s : sum) s *= scale;
  return sum;
}

std::optional<RoundParameters> apply_round_update(std::span<const RoundTrace> traces, int r,
                                                  double lambda, int total_rounds) {
  if (r >= total_rounds) return std::nullopt;
  const std::vector<double> om = omega(traces, r, lambda);
  const RoundTrace& t = traces[r - 1];
  if (om.size() != t.theta.size() + 1) {
    throw DimensionError("gradient of round " + std::to_string(r) + " has the wrong length");
  }
  RoundParameters next;
  next.theta.resize(t.theta.size());
  for (std::size_t l = 0; l < t.theta.size(); ++l) next.theta[l] = t.theta[l] - om[l];
  next.bias = t.bias - om.back();
  return next;
}

std::vector<double> final_gradient(std::span<const RoundTrace> traces, int total_rounds) {
  if (total_rounds < 1 || static_cast<int>(traces.size()) < total_rounds) {
    throw IncompleteRunError("final gradient needs " + std::to_string(total_rounds) +
                             " rounds, have " + std::to_string(traces.size()));
  }
  const std::size_t size = traces.front().g.size();
  std::vector<double> total(size, 0.0);
  for (int r = 1; r <= total_rounds; ++r) {
    const std::vector<double>& gr = traces[r - 1].g;
    if (gr.empty() || gr.size() != size) {
      throw IncompleteRunError("round " + std::to_string(r) + " has no gradient");
    }
    for (std::size_t c = 0; c < size; ++c) total[c] += gr[c];
  }
  return total;
}

RqnnReport train_rqnn(const EnvGraph& g, std::span<const LabeledString> data,
                      const RqnnTrainConfig& config) {
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

  RqnnReport report;
  report.notes.push_back(
      "Phi_r = sum_i z_i + w_r * Phi_{r-1} + B_r with w_r the mean of theta_{r-1} is a scalar "
      "surrogate for the round-linking side information");
  report.notes.push_back("loss couples to Phi_r through effective gate parameters theta_r + kappa * Phi_r");

  std::vector<double> theta = g.thetas();
  std::vector<double> theta_prev = theta;
  double bias = config.initial_bias;
  double prev_phi = 0.0;

  for (int r = 1; r <= config.rounds; ++r) {
    const LabeledString& item = data[static_cast<std::size_t>(r - 1) % data.size()];
    RoundTrace t;
    t.r = r;
    t.z = item.z;
    t.label = item.label;
    t.theta = theta;
    t.bias = bias;
    t.lambda = config.lambda;
    const PhiStep step = phi_step(prev_phi, item.z, theta_prev, bias);
    t.w = step.w;
    t.phi = step.phi;

    std::vector<double> effective(circuit.size());
    for (std::size_t k = 0; k < circuit.size(); ++k) {
      effective[k] = theta[circuit[k].vertex - 1] + config.kappa * t.phi;
    }
    if (config.shots == 0) {
      t.ltilde = predicted_label(circuit, effective, item.z, obs);
    } else {
      const std::uint64_t seed = CounterRng(config.seed, Stream::kShots).split(r)();
      t.ltilde = sample_label(circuit, effective, item.z, obs, config.shots, seed);
    }
    t.loss = loss(item.label, t.ltilde);
    const std::vector<double> quantum_grad = loss_gradient(circuit, effective, item, obs);
    t.dloss_dphi = phi_sensitivity(quantum_grad, config.kappa);

    report.traces.push_back(std::move(t));
    RoundTrace& cur = report.traces.back();
    cur.g = round_gradient_from_sensitivity(report.traces, r, cur.dloss_dphi);
    cur.omega = omega(report.traces, r, config.lambda);

    prev_phi = cur.phi;
    if (auto next = apply_round_update(report.traces, r, config.lambda, config.rounds)) {
      theta_prev = theta;
      theta = std::move(next->theta);
      bias = next->bias;
    }
  }
  report.final_gradient = final_gradient(report.traces, config.rounds);
  report.final_theta = theta;
  report.final_bias = bias;
  return report;
}

nlohmann::ordered_json trace_to_json(const RoundTrace& t) {
  nlohmann::ordered_json j;
  j["r"] = t.r;
  j["z"] = t.z;
  j["label"] = t.label;
  j["theta"] = t.theta;
  j["B"] = t.bias;
  j["w"] = t.w;
  j["Phi"] = t.phi;
  j["ltilde"] = t.ltilde;
  j["loss"] = t.loss;
  j["dL_dPhi"] = t.dloss_dphi;
  j["g"] = t.g;
  j["omega"] = t.omega;
  j["lambda"] = t.lambda;
  return j;
}

RoundTrace trace_from_json(const nlohmann::json& doc) {
  try {
    RoundTrace t;
    t.r = doc.at("r").get<int>();
    t.z = doc.at("z").get<std::vector<int>>();
    t.label = doc.at("label").get<int>();
    t.theta = doc.at("theta").get<std::vector<double>>();
    t.bias = doc.at("B").get<double>();
    t.w = doc.at("w").get<double>();
    t.phi = doc.at("Phi").get<double>();
    t.ltilde = doc.at("ltilde").get<double>();
    t.loss = doc.at("loss").get<double>();
    t.dloss_dphi = doc.at("dL_dPhi").get<double>();
    t.g = doc.at("g").get<std::vector<double>>();
    t.omega = doc.at("omega").get<std::vector<double>>();
    t.lambda = doc.at("lambda").get<double>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptTraceError(std::string("malformed round record: ") + e.what());
  }
}

void write_trace(std::ostream& os, std::span<const RoundTrace> traces) {
  for (const RoundTrace& t : traces) os << trace_to_json(t).dump() << '\n';
}

std::vector<RoundTrace> read_trace(std::istream& is) {
  std::vector<RoundTrace> traces;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorruptTraceError("line " + std::to_string(line_no) + " is not JSON: " + e.what());
    }
    traces.push_back(trace_from_json(doc));
  }
  if (traces.empty()) throw CorruptTraceError("trace is empty");
  return traces;
}

ReplayVerdict replay_trace(std::span<const RoundTrace> traces) {
  if (traces.empty()) throw CorruptTraceError("trace is empty");
  ReplayVerdict verdict;
  auto fail = [&](int r, std::string reason) {
    if (verdict.pass) {
      verdict.pass = false;
      verdict.failed_round = r;
      verdict.reason = std::move(reason);
    }
  };
  const int total = static_cast<int>(traces.size());
  const std::size_t unitaries = traces.front().theta.size();

  for (int r = 1; r <= total && verdict.pass; ++r) {
    const RoundTrace& t = traces[r - 1];
    if (t.r != r) {
      fail(r, "round index " + std::to_string(t.r) + " out of sequence");
      break;
    }
    if (t.theta.size() != unitaries || unitaries == 0 || t.g.size() != unitaries + 1 ||
        t.omega.size() != unitaries + 1) {
      fail(r, "parameter vector lengths are inconsistent");
      break;
    }
    const std::vector<double>& theta_prev = r == 1 ? t.theta : traces[r - 2].theta;
    const double prev_phi = r == 1 ? 0.0 : traces[r - 2].phi;
    const PhiStep step = phi_step(prev_phi, t.z, theta_prev, t.bias);
    if (!same_bits(step.w, t.w)) fail(r, "w_r differs from the mean of theta_{r-1}");
    if (!same_bits(step.phi, t.phi)) fail(r, "Phi_r differs from its recurrence");
    if (!same_bits(loss(t.label, t.ltilde), t.loss)) fail(r, "loss differs from 1 - l * ltilde");
    if (!same_bits(round_gradient_from_sensitivity(traces, r, t.dloss_dphi), t.g)) {
      fail(r, "g_r differs from its recomputation");
    }
    if (!same_bits(omega(traces, r, t.lambda), t.omega)) fail(r, "omega_r differs from its recomputation");
    if (r < total && verdict.pass) {
      const RoundTrace& next = traces[r];
      bool ok = next.theta.size() == unitaries;
      for (std::size_t l = 0; ok && l < unitaries; ++l) ok = same_bits(next.theta[l], t.theta[l] - t.omega[l]);
      if (!ok) fail(r + 1, "theta_" + std::to_string(r + 1) + " != theta_" + std::to_string(r) + " - omega_" + std::to_string(r));
      if (ok && !same_bits(next.bias, t.bias - t.omega.back())) {
        fail(r + 1, "B_" + std::to_string(r + 1) + " != B_" + std::to_string(r) + " - omega_" + std::to_string(r) + "[B]");
      }
    }
  }

  // xi_{r,k} = xi_{r,m} xi_{m,k} for all k < m < r.
  const int limit = std::min(total, kMaxTelescopingRounds);
  std::vector<std::vector<double>> table(limit + 1);
  for (int r = 1; r <= limit; ++r) {
    table[r].resize(r);
    for (int k = 0; k < r; ++k) table[r][k] = xi(traces, r, k);
  }
  for (int r = 2; r <= limit; ++r) {
    for (int k = 0; k < r; ++k) {
      for (int m = k + 1; m < r; ++m) {
        const double direct = table[r][k];
        const double dev = std::abs(direct - table[r][m] * table[m][k]);
        verdict.max_telescoping_dev = std::max(verdict.max_telescoping_dev, dev);
        if (dev > kTelescopingTolerance * std::max(1.0, std::abs(direct))) {
          fail(r, "xi telescoping identity violated");
        }
      }
    }
  }
  return verdict;
}

}  // namespace qnn_forge
