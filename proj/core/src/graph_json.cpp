#include "qnn_forge/graph_json.hpp"

#include <algorithm>

#include "qnn_forge/error.hpp"

namespace qnn_forge {

using nlohmann::json;

json graph_to_json(const EnvGraph& g) {
  json vertices = json::array();
  for (const Vertex& v : g.vertices()) {
    vertices.push_back({{"id", v.id},
                        {"pauli", v.id == 0 ? std::string() : v.pauli.str()},
                        {"bias", v.bias},
                        {"label", v.label}});
  }
  json arcs = json::array();
  for (const Arc& a : g.arcs()) arcs.push_back({{"from", a.from}, {"to", a.to}, {"theta", a.theta}});
  return {{"n", g.n()}, {"vertices", std::move(vertices)}, {"arcs", std::move(arcs)}};
}

EnvGraph graph_from_json(const json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    std::vector<Vertex> vertices;
    for (const json& v : doc.at("vertices")) {
      Vertex vx;
      vx.id = v.at("id").get<int>();
      const auto pauli = v.value("pauli", std::string());
      if (!pauli.empty()) vx.pauli = PauliString::parse(pauli);
      vx.bias = v.value("bias", 0.0);
      vx.label = v.value("label", 0.0);
      vertices.push_back(std::move(vx));
    }
    std::sort(vertices.begin(), vertices.end(),
              [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
    std::vector<Arc> arcs;
    for (const json& a : doc.at("arcs")) {
      arcs.push_back({a.at("from").get<int>(), a.at("to").get<int>(), a.at("theta").get<double>()});
    }
    return EnvGraph(n, std::move(vertices), std::move(arcs));
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed graph document: ") + e.what());
  }
}

std::string dump_graph(const EnvGraph& g) { return graph_to_json(g).dump(); }

EnvGraph parse_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("graph is not valid JSON: ") + e.what());
  }
  return graph_from_json(doc);
}

}  // namespace qnn_forge
