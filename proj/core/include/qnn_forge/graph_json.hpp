#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

#include "qnn_forge/env_graph.hpp"

namespace qnn_forge {

/// {n, vertices:[{id, pauli, bias, label}], arcs:[{from, to, theta}]}
nlohmann::json graph_to_json(const EnvGraph& g);
EnvGraph graph_from_json(const nlohmann::json& doc);

std::string dump_graph(const EnvGraph& g);
EnvGraph parse_graph(std::string_view text);

}  // namespace qnn_forge
