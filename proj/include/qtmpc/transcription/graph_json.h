#ifndef QTMPC_TRANSCRIPTION_GRAPH_JSON_H_
#define QTMPC_TRANSCRIPTION_GRAPH_JSON_H_

#include <qtmpc/hypergraph/hypergraph.h>

#include <json.hpp>

#include <string>

namespace qtmpc {

/// Topology dump: vertices (kind, stage, dim, bounds, fixed) and edges (kind, label, vertex ids).
nlohmann::json graph_to_json(const Hypergraph& graph);
std::string graph_to_json_string(const Hypergraph& graph, int indent = 2);

}  // namespace qtmpc

#endif  // QTMPC_TRANSCRIPTION_GRAPH_JSON_H_
