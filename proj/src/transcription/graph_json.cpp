#include <qtmpc/transcription/graph_json.h>

#include <cmath>

namespace qtmpc {

namespace {

// JSON has no infinity; unbounded entries become null.
nlohmann::json bounds_to_json(const VectorXd& v)
{
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i)
    {
        if (std::isfinite(v[i]))
            out.push_back(v[i]);
        else
            out.push_back(nullptr);
    }
    return out;
}

}  // namespace

nlohmann::json graph_to_json(const Hypergraph& graph)
{
    nlohmann::json vertices = nlohmann::json::array();
    for (int i = 0; i < graph.vertex_count(); ++i)
    {
        const Vertex& v = graph.vertex(i);
        vertices.push_back({{"id", i},
                            {"kind", std::string(to_string(v.kind))},
                            {"stage", v.stage},
                            {"dim", v.dim()},
                            {"fixed", v.fixed},
                            {"lower", bounds_to_json(v.lower)},
                            {"upper", bounds_to_json(v.upper)},
                            {"value", std::vector<double>(v.value.data(), v.value.data() + v.value.size())}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (int e = 0; e < graph.edge_count(); ++e)
    {
        const Edge& edge = graph.edge(e);
        edges.push_back({{"id", e},
                         {"kind", std::string(to_string(edge.kind()))},
                         {"label", edge.label()},
                         {"dim", edge.dimension()},
                         {"linear", edge.is_linear()},
                         {"vertices", edge.vertices()}});
    }
    nlohmann::json out = {{"vertices", vertices}, {"edges", edges}};
    if (graph.finalized())
    {
        out["parameters"]   = graph.parameter_count();
        out["equalities"]   = graph.equality_count();
        out["inequalities"] = graph.inequality_count();
    }
    return out;
}

std::string graph_to_json_string(const Hypergraph& graph, int indent) { return graph_to_json(graph).dump(indent); }

}  // namespace qtmpc
