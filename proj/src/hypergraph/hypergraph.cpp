#include <qtmpc/hypergraph/hypergraph.h>

#include <limits>
#include <sstream>
#include <stdexcept>

namespace qtmpc {

std::string_view to_string(VertexKind kind)
{
    switch (kind)
    {
        case VertexKind::state: return "state";
        case VertexKind::control: return "control";
        case VertexKind::interval: return "interval";
        case VertexKind::auxiliary: return "auxiliary";
    }
    return "unknown";
}

std::string_view to_string(EdgeKind kind)
{
    switch (kind)
    {
        case EdgeKind::objective: return "objective";
        case EdgeKind::equality: return "equality";
        case EdgeKind::inequality: return "inequality";
    }
    return "unknown";
}

Vertex Vertex::make(VertexKind kind, int stage, const VectorXd& value, bool fixed)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    Vertex v;
    v.kind  = kind;
    v.stage = stage;
    v.value = value;
    v.lower = VectorXd::Constant(value.size(), -inf);
    v.upper = VectorXd::Constant(value.size(), inf);
    v.fixed = fixed;
    return v;
}

int Hypergraph::add_vertex(Vertex vertex)
{
    if (vertex.lower.size() != vertex.dim() || vertex.upper.size() != vertex.dim())
        throw std::invalid_argument("Hypergraph::add_vertex: bound dimensions do not match value");
    _vertices.push_back(std::move(vertex));
    _finalized = false;
    return vertex_count() - 1;
}

int Hypergraph::add_edge(Edge::Ptr edge)
{
    if (!edge) throw std::invalid_argument("Hypergraph::add_edge: null edge");
    for (int v : edge->vertices())
    {
        if (v < 0 || v >= vertex_count())
            throw std::invalid_argument("Hypergraph::add_edge: edge '" + edge->label() + "' references unknown vertex");
    }
    if (edge->kind() == EdgeKind::objective && edge->dimension() != 1)
        throw std::invalid_argument("Hypergraph::add_edge: objective edges must be scalar");
    _edges.push_back(std::move(edge));
    _finalized = false;
    return edge_count() - 1;
}

Vertex& Hypergraph::vertex(int id) { return _vertices.at(id); }

void Hypergraph::finalize()
{
    _parameter_offset.assign(_vertices.size(), -1);
    _parameter_count = 0;
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        const Vertex& v = _vertices[i];
        if (v.lower.size() != v.dim() || v.upper.size() != v.dim())
            throw std::invalid_argument("Hypergraph::finalize: bound dimensions do not match value");
        if ((v.lower.array() > v.upper.array()).any())
        {
            std::ostringstream msg;
            msg << "Hypergraph::finalize: vertex " << i << " (" << to_string(v.kind) << " " << v.stage
                << ") has lower bound above upper bound";
            throw std::invalid_argument(msg.str());
        }
        if (v.fixed) continue;
        _parameter_offset[i] = _parameter_count;
        _parameter_count += v.dim();
    }

    _row_offset.assign(_edges.size(), -1);
    _equality_count   = 0;
    _inequality_count = 0;
    for (std::size_t e = 0; e < _edges.size(); ++e)
    {
        const Edge& edge = *_edges[e];
        if (edge.kind() == EdgeKind::equality)
        {
            _row_offset[e] = _equality_count;
            _equality_count += edge.dimension();
        }
        else if (edge.kind() == EdgeKind::inequality)
        {
            _row_offset[e] = _inequality_count;
            _inequality_count += edge.dimension();
        }
    }
    _finalized = true;
}

void Hypergraph::require_finalized() const
{
    if (!_finalized) throw std::logic_error("Hypergraph: finalize() required after structural edits");
}

VectorXd Hypergraph::parameters() const
{
    require_finalized();
    VectorXd x(_parameter_count);
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        if (_parameter_offset[i] >= 0) x.segment(_parameter_offset[i], _vertices[i].dim()) = _vertices[i].value;
    }
    return x;
}

void Hypergraph::set_parameters(const VectorXd& parameters)
{
    require_finalized();
    if (parameters.size() != _parameter_count)
        throw std::invalid_argument("Hypergraph::set_parameters: expected " + std::to_string(_parameter_count) +
                                    " parameters, got " + std::to_string(parameters.size()));
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        if (_parameter_offset[i] >= 0) _vertices[i].value = parameters.segment(_parameter_offset[i], _vertices[i].dim());
    }
}

VectorXd Hypergraph::lower_bounds() const
{
    require_finalized();
    VectorXd lb(_parameter_count);
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        if (_parameter_offset[i] >= 0) lb.segment(_parameter_offset[i], _vertices[i].dim()) = _vertices[i].lower;
    }
    return lb;
}

VectorXd Hypergraph::upper_bounds() const
{
    require_finalized();
    VectorXd ub(_parameter_count);
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        if (_parameter_offset[i] >= 0) ub.segment(_parameter_offset[i], _vertices[i].dim()) = _vertices[i].upper;
    }
    return ub;
}

std::vector<VectorXd> Hypergraph::values_at(const VectorXd& parameters) const
{
    require_finalized();
    if (parameters.size() != _parameter_count)
        throw std::invalid_argument("Hypergraph::values_at: expected " + std::to_string(_parameter_count) +
                                    " parameters, got " + std::to_string(parameters.size()));
    std::vector<VectorXd> values;
    values.reserve(_vertices.size());
    for (std::size_t i = 0; i < _vertices.size(); ++i)
    {
        if (_parameter_offset[i] >= 0)
            values.emplace_back(parameters.segment(_parameter_offset[i], _vertices[i].dim()));
        else
            values.push_back(_vertices[i].value);
    }
    return values;
}

}  // namespace qtmpc
