#ifndef QTMPC_HYPERGRAPH_HYPERGRAPH_H_
#define QTMPC_HYPERGRAPH_HYPERGRAPH_H_

#include <Eigen/Core>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qtmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class VertexKind
{
    state,
    control,
    interval,
    auxiliary  // slack or other helper parameters introduced by baselines
};

std::string_view to_string(VertexKind kind);

/// An optimization parameter block. Fixed vertices are constants of the NLP.
struct Vertex
{
    VertexKind kind = VertexKind::state;
    int stage       = 0;  // grid index k
    VectorXd value;
    VectorXd lower;
    VectorXd upper;
    bool fixed = false;

    static Vertex make(VertexKind kind, int stage, const VectorXd& value, bool fixed = false);

    int dim() const { return static_cast<int>(value.size()); }
};

enum class EdgeKind
{
    objective,
    equality,   // residual == 0
    inequality  // residual <= 0
};

std::string_view to_string(EdgeKind kind);

/// Values of an edge's vertices, in the edge's vertex order.
using VertexValues = std::vector<const VectorXd*>;

/**
 * A cost or constraint term connecting a fixed list of vertices.
 *
 * Objective edges have dimension 1. Edges may provide analytic Jacobians per
 * vertex block; otherwise sparse finite differences are used.
 */
class Edge
{
 public:
    using Ptr = std::shared_ptr<const Edge>;

    Edge(EdgeKind kind, std::vector<int> vertices, int dimension, std::string label = {})
        : _kind(kind), _vertices(std::move(vertices)), _dimension(dimension), _label(std::move(label))
    {
    }
    virtual ~Edge() = default;

    EdgeKind kind() const { return _kind; }
    const std::vector<int>& vertices() const { return _vertices; }
    int dimension() const { return _dimension; }
    const std::string& label() const { return _label; }

    /// Residual is affine in the vertex values (no Hessian contribution).
    virtual bool is_linear() const { return false; }

    virtual void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const = 0;

    /// One block (dimension x vertex dim) per connected vertex. Return false to
    /// request finite differences.
    virtual bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const { return false; }

    /**
     * Objective edges only: positive semidefinite curvature model over the
     * stacked vertex scalars, used as the QP Hessian block. Return false for
     * none (the solver adds its regularization only).
     */
    virtual bool hessian_model(const VertexValues& values, MatrixXd& hessian) const { return false; }

 private:
    EdgeKind _kind;
    std::vector<int> _vertices;
    int _dimension;
    std::string _label;
};

/**
 * Parameters (vertices) plus cost/constraint terms (edges) of an NLP.
 *
 * Free vertex scalars are stacked in vertex order into the parameter vector;
 * equality and inequality residuals are stacked in edge order. Edges are
 * immutable and shared, so copying a graph is cheap.
 */
class Hypergraph
{
 public:
    int add_vertex(Vertex vertex);
    int add_edge(Edge::Ptr edge);

    int vertex_count() const { return static_cast<int>(_vertices.size()); }
    int edge_count() const { return static_cast<int>(_edges.size()); }
    const Vertex& vertex(int id) const { return _vertices.at(id); }
    /// Mutable access; call finalize() again after changing dimensions or `fixed`.
    Vertex& vertex(int id);
    const std::vector<Vertex>& vertices() const { return _vertices; }
    const Edge& edge(int id) const { return *_edges.at(id); }
    const std::vector<Edge::Ptr>& edges() const { return _edges; }

    /// Validates the structure and builds index maps; required before use by the solver.
    void finalize();
    bool finalized() const { return _finalized; }

    int parameter_count() const { return _parameter_count; }
    int equality_count() const { return _equality_count; }
    int inequality_count() const { return _inequality_count; }

    /// Offset of the vertex in the parameter vector, -1 for fixed vertices.
    int parameter_offset(int vertex_id) const { return _parameter_offset.at(vertex_id); }
    /// Offset of an equality/inequality edge in its residual stack, -1 for other kinds.
    int row_offset(int edge_id) const { return _row_offset.at(edge_id); }

    VectorXd parameters() const;
    void set_parameters(const VectorXd& parameters);
    VectorXd lower_bounds() const;
    VectorXd upper_bounds() const;

    /// Vertex values with the free scalars replaced by `parameters`.
    std::vector<VectorXd> values_at(const VectorXd& parameters) const;

 private:
    void require_finalized() const;

    std::vector<Vertex> _vertices;
    std::vector<Edge::Ptr> _edges;
    std::vector<int> _parameter_offset;
    std::vector<int> _row_offset;
    int _parameter_count  = 0;
    int _equality_count   = 0;
    int _inequality_count = 0;
    bool _finalized       = false;
};

}  // namespace qtmpc

#endif  // QTMPC_HYPERGRAPH_HYPERGRAPH_H_
