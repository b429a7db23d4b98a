#include <qtmpc/hypergraph/derivatives.h>

#include <sstream>

namespace qtmpc {

namespace {

using Triplet = Eigen::Triplet<double>;

VertexValues gather(const Edge& edge, const std::vector<VectorXd>& values)
{
    VertexValues ptrs;
    ptrs.reserve(edge.vertices().size());
    for (int v : edge.vertices()) ptrs.push_back(&values[v]);
    return ptrs;
}

VectorXd evaluate_edge(const Edge& edge, const VertexValues& values, int edge_id)
{
    VectorXd r(edge.dimension());
    edge.evaluate(values, r);
    if (!r.allFinite())
    {
        std::ostringstream msg;
        msg << "edge " << edge_id;
        if (!edge.label().empty()) msg << " ('" << edge.label() << "')";
        msg << " evaluated to a non-finite residual";
        throw EvaluationError(msg.str(), edge_id);
    }
    return r;
}

// Jacobian blocks of one edge, analytic if available, else finite differences
// over the free scalars of the edge (fixed vertices get empty blocks).
std::vector<MatrixXd> edge_jacobian(const Hypergraph& graph, const Edge& edge, int edge_id,
                                    const std::vector<VectorXd>& values, const VectorXd& r0,
                                    const DerivativeOptions& options)
{
    VertexValues ptrs = gather(edge, values);
    std::vector<MatrixXd> blocks;
    if (edge.jacobian(ptrs, blocks)) return blocks;

    blocks.assign(edge.vertices().size(), MatrixXd());
    std::vector<VectorXd> local;
    local.reserve(edge.vertices().size());
    for (int v : edge.vertices()) local.push_back(values[v]);
    VertexValues local_ptrs;
    for (const VectorXd& v : local) local_ptrs.push_back(&v);

    const double h = options.step;
    for (std::size_t i = 0; i < edge.vertices().size(); ++i)
    {
        const int vid = edge.vertices()[i];
        if (graph.parameter_offset(vid) < 0) continue;
        const int dim = static_cast<int>(local[i].size());
        blocks[i].resize(edge.dimension(), dim);
        for (int j = 0; j < dim; ++j)
        {
            const double orig = local[i][j];
            local[i][j]       = orig + h;
            VectorXd rp       = evaluate_edge(edge, local_ptrs, edge_id);
            if (options.central)
            {
                local[i][j]       = orig - h;
                VectorXd rm       = evaluate_edge(edge, local_ptrs, edge_id);
                blocks[i].col(j) = (rp - rm) / (2.0 * h);
            }
            else
            {
                blocks[i].col(j) = (rp - r0) / h;
            }
            local[i][j] = orig;
        }
    }
    return blocks;
}

}  // namespace

NlpResiduals evaluate_residuals(const Hypergraph& graph, const VectorXd& parameters)
{
    const std::vector<VectorXd> values = graph.values_at(parameters);
    NlpResiduals out;
    out.equality.setZero(graph.equality_count());
    out.inequality.setZero(graph.inequality_count());
    for (int e = 0; e < graph.edge_count(); ++e)
    {
        const Edge& edge = graph.edge(e);
        VectorXd r       = evaluate_edge(edge, gather(edge, values), e);
        switch (edge.kind())
        {
            case EdgeKind::objective: out.objective += r[0]; break;
            case EdgeKind::equality: out.equality.segment(graph.row_offset(e), edge.dimension()) = r; break;
            case EdgeKind::inequality: out.inequality.segment(graph.row_offset(e), edge.dimension()) = r; break;
        }
    }
    return out;
}

NlpEvaluation evaluate_derivatives(const Hypergraph& graph, const VectorXd& parameters, const DerivativeOptions& options,
                                   bool with_hessian_model)
{
    const std::vector<VectorXd> values = graph.values_at(parameters);
    const int n                        = graph.parameter_count();

    NlpEvaluation out;
    out.gradient.setZero(n);
    out.equality.setZero(graph.equality_count());
    out.inequality.setZero(graph.inequality_count());

    std::vector<Triplet> eq_triplets, in_triplets, hess_triplets;

    for (int e = 0; e < graph.edge_count(); ++e)
    {
        const Edge& edge        = graph.edge(e);
        const VertexValues ptrs = gather(edge, values);
        const VectorXd r        = evaluate_edge(edge, ptrs, e);
        const std::vector<MatrixXd> blocks = edge_jacobian(graph, edge, e, values, r, options);

        int row = 0;
        switch (edge.kind())
        {
            case EdgeKind::objective: out.objective += r[0]; break;
            case EdgeKind::equality:
                row = graph.row_offset(e);
                out.equality.segment(row, edge.dimension()) = r;
                break;
            case EdgeKind::inequality:
                row = graph.row_offset(e);
                out.inequality.segment(row, edge.dimension()) = r;
                break;
        }

        for (std::size_t i = 0; i < edge.vertices().size(); ++i)
        {
            const int col0 = graph.parameter_offset(edge.vertices()[i]);
            if (col0 < 0) continue;
            const MatrixXd& block = blocks[i];
            for (int c = 0; c < block.cols(); ++c)
            {
                for (int rr = 0; rr < block.rows(); ++rr)
                {
                    const double val = block(rr, c);
                    if (edge.kind() == EdgeKind::objective)
                        out.gradient[col0 + c] += val;
                    else
                        (edge.kind() == EdgeKind::equality ? eq_triplets : in_triplets)
                            .emplace_back(row + rr, col0 + c, val);
                }
            }
        }

        if (with_hessian_model && edge.kind() == EdgeKind::objective)
        {
            MatrixXd H;
            if (!edge.hessian_model(ptrs, H)) continue;
            // H is over the stacked scalars of all connected vertices.
            std::vector<int> cols;
            for (int v : edge.vertices())
            {
                const int off = graph.parameter_offset(v);
                for (int j = 0; j < graph.vertex(v).dim(); ++j) cols.push_back(off < 0 ? -1 : off + j);
            }
            for (int a = 0; a < H.rows(); ++a)
            {
                if (cols[a] < 0) continue;
                for (int b = 0; b < H.cols(); ++b)
                {
                    if (cols[b] < 0) continue;
                    hess_triplets.emplace_back(cols[a], cols[b], H(a, b));
                }
            }
        }
    }

    out.equality_jacobian.resize(graph.equality_count(), n);
    out.equality_jacobian.setFromTriplets(eq_triplets.begin(), eq_triplets.end());
    out.inequality_jacobian.resize(graph.inequality_count(), n);
    out.inequality_jacobian.setFromTriplets(in_triplets.begin(), in_triplets.end());
    out.objective_hessian.resize(n, n);
    out.objective_hessian.setFromTriplets(hess_triplets.begin(), hess_triplets.end());
    return out;
}

}  // namespace qtmpc
