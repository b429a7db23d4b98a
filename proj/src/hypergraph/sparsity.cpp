#include <qtmpc/hypergraph/sparsity.h>

#include <algorithm>
#include <stdexcept>

namespace qtmpc {

double SparsityPattern::density() const
{
    if (rows == 0 || cols == 0) return 0.0;
    return static_cast<double>(entries.size()) / (static_cast<double>(rows) * cols);
}

bool SparsityPattern::contains(int row, int col) const
{
    return std::binary_search(entries.begin(), entries.end(), std::make_pair(row, col));
}

namespace {

std::vector<int> free_columns(const Hypergraph& graph, const Edge& edge)
{
    std::vector<int> cols;
    for (int v : edge.vertices())
    {
        const int offset = graph.parameter_offset(v);
        if (offset < 0) continue;
        for (int j = 0; j < graph.vertex(v).dim(); ++j) cols.push_back(offset + j);
    }
    return cols;
}

void sort_unique(std::vector<std::pair<int, int>>& entries)
{
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
}

}  // namespace

GraphSparsity derive_sparsity(const Hypergraph& graph)
{
    if (!graph.finalized()) throw std::logic_error("derive_sparsity: graph not finalized");

    const int n = graph.parameter_count();
    GraphSparsity result;
    result.jacobian.rows = graph.equality_count() + graph.inequality_count();
    result.jacobian.cols = n;
    result.hessian.rows  = n;
    result.hessian.cols  = n;

    for (int i = 0; i < n; ++i) result.hessian.entries.emplace_back(i, i);

    for (int e = 0; e < graph.edge_count(); ++e)
    {
        const Edge& edge            = graph.edge(e);
        const std::vector<int> cols = free_columns(graph, edge);

        if (edge.kind() != EdgeKind::objective)
        {
            const int base = edge.kind() == EdgeKind::equality ? graph.row_offset(e)
                                                               : graph.equality_count() + graph.row_offset(e);
            for (int r = 0; r < edge.dimension(); ++r)
            {
                for (int c : cols) result.jacobian.entries.emplace_back(base + r, c);
            }
        }

        if (edge.is_linear()) continue;
        for (int a : cols)
        {
            for (int b : cols) result.hessian.entries.emplace_back(a, b);
        }
    }

    sort_unique(result.jacobian.entries);
    sort_unique(result.hessian.entries);
    return result;
}

}  // namespace qtmpc
