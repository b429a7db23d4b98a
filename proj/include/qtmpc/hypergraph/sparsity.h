#ifndef QTMPC_HYPERGRAPH_SPARSITY_H_
#define QTMPC_HYPERGRAPH_SPARSITY_H_

#include <qtmpc/hypergraph/hypergraph.h>

#include <utility>
#include <vector>

namespace qtmpc {

/// Structural nonzeros of a rows x cols matrix, sorted and unique.
struct SparsityPattern
{
    int rows = 0;
    int cols = 0;
    std::vector<std::pair<int, int>> entries;

    int nonzeros() const { return static_cast<int>(entries.size()); }
    double density() const;
    bool contains(int row, int col) const;
};

struct GraphSparsity
{
    SparsityPattern jacobian;  // equality rows first, then inequality rows
    SparsityPattern hessian;   // Hessian of the Lagrangian, symmetric
};

/**
 * Reads the sparsity directly off the edge connectivity.
 *
 * Jacobian: each constraint edge's rows times the free columns of its
 * vertices. Hessian: the diagonal plus, for every edge with curvature, all
 * pairs of its free scalars. Linear edges add nothing to the Hessian.
 */
GraphSparsity derive_sparsity(const Hypergraph& graph);

}  // namespace qtmpc

#endif  // QTMPC_HYPERGRAPH_SPARSITY_H_
