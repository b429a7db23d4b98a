#ifndef QTMPC_HYPERGRAPH_DERIVATIVES_H_
#define QTMPC_HYPERGRAPH_DERIVATIVES_H_

#include <qtmpc/hypergraph/hypergraph.h>

#include <Eigen/SparseCore>

#include <stdexcept>

namespace qtmpc {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DerivativeOptions
{
    double step  = 1e-9;
    bool central = false;  // for ill-scaled problems
};

/// A residual evaluated to NaN or infinity.
class EvaluationError : public std::runtime_error
{
 public:
    EvaluationError(const std::string& what, int edge_id) : std::runtime_error(what), _edge_id(edge_id) {}
    int edge_id() const { return _edge_id; }

 private:
    int _edge_id;
};

struct NlpEvaluation
{
    double objective = 0.0;
    VectorXd gradient;
    VectorXd equality;
    VectorXd inequality;
    SparseMatrix equality_jacobian;
    SparseMatrix inequality_jacobian;
    SparseMatrix objective_hessian;  // sum of the objective edges' curvature models
};

struct NlpResiduals
{
    double objective = 0.0;
    VectorXd equality;
    VectorXd inequality;
};

/// Zeroth-order evaluation only (used by the line search).
NlpResiduals evaluate_residuals(const Hypergraph& graph, const VectorXd& parameters);

/**
 * Objective, gradient, residuals and sparse Jacobians at `parameters`.
 *
 * Per-edge derivatives come from the edge itself when it provides them,
 * otherwise from finite differences over that edge's free scalars only, so
 * only structural nonzeros are ever touched. Does not mutate the graph.
 */
NlpEvaluation evaluate_derivatives(const Hypergraph& graph, const VectorXd& parameters,
                                   const DerivativeOptions& options = {}, bool with_hessian_model = true);

}  // namespace qtmpc

#endif  // QTMPC_HYPERGRAPH_DERIVATIVES_H_
