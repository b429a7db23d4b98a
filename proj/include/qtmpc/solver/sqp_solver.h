#ifndef QTMPC_SOLVER_SQP_SOLVER_H_
#define QTMPC_SOLVER_SQP_SOLVER_H_

#include <qtmpc/hypergraph/derivatives.h>
#include <qtmpc/hypergraph/hypergraph.h>
#include <qtmpc/solver/qp_solver.h>

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qtmpc {

struct SolverOptions
{
    int sqp_max_iterations = 300;
    int qp_max_iterations  = 1000;
    double eps_kkt         = 1e-6;
    double eps_feas        = 1e-7;

    /// QP Hessian from the objective edges' curvature models (squared time
    /// objective); without it only the regularization is used.
    bool objective_hessian    = true;
    double regularization     = 1e-8;  // added to the QP Hessian diagonal
    double regularization_max = 1e-2;  // escalation limit (x10 per QP failure)

    double merit_penalty      = 1.0;   // initial l1 penalty, raised to 1.1 * |multipliers|
    double backtracking       = 0.5;
    double armijo             = 1e-4;
    double min_step           = 1e-8;
    bool second_order_correction = true;

    int stagnation_iterations = 10;    // infeasible when feasibility stalls this long

    DerivativeOptions derivatives;

    /// Per-iteration CSV rows (iteration, objective, feasibility, step norm, ...).
    std::ostream* trace = nullptr;
};

enum class SolveStatus
{
    optimal,
    max_iter,
    infeasible,
    error
};

std::string_view to_string(SolveStatus status);

struct NlpSolution
{
    VectorXd parameters;
    /// Multipliers of the stacked equality / inequality residuals.
    VectorXd equality_multipliers;
    VectorXd inequality_multipliers;  // >= 0
    /// Per parameter: > 0 when the upper bound is active, < 0 for the lower bound.
    VectorXd bound_multipliers;

    double objective       = 0.0;
    SolveStatus status     = SolveStatus::error;
    int iterations         = 0;
    int qp_iterations      = 0;
    double max_violation   = 0.0;
    double kkt_stationarity = 0.0;
    double wall_ms         = 0.0;
    std::string message;
    /// l1 merit before and after each accepted step (pairs share a penalty).
    std::vector<std::pair<double, double>> merit_history;

    bool ok() const { return status == SolveStatus::optimal; }
};

struct KktResidual
{
    double stationarity    = 0.0;
    double feasibility     = 0.0;
    double complementarity = 0.0;
};

/// First-order optimality residuals (infinity norms) of `solution` on `graph`.
KktResidual kkt_residual(const Hypergraph& graph, const NlpSolution& solution,
                         const DerivativeOptions& options = {});

/**
 * SQP on a finalized hypergraph. The initial point is the graph's current
 * parameter values (projected onto the bounds); `warm` supplies initial
 * multipliers when its dimensions match. On return the graph holds the final
 * iterate.
 */
NlpSolution solve_nlp(Hypergraph& graph, const SolverOptions& options = {}, const NlpSolution* warm = nullptr);

}  // namespace qtmpc

#endif  // QTMPC_SOLVER_SQP_SOLVER_H_
