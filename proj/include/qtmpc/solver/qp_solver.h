#ifndef QTMPC_SOLVER_QP_SOLVER_H_
#define QTMPC_SOLVER_QP_SOLVER_H_

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <string_view>
#include <vector>

namespace qtmpc {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/**
 * Convex QP in operator-splitting form:
 *
 *   minimize    1/2 x' P x + q' x
 *   subject to  lower <= A x <= upper
 *
 * P is symmetric positive semidefinite (full storage). Equalities use
 * lower == upper; one-sided rows use +-infinity.
 */
struct QpProblem
{
    SparseMatrix P;
    VectorXd q;
    SparseMatrix A;
    VectorXd lower;
    VectorXd upper;

    int variables() const { return static_cast<int>(q.size()); }
    int constraints() const { return static_cast<int>(lower.size()); }

    /// Stacks A_eq x = b_eq, A_in x <= b_in and lb <= x <= ub (rows with both
    /// bounds infinite are dropped). Row order: equalities, inequalities, bounds.
    static QpProblem from_parts(const SparseMatrix& H, const VectorXd& g, const SparseMatrix& A_eq, const VectorXd& b_eq,
                                const SparseMatrix& A_in, const VectorXd& b_in, const VectorXd& lb, const VectorXd& ub);
};

struct QpSettings
{
    int max_iterations   = 4000;
    double eps_abs       = 1e-8;
    double eps_rel       = 1e-8;
    double eps_primal_infeasible = 1e-5;
    double eps_dual_infeasible   = 1e-5;
    double rho           = 0.1;
    double sigma         = 1e-6;
    double alpha         = 1.6;
    int scaling_iterations = 10;
    bool adaptive_rho    = true;
    bool polish          = true;
    int check_interval   = 10;
    /// ADMM stops early when the residual-to-tolerance ratio has not halved within this many iterations (<= 0: off).
    int stall_iterations = 200;
    /// Primal-dual interior point on the same QP when ADMM runs out of iterations.
    bool interior_point_fallback = true;
    int interior_point_max_iterations = 100;
};

enum class QpStatus
{
    solved,
    max_iterations,
    primal_infeasible,
    dual_infeasible
};

std::string_view to_string(QpStatus status);

struct QpResult
{
    VectorXd x;
    VectorXd y;  // multipliers: > 0 at an active upper bound, < 0 at an active lower bound
    QpStatus status = QpStatus::max_iterations;
    int iterations  = 0;
    double primal_residual = 0.0;
    double dual_residual   = 0.0;
    bool polished          = false;
    bool interior_point    = false;  // solved by the interior-point fallback
    /// Primal infeasibility: y-direction with A'dy ~ 0 and separating support value.
    VectorXd certificate;
    double certificate_residual = 0.0;
};

/**
 * ADMM solver with Ruiz equilibration, adaptive step size and active-set
 * polishing. Degenerate, LP-like problems on which ADMM stalls are handed to
 * a Mehrotra interior-point method. The symbolic factorization of the reduced KKT matrix is kept
 * between solves while its sparsity pattern is unchanged, which is the
 * common case inside an SQP loop.
 */
class QpSolver
{
 public:
    explicit QpSolver(QpSettings settings = {}) : _settings(settings) {}

    QpSettings& settings() { return _settings; }
    const QpSettings& settings() const { return _settings; }

    QpResult solve(const QpProblem& problem, const VectorXd* x_warm = nullptr, const VectorXd* y_warm = nullptr);

    /// Number of symbolic analyses so far (a pattern change triggers a new one).
    int symbolic_factorizations() const { return _symbolic_count; }

 private:
    struct Scaled;

    void factorize(const SparseMatrix& K);
    bool polish(const QpProblem& problem, QpResult& result) const;
    bool interior_point(const QpProblem& problem, QpResult& result) const;

    QpSettings _settings;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> _ldlt;
    std::vector<int> _pattern_outer;
    std::vector<int> _pattern_inner;
    int _symbolic_count = 0;
};

/// Convenience wrapper with default settings.
QpResult solve_qp(const QpProblem& problem, const QpSettings& settings = {});

}  // namespace qtmpc

#endif  // QTMPC_SOLVER_QP_SOLVER_H_
