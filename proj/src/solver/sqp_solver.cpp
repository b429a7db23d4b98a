#include <qtmpc/solver/sqp_solver.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace qtmpc {

namespace {

using Triplet        = Eigen::Triplet<double>;
constexpr double inf = std::numeric_limits<double>::infinity();

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double violation_l1(const VectorXd& eq, const VectorXd& in)
{
    return eq.lpNorm<1>() + in.cwiseMax(0.0).sum();
}

double violation_inf(const VectorXd& eq, const VectorXd& in)
{
    double v = inf_norm(eq);
    if (in.size() > 0) v = std::max(v, in.maxCoeff());
    return std::max(v, 0.0);
}

double bound_violation(const VectorXd& x, const VectorXd& lb, const VectorXd& ub)
{
    double v = 0.0;
    for (int i = 0; i < x.size(); ++i) v = std::max({v, lb[i] - x[i], x[i] - ub[i]});
    return v;
}

// Free scalars with at least one finite bound, in order (the bound rows of the QP).
std::vector<int> bounded_indices(const VectorXd& lb, const VectorXd& ub)
{
    std::vector<int> idx;
    for (int i = 0; i < lb.size(); ++i)
        if (std::isfinite(lb[i]) || std::isfinite(ub[i])) idx.push_back(i);
    return idx;
}

SparseMatrix regularized(const SparseMatrix& H, double rho)
{
    SparseMatrix I(H.rows(), H.cols());
    I.setIdentity();
    SparseMatrix R = H + rho * I;
    R.makeCompressed();
    return R;
}

struct Multipliers
{
    VectorXd eq, in, bound;
};

KktResidual kkt_from(const NlpEvaluation& ev, const VectorXd& x, const VectorXd& lb, const VectorXd& ub,
                     const Multipliers& y)
{
    KktResidual r;
    VectorXd grad = ev.gradient;
    if (ev.equality.size() > 0) grad += ev.equality_jacobian.transpose() * y.eq;
    if (ev.inequality.size() > 0) grad += ev.inequality_jacobian.transpose() * y.in;
    grad += y.bound;
    r.stationarity = inf_norm(grad);
    r.feasibility  = std::max(violation_inf(ev.equality, ev.inequality), bound_violation(x, lb, ub));
    double c       = 0.0;
    for (int i = 0; i < ev.inequality.size(); ++i)
        c = std::max({c, std::abs(y.in[i] * ev.inequality[i]), -y.in[i]});
    for (int i = 0; i < x.size(); ++i)
    {
        const double yi = y.bound[i];
        if (yi > 0.0) c = std::max(c, std::isfinite(ub[i]) ? yi * std::abs(ub[i] - x[i]) : yi);
        if (yi < 0.0) c = std::max(c, std::isfinite(lb[i]) ? -yi * std::abs(x[i] - lb[i]) : -yi);
    }
    r.complementarity = c;
    return r;
}

bool acceptable(const QpResult& r)
{
    return r.status == QpStatus::solved ||
           (r.status == QpStatus::max_iterations && r.primal_residual < 1e-6 && r.dual_residual < 1e-6);
}

}  // namespace

constexpr int kElasticStallLimit = 5;

std::string_view to_string(SolveStatus status)
{
    switch (status)
    {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::error: return "error";
    }
    return "unknown";
}

KktResidual kkt_residual(const Hypergraph& graph, const NlpSolution& solution, const DerivativeOptions& options)
{
    const NlpEvaluation ev = evaluate_derivatives(graph, solution.parameters, options, false);
    Multipliers y;
    y.eq    = solution.equality_multipliers.size() == ev.equality.size() ? solution.equality_multipliers
                                                                         : VectorXd::Zero(ev.equality.size());
    y.in    = solution.inequality_multipliers.size() == ev.inequality.size() ? solution.inequality_multipliers
                                                                             : VectorXd::Zero(ev.inequality.size());
    y.bound = solution.bound_multipliers.size() == solution.parameters.size()
                  ? solution.bound_multipliers
                  : VectorXd::Zero(solution.parameters.size());
    return kkt_from(ev, solution.parameters, graph.lower_bounds(), graph.upper_bounds(), y);
}

NlpSolution solve_nlp(Hypergraph& graph, const SolverOptions& options, const NlpSolution* warm)
{
    const auto t_start = std::chrono::steady_clock::now();
    if (!graph.finalized()) graph.finalize();

    NlpSolution sol;
    const int n = graph.parameter_count();
    if (n == 0)
    {
        sol.status  = SolveStatus::error;
        sol.message = "no free parameters";
        return sol;
    }
    const VectorXd lb = graph.lower_bounds();
    const VectorXd ub = graph.upper_bounds();
    const int m_eq    = graph.equality_count();
    const int m_in    = graph.inequality_count();
    const std::vector<int> bounded = bounded_indices(lb, ub);
    const int m_b     = static_cast<int>(bounded.size());

    VectorXd x = graph.parameters().cwiseMax(lb).cwiseMin(ub);
    if (!x.allFinite())
    {
        sol.status  = SolveStatus::error;
        sol.message = "non-finite initial parameters";
        return sol;
    }

    Multipliers y{VectorXd::Zero(m_eq), VectorXd::Zero(m_in), VectorXd::Zero(n)};
    if (warm && warm->equality_multipliers.size() == m_eq && warm->inequality_multipliers.size() == m_in &&
        warm->bound_multipliers.size() == n)
    {
        y.eq    = warm->equality_multipliers;
        y.in    = warm->inequality_multipliers;
        y.bound = warm->bound_multipliers;
    }

    QpSettings qp_settings;
    qp_settings.max_iterations = options.qp_max_iterations;
    QpSolver qp_solver(qp_settings);
    QpSolver elastic_solver(qp_settings);

    if (options.trace)
        *options.trace << "iteration,objective,feasibility,stationarity,step_norm,alpha,penalty,qp_iterations,regularization\n";

    auto finish = [&](SolveStatus status, const NlpEvaluation* ev, std::string message) {
        graph.set_parameters(x);
        sol.parameters             = x;
        sol.equality_multipliers   = y.eq;
        sol.inequality_multipliers = y.in;
        sol.bound_multipliers      = y.bound;
        sol.status                 = status;
        sol.message                = std::move(message);
        if (ev)
        {
            sol.objective     = ev->objective;
            sol.max_violation = std::max(violation_inf(ev->equality, ev->inequality), bound_violation(x, lb, ub));
            sol.kkt_stationarity = kkt_from(*ev, x, lb, ub, y).stationarity;
        }
        sol.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
        return sol;
    };

    double penalty        = options.merit_penalty;
    double rho            = options.regularization;
    double best_feas      = inf;
    int stall             = 0;
    int infeasible_qps    = 0;

    NlpEvaluation ev;
    try
    {
        ev = evaluate_derivatives(graph, x, options.derivatives);
    }
    catch (const EvaluationError& e)
    {
        return finish(SolveStatus::error, nullptr, e.what());
    }

    for (int iter = 0;; ++iter)
    {
        sol.iterations = iter;
        const KktResidual kkt = kkt_from(ev, x, lb, ub, y);
        if (kkt.feasibility <= options.eps_feas && kkt.stationarity <= options.eps_kkt &&
            kkt.complementarity <= options.eps_kkt)
            return finish(SolveStatus::optimal, &ev, "converged");
        if (iter >= options.sqp_max_iterations) return finish(SolveStatus::max_iter, &ev, "iteration limit");

        // Feasibility stagnation means no nearby feasible point.
        if (kkt.feasibility < 0.99 * best_feas)
        {
            best_feas = kkt.feasibility;
            stall     = 0;
        }
        else if (kkt.feasibility > options.eps_feas && ++stall >= options.stagnation_iterations)
        {
            return finish(SolveStatus::infeasible, &ev, "constraint violation stagnates");
        }

        // Quadratic subproblem in the step d.
        const VectorXd d_lb = lb - x;
        const VectorXd d_ub = ub - x;
        QpResult qp;
        bool qp_ok = false;
        bool elastic = false;
        SparseMatrix H;
        {
            H                 = regularized(options.objective_hessian ? ev.objective_hessian : SparseMatrix(n, n), rho);
            QpProblem problem = QpProblem::from_parts(H, ev.gradient, ev.equality_jacobian, -ev.equality,
                                                      ev.inequality_jacobian, -ev.inequality, d_lb, d_ub);
            const VectorXd d_warm = VectorXd::Zero(n);
            qp = qp_solver.solve(problem, &d_warm);
            sol.qp_iterations += qp.iterations;
            qp_ok = acceptable(qp);
            if (qp.status == QpStatus::dual_infeasible)
                return finish(SolveStatus::error, &ev, "QP subproblem unbounded");
            // Unsolved subproblems are treated as inconsistent linearizations;
            // the Hessian regularization is raised for the next iterations.
            if (!qp_ok) rho = std::min(10.0 * rho, options.regularization_max);
        }

        VectorXd d;
        Multipliers y_new{VectorXd::Zero(m_eq), VectorXd::Zero(m_in), VectorXd::Zero(n)};
        if (qp_ok)
        {
            infeasible_qps = 0;
            d              = qp.x;
            y_new.eq       = qp.y.head(m_eq);
            y_new.in       = qp.y.segment(m_eq, m_in).cwiseMax(0.0);
            for (int k = 0; k < m_b; ++k) y_new.bound[bounded[k]] = qp.y[m_eq + m_in + k];
        }
        else
        {
            // Elastic mode: minimize the linearized l1 violation with slacks.
            elastic                 = true;
            const double pen_el     = std::max(penalty, 100.0);
            const int ns            = 2 * m_eq + m_in;
            std::vector<Triplet> th, te, ti;
            for (int k = 0; k < H.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(H, k); it; ++it) th.emplace_back(it.row(), it.col(), it.value());
            for (int s = 0; s < ns; ++s) th.emplace_back(n + s, n + s, rho);
            for (int k = 0; k < ev.equality_jacobian.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(ev.equality_jacobian, k); it; ++it)
                    te.emplace_back(it.row(), it.col(), it.value());
            for (int i = 0; i < m_eq; ++i)
            {
                te.emplace_back(i, n + i, 1.0);
                te.emplace_back(i, n + m_eq + i, -1.0);
            }
            for (int k = 0; k < ev.inequality_jacobian.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(ev.inequality_jacobian, k); it; ++it)
                    ti.emplace_back(it.row(), it.col(), it.value());
            for (int i = 0; i < m_in; ++i) ti.emplace_back(i, n + 2 * m_eq + i, -1.0);
            SparseMatrix He(n + ns, n + ns), Ae(m_eq, n + ns), Ai(m_in, n + ns);
            He.setFromTriplets(th.begin(), th.end());
            Ae.setFromTriplets(te.begin(), te.end());
            Ai.setFromTriplets(ti.begin(), ti.end());
            VectorXd ge(n + ns), lbe(n + ns), ube(n + ns);
            ge << ev.gradient, VectorXd::Constant(ns, pen_el);
            lbe << d_lb, VectorXd::Zero(ns);
            ube << d_ub, VectorXd::Constant(ns, inf);
            const QpProblem eproblem = QpProblem::from_parts(He, ge, Ae, -ev.equality, Ai, -ev.inequality, lbe, ube);
            const QpResult eq = elastic_solver.solve(eproblem);
            sol.qp_iterations += eq.iterations;
            if (!acceptable(eq)) return finish(SolveStatus::error, &ev, "elastic QP failure");
            d        = eq.x.head(n);
            y_new.eq = eq.y.head(m_eq);
            y_new.in = eq.y.segment(m_eq, m_in).cwiseMax(0.0);
            // Bound rows of the elastic problem: the parameter bounds come first.
            const std::vector<int> bounded_e = bounded_indices(lbe, ube);
            for (std::size_t k = 0; k < bounded_e.size(); ++k)
                if (bounded_e[k] < n) y_new.bound[bounded_e[k]] = eq.y[m_eq + m_in + static_cast<int>(k)];
            penalty = std::max(penalty, pen_el);
        }

        // Linearized violation after the step decides the merit slope.
        const VectorXd lin_eq = ev.equality + ev.equality_jacobian * d;
        const VectorXd lin_in = ev.inequality + ev.inequality_jacobian * d;
        const double viol0    = violation_l1(ev.equality, ev.inequality);
        const double viol_lin = violation_l1(lin_eq, lin_in);
        // Elastic steps that cannot reduce the linearized violation point to a
        // stationary point of the violation.
        if (elastic && viol_lin > 0.99 * viol0)
            ++infeasible_qps;
        else if (elastic)
            infeasible_qps = 0;
        if (infeasible_qps >= kElasticStallLimit)
            return finish(SolveStatus::infeasible, &ev, "linearized constraints infeasible");

        const double y_max = std::max(inf_norm(y_new.eq), inf_norm(y_new.in));
        penalty            = std::max(penalty, 1.1 * y_max);

        const double merit0 = ev.objective + penalty * viol0;
        const double slope  = ev.gradient.dot(d) + penalty * (viol_lin - viol0);

        auto merit_at = [&](const VectorXd& p, double& value) {
            try
            {
                const NlpResiduals r = evaluate_residuals(graph, p);
                value                = r.objective + penalty * violation_l1(r.equality, r.inequality);
                return std::isfinite(value);
            }
            catch (const EvaluationError&)
            {
                return false;
            }
        };
        auto sufficient = [&](double value, double alpha) {
            return value <= merit0 + options.armijo * alpha * std::min(slope, 0.0) +
                                1e-14 * std::max(1.0, std::abs(merit0));
        };

        double alpha   = 1.0;
        bool accepted  = false;
        VectorXd x_new = (x + d).cwiseMax(lb).cwiseMin(ub);
        double merit   = 0.0;
        if (merit_at(x_new, merit) && sufficient(merit, 1.0))
        {
            accepted = true;
        }
        else if (options.second_order_correction && qp_ok)
        {
            // Second-order correction against the Maratos effect.
            try
            {
                const NlpResiduals r = evaluate_residuals(graph, x_new);
                const VectorXd c_eq  = r.equality - ev.equality_jacobian * d;
                const VectorXd c_in  = r.inequality - ev.inequality_jacobian * d;
                QpProblem soc = QpProblem::from_parts(H, ev.gradient, ev.equality_jacobian, -c_eq,
                                                      ev.inequality_jacobian, -c_in, d_lb, d_ub);
                const QpResult qs = qp_solver.solve(soc, &d, &qp.y);
                sol.qp_iterations += qs.iterations;
                if (acceptable(qs))
                {
                    const VectorXd x_soc = (x + qs.x).cwiseMax(lb).cwiseMin(ub);
                    double m_soc         = 0.0;
                    if (merit_at(x_soc, m_soc) && sufficient(m_soc, 1.0))
                    {
                        x_new    = x_soc;
                        merit    = m_soc;
                        accepted = true;
                    }
                }
            }
            catch (const EvaluationError&)
            {
            }
        }
        while (!accepted)
        {
            alpha *= options.backtracking;
            if (alpha < options.min_step) break;
            x_new = (x + alpha * d).cwiseMax(lb).cwiseMin(ub);
            if (merit_at(x_new, merit) && sufficient(merit, alpha)) accepted = true;
        }
        if (!accepted)
        {
            // A step that cannot decrease the merit: converged as far as the
            // derivatives allow, or stuck.
            y = y_new;
            const KktResidual k2 = kkt_from(ev, x, lb, ub, y);
            if (k2.feasibility <= options.eps_feas && k2.stationarity <= options.eps_kkt &&
                k2.complementarity <= options.eps_kkt)
                return finish(SolveStatus::optimal, &ev, "converged");
            return finish(k2.feasibility > options.eps_feas ? SolveStatus::infeasible : SolveStatus::error, &ev,
                          "line search failed");
        }

        sol.merit_history.emplace_back(merit0, merit);
        const double step_norm = inf_norm(x_new - x);
        x                      = x_new;
        y                      = y_new;
        if (qp_ok) rho = std::max(options.regularization, 0.1 * rho);

        try
        {
            ev = evaluate_derivatives(graph, x, options.derivatives);
        }
        catch (const EvaluationError& e)
        {
            return finish(SolveStatus::error, nullptr, e.what());
        }

        if (options.trace)
        {
            *options.trace << iter + 1 << ',' << ev.objective << ','
                           << std::max(violation_inf(ev.equality, ev.inequality), bound_violation(x, lb, ub)) << ','
                           << kkt_from(ev, x, lb, ub, y).stationarity << ',' << step_norm << ',' << alpha << ','
                           << penalty << ',' << qp.iterations << ',' << rho << '\n';
        }
    }
}

}  // namespace qtmpc
