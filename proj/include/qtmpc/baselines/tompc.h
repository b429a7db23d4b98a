#ifndef QTMPC_BASELINES_TOMPC_H_
#define QTMPC_BASELINES_TOMPC_H_

#include <qtmpc/transcription/grid_ocp.h>

#include <utility>
#include <vector>

namespace qtmpc {

struct TompcConfig
{
    double dt = 0.1;
    int N_max = 30;
    MatrixXd Q_s;  // empty: identity
    SolverOptions solver;

    void validate(int state_dim) const;
};

struct TompcResult
{
    int N_star         = 0;
    SolveStatus status = SolveStatus::error;
    OcpTrajectory trajectory;  // at N_star
    double cost        = 0.0;
    std::vector<std::pair<int, SolveStatus>> trials;  // (N, status) in search order
    double wall_ms     = 0.0;
};

/**
 * Two-layer settling-time minimization: fixed-interval quadratic-cost OCPs
 * with terminal equality for N = N_max, N_max - 1, ... until one fails; the
 * smallest feasible N is N*.
 */
TompcResult tompc_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s, const VectorXd& x_f,
                        const TompcConfig& cfg);

/// Inner fixed-horizon OCP of TOMPC (exposed for bracketing checks).
NlpSolution tompc_inner_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                              const VectorXd& x_f, int N, const TompcConfig& cfg, OcpTrajectory* trajectory = nullptr);

}  // namespace qtmpc

#endif  // QTMPC_BASELINES_TOMPC_H_
