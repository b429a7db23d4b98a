#include <qtmpc/baselines/tompc.h>

#include <qtmpc/transcription/edges.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <memory>

namespace qtmpc {

void TompcConfig::validate(int state_dim) const
{
    if (!(dt > 0.0)) throw std::invalid_argument("TompcConfig: dt must be positive");
    if (N_max < 1) throw std::invalid_argument("TompcConfig: N_max must be at least 1");
    if (Q_s.size() > 0)
    {
        if (Q_s.rows() != state_dim || Q_s.cols() != state_dim)
            throw std::invalid_argument("TompcConfig: Q_s dimension mismatch");
        if (Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (Q_s + Q_s.transpose())).eigenvalues().minCoeff() < -1e-12)
            throw std::invalid_argument("TompcConfig: Q_s must be positive semidefinite");
    }
}

NlpSolution tompc_inner_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                              const VectorXd& x_f, int N, const TompcConfig& cfg, OcpTrajectory* trajectory)
{
    const int p = model->state_dim();
    const MatrixXd Q = cfg.Q_s.size() > 0 ? cfg.Q_s : MatrixXd::Identity(p, p);
    OcpSpec spec{model, integrator, GridType::global_uniform, x_s, TerminalSet::point(x_f), N, cfg.dt, cfg.dt};
    spec.time_objective = false;
    GridOcp ocp(spec);
    for (int k = 1; k < N; ++k)
        ocp.graph().add_edge(std::make_shared<QuadraticStateEdge>(ocp.state_vertex(k), x_f, Q, k));
    ocp.graph().finalize();
    NlpSolution sol = ocp.solve(cfg.solver);
    if (trajectory) *trajectory = ocp.trajectory(sol.parameters);
    return sol;
}

TompcResult tompc_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s, const VectorXd& x_f,
                        const TompcConfig& cfg)
{
    if (!model) throw std::invalid_argument("tompc_solve: missing model");
    cfg.validate(model->state_dim());
    const auto start = std::chrono::steady_clock::now();
    TompcResult out;
    for (int N = cfg.N_max; N >= 1; --N)
    {
        OcpTrajectory traj;
        const NlpSolution sol = tompc_inner_solve(model, integrator, x_s, x_f, N, cfg, &traj);
        out.trials.emplace_back(N, sol.status);
        if (!sol.ok()) break;
        out.N_star     = N;
        out.status     = SolveStatus::optimal;
        out.trajectory = std::move(traj);
        out.cost       = sol.objective;
    }
    if (out.N_star == 0) out.status = out.trials.empty() ? SolveStatus::error : out.trials.front().second;
    if (out.N_star == 0 && out.status == SolveStatus::optimal) out.status = SolveStatus::infeasible;
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace qtmpc
