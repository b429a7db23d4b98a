#ifndef QTMPC_BASELINES_L1_MPC_H_
#define QTMPC_BASELINES_L1_MPC_H_

#include <qtmpc/transcription/grid_ocp.h>

#include <vector>

namespace qtmpc {

struct L1Config
{
    double dt    = 0.1;
    int N        = 16;
    double theta = 1.1;
    VectorXd weights;  // per state, empty: ones
    SolverOptions solver;

    void validate(int state_dim) const;
};

struct L1Result
{
    SolveStatus status = SolveStatus::error;
    OcpTrajectory trajectory;
    std::vector<VectorXd> slacks;  // stages 1..N-1
    double cost    = 0.0;
    double wall_ms = 0.0;
    std::string message;
};

/**
 * Fixed-grid OCP with cost sum_k theta^k ||W (x_k - x_f)||_1, realized with
 * slack vertices s_k >= +-W (x_k - x_f), and terminal equality x_N = x_f.
 */
L1Result l1_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s, const VectorXd& x_f,
                  const L1Config& cfg);

}  // namespace qtmpc

#endif  // QTMPC_BASELINES_L1_MPC_H_
