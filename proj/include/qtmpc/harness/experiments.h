#ifndef QTMPC_HARNESS_EXPERIMENTS_H_
#define QTMPC_HARNESS_EXPERIMENTS_H_

#include <qtmpc/controller/trajectory_log.h>
#include <qtmpc/dual_mode/dual_mode_controller.h>
#include <qtmpc/harness/config.h>
#include <qtmpc/harness/metrics.h>

#include <memory>
#include <string>

namespace qtmpc {

Model::Ptr model_from_config(const ExperimentConfig& cfg);
Integrator integrator_from_config(const ExperimentConfig& cfg);
MpcConfig mpc_config_from(const ExperimentConfig& cfg);

struct OpenLoopResult
{
    SolveStatus status = SolveStatus::error;
    OcpTrajectory trajectory;
    int N            = 0;
    double t_f       = 0.0;
    int iterations   = 0;
    double wall_ms   = 0.0;  // solver only
    std::string message;
    std::shared_ptr<GridOcp> ocp;  // grid methods only
};

/// Open-loop solve of the configured task with the configured method (dual_mode solves its MPC OCP).
OpenLoopResult solve_open_loop(const ExperimentConfig& cfg, std::ostream* trace = nullptr);

/// Open-loop solution as a log (mode column: mpc, tompc or l1).
TrajectoryLog open_loop_log(const ExperimentConfig& cfg, const OpenLoopResult& result);

/// Fine local-grid solve with reference_N intervals; throws std::runtime_error when it fails.
DenseTrajectory reference_solution(const ExperimentConfig& cfg);

struct DualModeParts
{
    LqrGain lqr;
    VectorXd u_ref;
    Ellipse region;
};

/// LQR at x_f (Euler discretization at the LQR sample time) and X_lin (configured or estimated).
DualModeParts dual_mode_parts(const ExperimentConfig& cfg);

/// Closed loop for local_grid, global_grid or dual_mode.
TrajectoryLog simulate_closed_loop(const ExperimentConfig& cfg);

RegionEstimate controllability_region(const ExperimentConfig& cfg);
RoaEstimate region_of_attraction(const ExperimentConfig& cfg);

// Reference setups.

/// Shape matrix of the reference X_lin ellipse for the Van der Pol dual-mode setup.
MatrixXd vdp_x_lin_shape();

/// Open-loop benchmark task: Van der Pol from (0, 0) to (0.8, 0), dt in [1e-3, 1].
ExperimentConfig table1_config(Method method, int N);

/// Closed-loop task: Van der Pol to the origin, N = 50, N_min = 3, dt in [1e-3, 0.05].
ExperimentConfig vdp_closed_loop_config(const VectorXd& x_s, bool dual_mode);

}  // namespace qtmpc

#endif  // QTMPC_HARNESS_EXPERIMENTS_H_
