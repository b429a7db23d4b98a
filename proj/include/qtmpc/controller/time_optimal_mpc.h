#ifndef QTMPC_CONTROLLER_TIME_OPTIMAL_MPC_H_
#define QTMPC_CONTROLLER_TIME_OPTIMAL_MPC_H_

#include <qtmpc/controller/adaptation.h>
#include <qtmpc/transcription/grid_ocp.h>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace qtmpc {

/// One control decision: u held constant for `hold` seconds.
struct ControlDecision
{
    VectorXd u;
    double hold    = 0.0;
    std::string mode;  // mpc, lqr
    int N          = 0;
    double cpu_ms  = 0.0;
    bool warning   = false;  // applied despite an unconverged solve
};

/// Anything closed_loop_run can drive.
class FeedbackController
{
 public:
    virtual ~FeedbackController() = default;
    virtual ControlDecision decide(const VectorXd& x) = 0;
    virtual const VectorXd& target() const = 0;
    /// New set point; invalidates warm starts.
    virtual void set_target(const VectorXd& x_f) = 0;
};

/// Raised when the OCP cannot be solved. Carries the previously applied
/// control (empty on a cold start) for a zero-order-hold fallback.
class ControllerError : public std::runtime_error
{
 public:
    ControllerError(const std::string& what, SolveStatus status, VectorXd fallback)
        : std::runtime_error(what), _status(status), _fallback(std::move(fallback))
    {
    }
    SolveStatus status() const { return _status; }
    const VectorXd& fallback() const { return _fallback; }
    bool degraded() const { return _fallback.size() > 0; }

 private:
    SolveStatus _status;
    VectorXd _fallback;
};

struct MpcConfig
{
    Model::Ptr model;
    Integrator integrator;
    GridType grid = GridType::local_uniform;
    TerminalSet terminal;
    double dt_min = 1e-3;
    double dt_max = 0.05;
    AdaptationConfig adaptation;
    SolverOptions solver;
    /// max_iter solves with a smaller violation are applied with a warning.
    double max_iter_violation = 1e-5;

    void validate() const;
};

struct ControllerState
{
    int N          = 0;
    double last_dt = 0.0;
    int step       = 0;
    SolveStatus last_status = SolveStatus::error;
    bool degraded  = false;
    bool warning   = false;
    VectorXd last_u;
    double last_t_f = 0.0;
    int last_iterations = 0;
    std::optional<GridOcp> ocp;  // OCP of the last successful solve
    NlpSolution solution;
};

/**
 * Time-optimal MPC with grid adaptation: at every sampling instant solve the
 * minimum-time OCP from the measured state with N_n intervals, apply the first
 * control for the optimal interval length, then update N_n.
 */
class TimeOptimalMpc : public FeedbackController
{
 public:
    explicit TimeOptimalMpc(MpcConfig config);

    ControlDecision decide(const VectorXd& x) override;
    const VectorXd& target() const override { return _config.terminal.target; }
    void set_target(const VectorXd& x_f) override;

    /// Drops warm starts and returns to N_initial.
    void reset();

    const MpcConfig& config() const { return _config; }
    const ControllerState& state() const { return _state; }
    /// Predicted trajectory of the last successful solve.
    OcpTrajectory prediction() const;

 private:
    MpcConfig _config;
    ControllerState _state;
};

}  // namespace qtmpc

#endif  // QTMPC_CONTROLLER_TIME_OPTIMAL_MPC_H_
