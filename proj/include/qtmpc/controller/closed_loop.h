#ifndef QTMPC_CONTROLLER_CLOSED_LOOP_H_
#define QTMPC_CONTROLLER_CLOSED_LOOP_H_

#include <qtmpc/controller/time_optimal_mpc.h>
#include <qtmpc/controller/trajectory_log.h>

#include <utility>
#include <vector>

namespace qtmpc {

struct Plant
{
    Model::Ptr model;
    Integrator integrator;
    int substeps = 1;  // integrator steps per applied hold
};

struct StopCriteria
{
    double max_time      = 10.0;
    double target_radius = 0.05;  // <= 0 disables the target-ball stop
    int max_steps        = 100000;
};

/// Piecewise-constant set point: (switch time, x_f) pairs in increasing time.
using ReferenceSchedule = std::vector<std::pair<double, VectorXd>>;

struct ClosedLoopOptions
{
    StopCriteria stop;
    /// > 0: fixed-rate sample-and-hold instead of the controller's own hold durations.
    double sample_period = 0.0;
    ReferenceSchedule references;
};

/**
 * Alternates controller decisions and plant simulation over each hold
 * duration. Stops on target-ball entry (distance to the current set point),
 * max time/steps, or a controller error; the log is always returned.
 */
TrajectoryLog closed_loop_run(const Plant& plant, FeedbackController& controller, const VectorXd& x0,
                              const ClosedLoopOptions& options = {});

}  // namespace qtmpc

#endif  // QTMPC_CONTROLLER_CLOSED_LOOP_H_
