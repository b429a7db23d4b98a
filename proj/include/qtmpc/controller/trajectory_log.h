#ifndef QTMPC_CONTROLLER_TRAJECTORY_LOG_H_
#define QTMPC_CONTROLLER_TRAJECTORY_LOG_H_

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qtmpc {

using Eigen::VectorXd;

struct LogEntry
{
    double t = 0.0;
    VectorXd x;
    VectorXd u;
    double dt_applied = 0.0;
    int N             = 0;
    double cpu_ms     = 0.0;
    std::string mode;  // mpc, lqr, fallback, tompc, l1
};

enum class StopReason
{
    none,
    target_reached,
    max_time,
    max_steps,
    controller_error
};

std::string_view to_string(StopReason reason);

/**
 * Closed-loop or open-loop trajectory. Each entry holds the state at the start
 * of an interval and the control applied over it; the state reached at the
 * end of the run is kept separately and written as a last row without control.
 */
struct TrajectoryLog
{
    int state_dim   = 0;
    int control_dim = 0;
    std::vector<LogEntry> entries;
    double final_time = 0.0;
    VectorXd final_state;
    StopReason stop = StopReason::none;
    std::string message;

    void add(LogEntry entry);
    bool empty() const { return entries.empty(); }

    /// Columns t, x1..xp, u1..uq, dt_applied, N, cpu_ms, mode.
    std::string csv_header() const;
    void write_csv(std::ostream& os) const;
    void save_csv(const std::string& path) const;
    static TrajectoryLog read_csv(std::istream& is);

    /// Count of mode changes between consecutive entries.
    int mode_switches() const;
};

}  // namespace qtmpc

#endif  // QTMPC_CONTROLLER_TRAJECTORY_LOG_H_
