#ifndef QTMPC_TRANSCRIPTION_GRID_OCP_H_
#define QTMPC_TRANSCRIPTION_GRID_OCP_H_

#include <qtmpc/dynamics/integrator.h>
#include <qtmpc/dynamics/model.h>
#include <qtmpc/hypergraph/hypergraph.h>
#include <qtmpc/solver/sqp_solver.h>

#include <string_view>
#include <vector>

namespace qtmpc {

enum class GridType
{
    global_uniform,  // one shared dt
    local_uniform    // dt per interval, tied by equality constraints
};

std::string_view to_string(GridType grid);
GridType grid_type_from_string(std::string_view name);

struct TerminalSet
{
    enum class Kind
    {
        point,
        box
    };

    Kind kind = Kind::point;
    VectorXd target;
    VectorXd half_width;  // box only

    static TerminalSet point(const VectorXd& x_f) { return {Kind::point, x_f, VectorXd::Zero(x_f.size())}; }
    static TerminalSet box(const VectorXd& x_f, const VectorXd& half_width) { return {Kind::box, x_f, half_width}; }
};

struct OcpSpec
{
    Model::Ptr model;
    Integrator integrator;
    GridType grid = GridType::local_uniform;
    VectorXd x_s;
    TerminalSet terminal;
    int N         = 10;
    double dt_min = 0.0;
    double dt_max = 0.1;
    /// Without it the caller adds its own objective edges (fixed-grid baselines).
    bool time_objective = true;
};

/// Unpacked grid trajectory: N+1 states, N controls, N interval lengths.
struct OcpTrajectory
{
    std::vector<VectorXd> states;
    std::vector<VectorXd> controls;
    std::vector<double> dt;

    int N() const { return static_cast<int>(controls.size()); }
    double t_f() const;
    /// Controls on a uniform grid with the first interval length.
    PiecewiseConstantControl control() const;
};

/**
 * Minimum-time OCP on a uniform grid with free interval length, as a hypergraph.
 *
 * Vertices are added in the order x_0, u_0, x_1, u_1, ..., x_{N-1}, u_{N-1},
 * x_N, dt_0[, dt_1, ...], so the free parameter vector reads
 * u_0, x_1, u_1, ..., x_{N-1}, u_{N-1}, dt(s). Edges: N dynamics edges, then the
 * uniformity edges (local grid), then the objective edges.
 * When dt_min == dt_max the interval is fixed.
 */
class GridOcp
{
 public:
    explicit GridOcp(const OcpSpec& spec);

    static GridOcp build_global_uniform(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                                        const TerminalSet& terminal, int N, double dt_min, double dt_max);
    static GridOcp build_local_uniform(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                                       const TerminalSet& terminal, int N, double dt_min, double dt_max);

    const OcpSpec& spec() const { return _spec; }
    int N() const { return _spec.N; }
    Hypergraph& graph() { return _graph; }
    const Hypergraph& graph() const { return _graph; }

    int state_vertex(int k) const { return _state_ids.at(k); }
    int control_vertex(int k) const { return _control_ids.at(k); }
    int dt_vertex(int k) const { return _dt_ids.at(_spec.grid == GridType::global_uniform ? 0 : k); }

    /// States interpolated linearly from x_s to the target, controls zero
    /// (projected onto the bounds), dt = dt_max / 2.
    void initialize_default();
    void set_trajectory(const OcpTrajectory& trajectory);
    OcpTrajectory trajectory() const;
    OcpTrajectory trajectory(const VectorXd& parameters) const;

    NlpSolution solve(const SolverOptions& options = {}, const NlpSolution* warm = nullptr);

 private:
    OcpSpec _spec;
    Hypergraph _graph;
    std::vector<int> _state_ids;
    std::vector<int> _control_ids;
    std::vector<int> _dt_ids;
};

struct WarmStartedOcp
{
    GridOcp ocp;
    NlpSolution warm;  // multipliers mapped onto the new graph (empty when not mappable)
};

/**
 * Rebuilds the OCP for new_N at new_x_s, initialized from the previous
 * solution. Shrinking by one drops the first interval; keeping N and x_s
 * reuses the solution as is; any other change resamples the remaining
 * trajectory onto the new grid.
 */
WarmStartedOcp shrink_and_warmstart(const GridOcp& ocp, const NlpSolution& previous, const VectorXd& new_x_s,
                                    int new_N);

}  // namespace qtmpc

#endif  // QTMPC_TRANSCRIPTION_GRID_OCP_H_
