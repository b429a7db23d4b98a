#include <qtmpc/controller/time_optimal_mpc.h>

#include <chrono>

namespace qtmpc {

void MpcConfig::validate() const
{
    if (!model) throw std::invalid_argument("MpcConfig: missing model");
    if (terminal.target.size() != model->state_dim())
        throw std::invalid_argument("MpcConfig: target dimension mismatch");
    if (!(dt_min >= 0.0 && dt_min <= dt_max)) throw std::invalid_argument("MpcConfig: need 0 <= dt_min <= dt_max");
    adaptation.validate();
}

TimeOptimalMpc::TimeOptimalMpc(MpcConfig config) : _config(std::move(config))
{
    _config.validate();
    reset();
}

void TimeOptimalMpc::reset()
{
    const VectorXd last_u = _state.last_u;
    _state                = ControllerState{};
    _state.N              = _config.adaptation.N_initial;
    _state.last_u         = last_u;
}

void TimeOptimalMpc::set_target(const VectorXd& x_f)
{
    if (x_f.size() != _config.model->state_dim()) throw std::invalid_argument("set_target: dimension mismatch");
    _config.terminal.target = x_f;
    reset();
}

OcpTrajectory TimeOptimalMpc::prediction() const
{
    if (!_state.ocp) return {};
    return _state.ocp->trajectory(_state.solution.parameters);
}

ControlDecision TimeOptimalMpc::decide(const VectorXd& x)
{
    const auto start = std::chrono::steady_clock::now();
    const int N      = _state.N;

    std::optional<GridOcp> ocp;
    NlpSolution warm;
    bool have_warm = false;
    if (_state.ocp)
    {
        WarmStartedOcp ws = shrink_and_warmstart(*_state.ocp, _state.solution, x, N);
        ocp.emplace(std::move(ws.ocp));
        warm      = std::move(ws.warm);
        have_warm = warm.parameters.size() > 0;
    }
    else
    {
        OcpSpec spec{_config.model, _config.integrator, _config.grid, x, _config.terminal, N, _config.dt_min,
                     _config.dt_max};
        ocp.emplace(spec);
    }

    NlpSolution sol = ocp->solve(_config.solver, have_warm ? &warm : nullptr);

    // A failed warm start gets one cold retry before giving up.
    if (!sol.ok() && have_warm)
    {
        OcpSpec spec{_config.model, _config.integrator, _config.grid, x, _config.terminal, N, _config.dt_min,
                     _config.dt_max};
        GridOcp cold(spec);
        NlpSolution retry = cold.solve(_config.solver);
        if (retry.ok() || (retry.status == SolveStatus::max_iter && sol.status != SolveStatus::max_iter))
        {
            ocp.emplace(std::move(cold));
            sol = std::move(retry);
        }
    }

    _state.last_status     = sol.status;
    _state.last_iterations = sol.iterations;
    const bool usable_max_iter =
        sol.status == SolveStatus::max_iter && sol.max_violation < _config.max_iter_violation;
    if (!sol.ok() && !usable_max_iter)
    {
        _state.degraded = true;
        throw ControllerError("time-optimal OCP " + std::string(to_string(sol.status)) + ": " + sol.message,
                              sol.status, _state.last_u);
    }

    const OcpTrajectory traj = ocp->trajectory(sol.parameters);
    ControlDecision d;
    d.u       = traj.controls.front();
    d.hold    = traj.dt.front();
    d.mode    = "mpc";
    d.N       = N;
    d.warning = usable_max_iter;
    d.cpu_ms  = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    _state.warning  = usable_max_iter;
    _state.degraded = false;
    _state.last_u   = d.u;
    _state.last_dt  = d.hold;
    _state.last_t_f = traj.t_f();
    _state.solution = std::move(sol);
    _state.ocp.emplace(std::move(*ocp));
    ++_state.step;
    _state.N = adapt_grid(_config.adaptation, N, d.hold);
    return d;
}

}  // namespace qtmpc
