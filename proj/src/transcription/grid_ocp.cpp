#include <qtmpc/transcription/grid_ocp.h>

#include <qtmpc/transcription/edges.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace qtmpc {

std::string_view to_string(GridType grid)
{
    return grid == GridType::global_uniform ? "global_grid" : "local_grid";
}

GridType grid_type_from_string(std::string_view name)
{
    if (name == "global_grid" || name == "global_uniform" || name == "global") return GridType::global_uniform;
    if (name == "local_grid" || name == "local_uniform" || name == "local") return GridType::local_uniform;
    throw std::invalid_argument("unknown grid type '" + std::string(name) + "'");
}

double OcpTrajectory::t_f() const
{
    double t = 0.0;
    for (double d : dt) t += d;
    return t;
}

PiecewiseConstantControl OcpTrajectory::control() const
{
    return PiecewiseConstantControl(controls, dt.empty() ? 0.0 : dt.front());
}

GridOcp::GridOcp(const OcpSpec& spec) : _spec(spec)
{
    if (!_spec.model) throw std::invalid_argument("GridOcp: missing model");
    if (_spec.N < 1) throw std::invalid_argument("GridOcp: N must be at least 1");
    if (_spec.dt_min < 0.0 || _spec.dt_min > _spec.dt_max)
        throw std::invalid_argument("GridOcp: need 0 <= dt_min <= dt_max");
    const Model& model = *_spec.model;
    const int p        = model.state_dim();
    const int q        = model.control_dim();
    if (_spec.x_s.size() != p || _spec.terminal.target.size() != p)
        throw std::invalid_argument("GridOcp: start/target dimension mismatch");
    if (_spec.terminal.kind == TerminalSet::Kind::box && _spec.terminal.half_width.size() != p)
        throw std::invalid_argument("GridOcp: terminal box dimension mismatch");

    const int N              = _spec.N;
    const bool point_target  = _spec.terminal.kind == TerminalSet::Kind::point;
    const Box& xb            = model.state_bounds();
    const Box& ub            = model.control_bounds();

    auto add_state = [&](int k, const VectorXd& value, bool fixed) {
        Vertex v = Vertex::make(VertexKind::state, k, value, fixed);
        if (xb.dim() == p)
        {
            v.lower = xb.lower;
            v.upper = xb.upper;
        }
        return _graph.add_vertex(std::move(v));
    };

    _state_ids.push_back(add_state(0, _spec.x_s, true));
    for (int k = 0; k < N; ++k)
    {
        Vertex u = Vertex::make(VertexKind::control, k, VectorXd::Zero(q));
        if (ub.dim() == q)
        {
            u.lower = ub.lower;
            u.upper = ub.upper;
        }
        _control_ids.push_back(_graph.add_vertex(std::move(u)));
        if (k + 1 < N)
        {
            _state_ids.push_back(add_state(k + 1, _spec.x_s, false));
        }
        else if (point_target)
        {
            _state_ids.push_back(add_state(N, _spec.terminal.target, true));
        }
        else
        {
            const int id = add_state(N, _spec.terminal.target, false);
            Vertex& v    = _graph.vertex(id);
            v.lower      = v.lower.cwiseMax(_spec.terminal.target - _spec.terminal.half_width);
            v.upper      = v.upper.cwiseMin(_spec.terminal.target + _spec.terminal.half_width);
            _state_ids.push_back(id);
        }
    }

    const bool fixed_dt  = _spec.dt_min == _spec.dt_max;
    const int dt_count   = _spec.grid == GridType::global_uniform ? 1 : N;
    const double dt_init = fixed_dt ? _spec.dt_max : 0.5 * _spec.dt_max;
    for (int k = 0; k < dt_count; ++k)
    {
        Vertex v = Vertex::make(VertexKind::interval, k, VectorXd::Constant(1, std::max(dt_init, _spec.dt_min)), fixed_dt);
        // Bounds on every interval: redundant under uniformity, but keeps
        // elastic SQP steps away from negative interval lengths.
        v.lower[0] = _spec.dt_min;
        v.upper[0] = _spec.dt_max;
        _dt_ids.push_back(_graph.add_vertex(std::move(v)));
    }

    for (int k = 0; k < N; ++k)
    {
        _graph.add_edge(std::make_shared<DynamicsEdge>(_spec.model, _spec.integrator, _state_ids[k], _control_ids[k],
                                                       dt_vertex(k), _state_ids[k + 1], k));
    }
    if (_spec.grid == GridType::local_uniform && !fixed_dt)
    {
        for (int k = 0; k + 1 < N; ++k) _graph.add_edge(std::make_shared<UniformityEdge>(_dt_ids[k], _dt_ids[k + 1], k));
    }
    if (_spec.time_objective)
    {
        if (_spec.grid == GridType::global_uniform)
            _graph.add_edge(std::make_shared<TimeObjectiveEdge>(_dt_ids[0], static_cast<double>(N)));
        else
            for (int k = 0; k < N; ++k) _graph.add_edge(std::make_shared<TimeObjectiveEdge>(_dt_ids[k], 1.0));
    }

    initialize_default();
    _graph.finalize();
}

GridOcp GridOcp::build_global_uniform(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                                      const TerminalSet& terminal, int N, double dt_min, double dt_max)
{
    return GridOcp(OcpSpec{std::move(model), integrator, GridType::global_uniform, x_s, terminal, N, dt_min, dt_max});
}

GridOcp GridOcp::build_local_uniform(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s,
                                     const TerminalSet& terminal, int N, double dt_min, double dt_max)
{
    return GridOcp(OcpSpec{std::move(model), integrator, GridType::local_uniform, x_s, terminal, N, dt_min, dt_max});
}

void GridOcp::initialize_default()
{
    const int N   = _spec.N;
    const int q   = _spec.model->control_dim();
    const Box& ub = _spec.model->control_bounds();
    VectorXd u0   = VectorXd::Zero(q);
    if (ub.dim() == q) u0 = u0.cwiseMax(ub.lower).cwiseMin(ub.upper);

    OcpTrajectory init;
    for (int k = 0; k <= N; ++k)
    {
        const double s = static_cast<double>(k) / N;
        init.states.push_back((1.0 - s) * _spec.x_s + s * _spec.terminal.target);
    }
    init.controls.assign(N, u0);
    const double dt = _spec.dt_min == _spec.dt_max ? _spec.dt_max : std::max(0.5 * _spec.dt_max, _spec.dt_min);
    init.dt.assign(N, dt);
    set_trajectory(init);
}

void GridOcp::set_trajectory(const OcpTrajectory& trajectory)
{
    const int N = _spec.N;
    if (trajectory.N() != N || static_cast<int>(trajectory.states.size()) != N + 1 ||
        static_cast<int>(trajectory.dt.size()) != N)
        throw std::invalid_argument("GridOcp::set_trajectory: size mismatch");
    for (int k = 0; k <= N; ++k)
    {
        Vertex& v = _graph.vertex(_state_ids[k]);
        if (!v.fixed) v.value = trajectory.states[k];
    }
    for (int k = 0; k < N; ++k) _graph.vertex(_control_ids[k]).value = trajectory.controls[k];
    for (std::size_t i = 0; i < _dt_ids.size(); ++i)
    {
        Vertex& v = _graph.vertex(_dt_ids[i]);
        if (!v.fixed) v.value[0] = trajectory.dt[i];
    }
}

OcpTrajectory GridOcp::trajectory(const VectorXd& parameters) const
{
    const std::vector<VectorXd> values = _graph.values_at(parameters);
    OcpTrajectory t;
    for (int id : _state_ids) t.states.push_back(values[id]);
    for (int id : _control_ids) t.controls.push_back(values[id]);
    for (int k = 0; k < _spec.N; ++k) t.dt.push_back(values[dt_vertex(k)][0]);
    return t;
}

OcpTrajectory GridOcp::trajectory() const { return trajectory(_graph.parameters()); }

NlpSolution GridOcp::solve(const SolverOptions& options, const NlpSolution* warm)
{
    return solve_nlp(_graph, options, warm);
}

namespace {

// State at time t along the grid trajectory (linear between grid points).
VectorXd state_at(const OcpTrajectory& tr, double t)
{
    double t0 = 0.0;
    for (int k = 0; k < tr.N(); ++k)
    {
        const double t1 = t0 + tr.dt[k];
        if (t <= t1 || k + 1 == tr.N())
        {
            const double s = tr.dt[k] > 0.0 ? std::clamp((t - t0) / tr.dt[k], 0.0, 1.0) : 1.0;
            return (1.0 - s) * tr.states[k] + s * tr.states[k + 1];
        }
        t0 = t1;
    }
    return tr.states.back();
}

const VectorXd& control_at(const OcpTrajectory& tr, double t)
{
    double t0 = 0.0;
    for (int k = 0; k < tr.N(); ++k)
    {
        t0 += tr.dt[k];
        if (t < t0) return tr.controls[k];
    }
    return tr.controls.back();
}

}  // namespace

WarmStartedOcp shrink_and_warmstart(const GridOcp& ocp, const NlpSolution& previous, const VectorXd& new_x_s,
                                    int new_N)
{
    if (new_N < 1) throw std::invalid_argument("shrink_and_warmstart: new N must be at least 1");
    const OcpSpec& spec = ocp.spec();
    const int N         = spec.N;
    const int p         = spec.model->state_dim();
    const int q         = spec.model->control_dim();

    OcpSpec next = spec;
    next.x_s     = new_x_s;
    next.N       = new_N;
    WarmStartedOcp out{GridOcp(next), NlpSolution{}};

    const OcpTrajectory prev = ocp.trajectory(previous.parameters);
    const Hypergraph& g_old  = ocp.graph();
    Hypergraph& g_new        = out.ocp.graph();
    const bool multipliers   = previous.equality_multipliers.size() == g_old.equality_count() &&
                             previous.bound_multipliers.size() == g_old.parameter_count();
    const bool same_start    = (new_x_s - spec.x_s).lpNorm<Eigen::Infinity>() == 0.0;

    if (new_N == N && same_start)
    {
        out.ocp.set_trajectory(prev);
        g_new.finalize();
        if (multipliers) out.warm = previous;
        out.warm.parameters = g_new.parameters();
        return out;
    }

    if (new_N == N - 1)
    {
        OcpTrajectory tail;
        tail.states.assign(prev.states.begin() + 1, prev.states.end());
        tail.states.front() = new_x_s;
        tail.controls.assign(prev.controls.begin() + 1, prev.controls.end());
        tail.dt.assign(prev.dt.begin() + 1, prev.dt.end());
        out.ocp.set_trajectory(tail);
        g_new.finalize();
        if (multipliers)
        {
            // Drop the rows of the first dynamics/uniformity edge and the
            // columns of u_0, x_1 (and dt_0 on the local grid).
            const bool local = spec.grid == GridType::local_uniform && spec.dt_min != spec.dt_max;
            NlpSolution& w   = out.warm;
            w.equality_multipliers.setZero(g_new.equality_count());
            w.equality_multipliers.head(p * new_N) = previous.equality_multipliers.segment(p, p * new_N);
            if (local && new_N > 1)
                w.equality_multipliers.tail(new_N - 1) = previous.equality_multipliers.tail(N - 2);
            w.inequality_multipliers.setZero(g_new.inequality_count());
            const int n_new    = g_new.parameter_count();
            const int dt_old   = local ? N : (spec.dt_min != spec.dt_max ? 1 : 0);
            const int dt_new   = local ? new_N : dt_old;
            const int head_new = n_new - dt_new;
            w.bound_multipliers.setZero(n_new);
            w.bound_multipliers.head(head_new) = previous.bound_multipliers.segment(p + q, head_new);
            w.bound_multipliers.tail(dt_new)   = previous.bound_multipliers.tail(dt_new);
            w.parameters = g_new.parameters();
        }
        return out;
    }

    // General resize: resample what is left of the previous trajectory.
    const double t_f  = prev.t_f();
    double t_begin    = prev.dt.empty() ? 0.0 : prev.dt.front();
    if (t_f - t_begin < new_N * spec.dt_min || t_f - t_begin <= 0.0) t_begin = 0.0;
    const double span = t_f - t_begin;
    const double dt   = std::clamp(span / new_N, spec.dt_min, spec.dt_max);
    OcpTrajectory resampled;
    for (int k = 0; k <= new_N; ++k) resampled.states.push_back(state_at(prev, t_begin + span * k / new_N));
    resampled.states.front() = new_x_s;
    for (int k = 0; k < new_N; ++k) resampled.controls.push_back(control_at(prev, t_begin + span * (k + 0.5) / new_N));
    resampled.dt.assign(new_N, dt);
    out.ocp.set_trajectory(resampled);
    g_new.finalize();
    out.warm.parameters = g_new.parameters();
    return out;
}

}  // namespace qtmpc
