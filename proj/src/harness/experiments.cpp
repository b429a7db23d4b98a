#include <qtmpc/baselines/l1_mpc.h>
#include <qtmpc/baselines/tompc.h>
#include <qtmpc/dynamics/models.h>
#include <qtmpc/harness/experiments.h>

#include <algorithm>
#include <stdexcept>

namespace qtmpc {

namespace {

MatrixXd or_identity(const MatrixXd& m, int n) { return m.size() == 0 ? MatrixXd::Identity(n, n) : m; }

}  // namespace

Model::Ptr model_from_config(const ExperimentConfig& cfg) { return make_model(cfg.model); }

Integrator integrator_from_config(const ExperimentConfig& cfg)
{
    Integrator in;
    in.scheme = cfg.integrator;
    return in;
}

MpcConfig mpc_config_from(const ExperimentConfig& cfg)
{
    MpcConfig m;
    m.model                = model_from_config(cfg);
    m.integrator           = integrator_from_config(cfg);
    m.grid                 = cfg.method == Method::global_grid ? GridType::global_uniform : GridType::local_uniform;
    m.terminal             = TerminalSet::point(cfg.x_f);
    m.dt_min               = cfg.dt_min;
    m.dt_max               = cfg.dt_max;
    m.adaptation           = cfg.adaptation;
    m.adaptation.N_initial = cfg.N;
    m.solver               = cfg.solver_options();
    return m;
}

OpenLoopResult solve_open_loop(const ExperimentConfig& cfg, std::ostream* trace)
{
    cfg.validate();
    const Model::Ptr model = model_from_config(cfg);
    const Integrator integrator = integrator_from_config(cfg);
    SolverOptions opt = cfg.solver_options();
    opt.trace         = trace;
    OpenLoopResult r;

    switch (cfg.method)
    {
        case Method::local_grid:
        case Method::global_grid:
        case Method::dual_mode:
        {
            OcpSpec spec;
            spec.model      = model;
            spec.integrator = integrator;
            spec.grid       = cfg.method == Method::global_grid ? GridType::global_uniform : GridType::local_uniform;
            spec.x_s        = cfg.x_s;
            spec.terminal   = TerminalSet::point(cfg.x_f);
            spec.N          = cfg.N;
            spec.dt_min     = cfg.dt_min;
            spec.dt_max     = cfg.dt_max;
            r.ocp           = std::make_shared<GridOcp>(spec);
            const NlpSolution sol = r.ocp->solve(opt);
            r.status     = sol.status;
            r.trajectory = r.ocp->trajectory();
            r.N          = cfg.N;
            r.t_f        = sol.objective;
            r.iterations = sol.iterations;
            r.wall_ms    = sol.wall_ms;
            r.message    = sol.message;
            break;
        }
        case Method::tompc:
        {
            TompcConfig tc;
            tc.dt     = cfg.fixed_dt;
            tc.N_max  = cfg.tompc_N_max;
            tc.Q_s    = cfg.Q_s;
            tc.solver = opt;
            const TompcResult t = tompc_solve(model, integrator, cfg.x_s, cfg.x_f, tc);
            r.status     = t.status;
            r.trajectory = t.trajectory;
            r.N          = t.N_star;
            r.t_f        = t.N_star * cfg.fixed_dt;
            r.iterations = static_cast<int>(t.trials.size());
            r.wall_ms    = t.wall_ms;
            r.message    = "N* = " + std::to_string(t.N_star) + " after " + std::to_string(t.trials.size()) + " trials";
            break;
        }
        case Method::l1:
        {
            L1Config lc;
            lc.dt      = cfg.fixed_dt;
            lc.N       = cfg.N;
            lc.theta   = cfg.theta;
            lc.weights = cfg.l1_weights;
            lc.solver  = opt;
            const L1Result l = l1_solve(model, integrator, cfg.x_s, cfg.x_f, lc);
            r.status     = l.status;
            r.trajectory = l.trajectory;
            r.N          = cfg.N;
            r.t_f        = cfg.N * cfg.fixed_dt;
            r.wall_ms    = l.wall_ms;
            r.message    = l.message;
            break;
        }
    }
    return r;
}

TrajectoryLog open_loop_log(const ExperimentConfig& cfg, const OpenLoopResult& result)
{
    const Model::Ptr model = model_from_config(cfg);
    TrajectoryLog log;
    log.state_dim   = model->state_dim();
    log.control_dim = model->control_dim();
    const std::string mode = cfg.method == Method::tompc ? "tompc" : cfg.method == Method::l1 ? "l1" : "mpc";
    const OcpTrajectory& tr = result.trajectory;
    double t = 0.0;
    for (int k = 0; k < tr.N(); ++k)
    {
        LogEntry e;
        e.t          = t;
        e.x          = tr.states[k];
        e.u          = tr.controls[k];
        e.dt_applied = tr.dt[k];
        e.N          = tr.N() - k;
        e.mode       = mode;
        log.add(std::move(e));
        t += tr.dt[k];
    }
    log.final_time  = t;
    log.final_state = tr.states.empty() ? cfg.x_s : tr.states.back();
    log.message     = std::string(to_string(result.status));
    return log;
}

DenseTrajectory reference_solution(const ExperimentConfig& cfg)
{
    ExperimentConfig ref = cfg;
    ref.method           = Method::local_grid;
    ref.N                = cfg.reference_N;
    ref.adaptation.N_min = std::min(ref.adaptation.N_min, ref.N);
    ref.adaptation.N_max = std::max(ref.adaptation.N_max, ref.N);
    const OpenLoopResult r = solve_open_loop(ref);
    if (r.status != SolveStatus::optimal)
        throw std::runtime_error("reference solve (N = " + std::to_string(ref.N) + ") failed: " + r.message);
    return dense_from_ocp(r.trajectory);
}

DualModeParts dual_mode_parts(const ExperimentConfig& cfg)
{
    const Model::Ptr model = model_from_config(cfg);
    const int p = model->state_dim(), q = model->control_dim();
    DualModeParts parts;
    parts.u_ref = steady_state_control(*model, cfg.x_f);
    parts.lqr   = lqr_design_for_model(*model, cfg.x_f, parts.u_ref, or_identity(cfg.lqr_Q, p), or_identity(cfg.lqr_R, q),
                                       cfg.effective_lqr_dt());
    if (cfg.x_lin)
        parts.region = Ellipse(cfg.x_f, *cfg.x_lin);
    else
        parts.region = region_of_attraction(cfg).ellipse;
    return parts;
}

TrajectoryLog simulate_closed_loop(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.method == Method::tompc || cfg.method == Method::l1)
        throw std::invalid_argument("simulate supports local_grid, global_grid and dual_mode");
    const MpcConfig mc = mpc_config_from(cfg);
    TimeOptimalMpc mpc(mc);
    Plant plant{mc.model, integrator_from_config(cfg), cfg.substeps};
    ClosedLoopOptions opt;
    opt.stop          = cfg.stop;
    opt.sample_period = cfg.sample_period;
    opt.references    = cfg.references;
    if (cfg.method != Method::dual_mode) return closed_loop_run(plant, mpc, cfg.x_s, opt);
    DualModeParts parts = dual_mode_parts(cfg);
    DualModeController dual(mpc, parts.lqr, parts.region, parts.u_ref);
    return closed_loop_run(plant, dual, cfg.x_s, opt);
}

RegionEstimate controllability_region(const ExperimentConfig& cfg)
{
    cfg.validate();
    RegionOptions o;
    o.N            = cfg.effective_region_N();
    o.t_c          = cfg.effective_region_t_c();
    o.control_step = cfg.control_step;
    o.time_step    = cfg.time_step;
    o.budget       = cfg.region_budget;
    return estimate_controllability_region(*model_from_config(cfg), integrator_from_config(cfg), cfg.x_f, o);
}

RoaEstimate region_of_attraction(const ExperimentConfig& cfg)
{
    const Model::Ptr model = model_from_config(cfg);
    const int p = model->state_dim(), q = model->control_dim();
    const VectorXd u_ref = steady_state_control(*model, cfg.x_f);
    const LqrGain lqr = lqr_design_for_model(*model, cfg.x_f, u_ref, or_identity(cfg.lqr_Q, p),
                                             or_identity(cfg.lqr_R, q), cfg.effective_lqr_dt());
    RoaOptions o;
    o.grid_step  = VectorXd::Constant(p, cfg.roa_grid_step);
    o.half_width = VectorXd::Constant(p, cfg.roa_half_width);
    o.horizon    = cfg.roa_horizon;
    return estimate_roa(*model, integrator_from_config(cfg), lqr, cfg.x_f, u_ref, o);
}

MatrixXd vdp_x_lin_shape()
{
    MatrixXd E(2, 2);
    E << 16.65, 14.03, 14.03, 18.19;
    return E;
}

ExperimentConfig table1_config(Method method, int N)
{
    ExperimentConfig c;
    c.name   = std::string(to_string(method)) + "_N" + std::to_string(N);
    c.model  = "vdp";
    c.x_s    = Eigen::Vector2d(0.0, 0.0);
    c.x_f    = Eigen::Vector2d(0.8, 0.0);
    c.method = method;
    c.N      = N;
    c.dt_min = 1e-3;
    c.dt_max = 1.0;
    c.adaptation.N_min = std::min(c.adaptation.N_min, N);
    c.adaptation.N_max = std::max(c.adaptation.N_max, N);
    return c;
}

ExperimentConfig vdp_closed_loop_config(const VectorXd& x_s, bool dual_mode)
{
    ExperimentConfig c;
    c.name             = dual_mode ? "vdp_dual_mode" : "vdp_time_optimal";
    c.model            = "vdp";
    c.x_s              = x_s;
    c.x_f              = Eigen::Vector2d(0.0, 0.0);
    c.method           = dual_mode ? Method::dual_mode : Method::local_grid;
    c.N                = 50;
    c.dt_min           = 1e-3;
    c.dt_max           = 0.05;
    c.adaptation.mode  = AdaptationMode::shrinking;
    c.adaptation.N_min = 3;
    c.adaptation.N_max = 100;
    c.lqr_Q            = Eigen::Vector2d(2.0, 0.1).asDiagonal();
    c.lqr_R            = MatrixXd::Constant(1, 1, 0.1);
    c.x_lin            = vdp_x_lin_shape();
    c.stop.max_time      = dual_mode ? 8.0 : 5.0;
    c.stop.target_radius = dual_mode ? 1e-3 : 0.05;
    return c;
}

}  // namespace qtmpc
