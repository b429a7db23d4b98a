// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [--strict] [criterion numbers...]
// Exit status counts failures; without --strict, known deviations do not count.

#include <qtmpc/baselines/l1_mpc.h>
#include <qtmpc/baselines/tompc.h>
#include <qtmpc/dual_mode/lqr.h>
#include <qtmpc/dual_mode/region.h>
#include <qtmpc/dynamics/models.h>
#include <qtmpc/harness/experiments.h>
#include <qtmpc/harness/metrics.h>
#include <qtmpc/hypergraph/sparsity.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace qtmpc;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    std::string name;
    double time_limit_s;  // <= 0: none
    std::function<Outcome()> run;
};

// Criteria whose stated values are not reproducible from the stated inputs.
const std::set<int> kKnownDeviations = {9};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c, d);
    return buf;
}

GridOcp vdp_table1_ocp(GridType type, int N)
{
    const ExperimentConfig cfg = table1_config(Method::local_grid, N);
    if (type == GridType::global_uniform)
        return GridOcp::build_global_uniform(make_van_der_pol(), Integrator{}, cfg.x_s, TerminalSet::point(cfg.x_f), N,
                                             cfg.dt_min, cfg.dt_max);
    return GridOcp::build_local_uniform(make_van_der_pol(), Integrator{}, cfg.x_s, TerminalSet::point(cfg.x_f), N,
                                        cfg.dt_min, cfg.dt_max);
}

Outcome sparsity_fidelity()
{
    const int global = derive_sparsity(vdp_table1_ocp(GridType::global_uniform, 10).graph()).hessian.nonzeros();
    const int local  = derive_sparsity(vdp_table1_ocp(GridType::local_uniform, 10).graph()).hessian.nonzeros();
    return {global == 239 && local == 284, "global nz=" + std::to_string(global) + " local nz=" + std::to_string(local)};
}

Outcome grid_equivalence()
{
    Outcome o{true, ""};
    for (int N : {5, 16, 25})
    {
        GridOcp g = vdp_table1_ocp(GridType::global_uniform, N);
        GridOcp l = vdp_table1_ocp(GridType::local_uniform, N);
        const NlpSolution sg = g.solve(), sl = l.solve();
        const double diff = std::abs(sg.objective - sl.objective);
        o.pass = o.pass && sg.ok() && sl.ok() && diff <= 1e-4;
        o.detail += fmt("N=%.0f: %.6f vs %.6f; ", N, sg.objective, sl.objective);
    }
    return o;
}

Outcome bang_bang_oracle()
{
    Outcome o{true, ""};
    for (int N : {100, 150})
    {
        GridOcp ocp = GridOcp::build_local_uniform(make_double_integrator(), Integrator{}, Eigen::Vector2d(1, 0),
                                                   TerminalSet::point(Eigen::Vector2d(0, 0)), N, 1e-3, 0.1);
        const NlpSolution s = ocp.solve();
        o.pass = o.pass && s.ok() && s.objective >= 1.95 && s.objective <= 2.05;
        o.detail += fmt("N=%.0f: t_f=%.4f; ", N, s.objective);
    }
    return o;
}

Outcome table1_feasibility()
{
    const Model::Ptr m = make_van_der_pol();
    const ExperimentConfig cfg = table1_config(Method::tompc, 16);
    TompcConfig t;
    t.dt    = 0.1;
    t.N_max = 30;
    const TompcResult tr = tompc_solve(m, Integrator{}, cfg.x_s, cfg.x_f, t);
    L1Config l;
    l.dt                = 0.1;
    l.N                 = 5;
    const SolveStatus l5 = l1_solve(m, Integrator{}, cfg.x_s, cfg.x_f, l).status;
    l.N                  = 16;
    const SolveStatus l16 = l1_solve(m, Integrator{}, cfg.x_s, cfg.x_f, l).status;
    const bool pass = tr.status == SolveStatus::optimal && tr.N_star == 16 && l5 != SolveStatus::optimal &&
                      l16 == SolveStatus::optimal;
    return {pass, "TOMPC N*=" + std::to_string(tr.N_star) + " l1 N=5 " + std::string(to_string(l5)) + " l1 N=16 " +
                      std::string(to_string(l16))};
}

Outcome table1_errors()
{
    const DenseTrajectory ref = reference_solution(table1_config(Method::local_grid, 16));
    const int Ns[]            = {5, 16, 25, 50};
    double e[4];
    for (int i = 0; i < 4; ++i)
    {
        const ExperimentConfig cfg = table1_config(Method::local_grid, Ns[i]);
        const OpenLoopResult r     = solve_open_loop(cfg);
        if (r.status != SolveStatus::optimal) return {false, "N=" + std::to_string(Ns[i]) + " " + r.message};
        e[i] = integral_error(ref, r.trajectory.control(), cfg.x_s, *model_from_config(cfg), Integrator{});
    }
    const bool values = std::abs(e[0] - 0.070) <= 0.015 && std::abs(e[1] - 0.036) <= 0.01 &&
                        std::abs(e[2] - 0.020) <= 0.008 && e[3] <= 0.005;
    const bool monotone = e[0] > e[1] && e[1] > e[2] && e[2] > e[3];
    return {values && monotone, fmt("e(5,16,25,50)=%.4f %.4f %.4f %.4f", e[0], e[1], e[2], e[3])};
}

double median_solve_ms(Method method, int N, int repetitions)
{
    std::vector<double> ms;
    for (int r = 0; r < repetitions; ++r)
    {
        const OpenLoopResult res = solve_open_loop(table1_config(method, N));
        if (res.status != SolveStatus::optimal) return NAN;
        ms.push_back(res.wall_ms);
    }
    return median(ms);
}

Outcome scaling()
{
    Outcome o{true, ""};
    for (Method m : {Method::global_grid, Method::local_grid})
    {
        const double t20 = median_solve_ms(m, 20, 20);
        const double t80 = median_solve_ms(m, 80, 20);
        const double ratio = t80 / t20;
        o.pass = o.pass && std::isfinite(ratio) && ratio <= 8.0;
        o.detail += std::string(to_string(m)) + fmt(": %.2f ms -> %.2f ms (x%.2f); ", t20, t80, ratio);
    }
    return o;
}

Outcome nominal_replay()
{
    const ExperimentConfig cfg = vdp_closed_loop_config(Eigen::Vector2d(0.6, 0.6), false);
    MpcConfig c                = mpc_config_from(cfg);
    TimeOptimalMpc mpc(c);
    VectorXd x        = cfg.x_s;
    ControlDecision d = mpc.decide(x);
    const OcpTrajectory initial = mpc.prediction();
    double t_f = mpc.state().last_t_f, state_err = 0.0, tele_err = 0.0;
    int k = 0;
    while (true)
    {
        x = c.integrator.step(*c.model, x, d.u, d.hold);
        ++k;
        state_err = std::max(state_err, (x - initial.states[k]).norm());
        if (d.N <= c.adaptation.N_min + 1) break;
        const double hold = d.hold;
        d                 = mpc.decide(x);
        tele_err          = std::max(tele_err, std::abs(mpc.state().last_t_f - (t_f - hold)));
        t_f               = mpc.state().last_t_f;
    }
    return {state_err <= 1e-6 && tele_err <= 1e-6,
            fmt("steps=%.0f max state dev=%.2e max telescoping dev=%.2e", k, state_err, tele_err)};
}

Outcome steady_state_kkt()
{
    const Eigen::Vector2d x(0.8, 0.0);
    GridOcp ocp = GridOcp::build_local_uniform(make_van_der_pol(), Integrator{}, x, TerminalSet::point(x), 1, 1e-3, 0.1);
    const NlpSolution s = ocp.solve();
    if (!s.ok()) return {false, s.message};
    const double f  = make_van_der_pol()->eval(x, ocp.trajectory().controls[0]).norm();
    const double mu = -s.bound_multipliers[ocp.graph().parameter_offset(ocp.dt_vertex(0))];
    return {std::abs(s.objective - 1e-3) <= 1e-9 && f <= 1e-6 && std::abs(mu - 1.0) <= 1e-4,
            fmt("t_f=%.6g |f|=%.2e multiplier=%.6f", s.objective, f, mu)};
}

Outcome lqr_design_check()
{
    // Euler discretization of the Van der Pol oscillator at the origin with dt = 1e-3.
    MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
    A << 1.0, 0.001, -0.001, 1.001;
    B << 0.0, 0.001;
    Q << 2.0, 0.0, 0.0, 0.1;
    R << 0.1;
    const LqrGain g    = lqr_design(A, B, Q, R);
    const MatrixXd K_h = dual_mode_parts(vdp_closed_loop_config(Eigen::Vector2d(0.6, 0.6), true)).lqr.K;
    const double rho   = spectral_radius(A - B * g.K);
    const double res   = dare_residual(A, B, Q, R, g.P);
    const bool pass = std::abs(g.K(0, 0) - 3.5737) <= 1e-2 && std::abs(g.K(0, 1) - 3.8711) <= 1e-2 && rho < 1.0 &&
                      res <= 1e-8 && (K_h - g.K).norm() <= 1e-6;
    return {pass, fmt("K=(%.4f, %.4f) expected (3.5737, 3.8711) rho=%.6f residual=%.2e", g.K(0, 0), g.K(0, 1), rho,
                      res)};
}

Outcome dual_mode_closed_loop()
{
    Outcome o{true, ""};
    for (const Eigen::Vector2d& x0 : {Eigen::Vector2d(-1.04, 0.56), Eigen::Vector2d(0.1, -0.5), Eigen::Vector2d(0.6, 0.6)})
    {
        const TrajectoryLog dual = simulate_closed_loop(vdp_closed_loop_config(x0, true));
        const TrajectoryLog pure = simulate_closed_loop(vdp_closed_loop_config(x0, false));
        const bool ok_dual = dual.stop == StopReason::target_reached && dual.mode_switches() == 1 &&
                             dual.final_time <= 8.0;
        const bool ok_pure = pure.stop == StopReason::target_reached && pure.final_time <= 5.0;
        o.pass = o.pass && ok_dual && ok_pure;
        o.detail += fmt("(%.2f, %.2f): ", x0[0], x0[1]) +
                    fmt("dual %.2f s switches=%.0f, pure %.2f s; ", dual.final_time, dual.mode_switches(),
                        pure.final_time);
    }
    return o;
}

Outcome containment()
{
    ExperimentConfig cfg = vdp_closed_loop_config(Eigen::Vector2d(0.6, 0.6), true);
    cfg.region_N         = 3;
    const RegionEstimate p3 = controllability_region(cfg);
    cfg.region_N            = 2;
    const RegionEstimate p2 = controllability_region(cfg);
    const ContainmentResult c = check_containment(p3, Ellipse(cfg.x_f, vdp_x_lin_shape()));
    const bool strict = region_subset(p2, p3) && !region_subset(p3, p2);
    return {c.contained && strict, "P3 points=" + std::to_string(p3.size()) + " violations=" +
                                       std::to_string(c.violations) + " P2 points=" + std::to_string(p2.size()) +
                                       (strict ? " P2 strict subset" : " P2 not a strict subset")};
}

Outcome invariant_suites()
{
    Outcome o{true, ""};
    std::istringstream list(QTMPC_UNIT_TESTS);
    std::string path;
    while (std::getline(list, path, '|'))
    {
        if (path.empty()) continue;
        const int rc = std::system((path + " > /dev/null 2>&1").c_str());
        const std::string name = path.substr(path.find_last_of('/') + 1);
        o.pass = o.pass && rc == 0;
        o.detail += name + (rc == 0 ? " ok; " : " FAILED; ");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
    {
        const std::string a = argv[i];
        if (a == "--strict")
            strict = true;
        else
            selected.insert(std::atoi(a.c_str()));
    }

    const std::vector<Criterion> criteria = {
        {1, "sparsity fidelity", 1.0, sparsity_fidelity},
        {2, "grid equivalence", 10.0, grid_equivalence},
        {3, "bang-bang oracle", 30.0, bang_bang_oracle},
        {4, "fixed-grid feasibility boundary", 120.0, table1_feasibility},
        {5, "open-loop integral errors", 120.0, table1_errors},
        {6, "solve time scaling", 0.0, scaling},
        {7, "nominal replay", 60.0, nominal_replay},
        {8, "steady-state KKT", 1.0, steady_state_kkt},
        {9, "LQR design", 1.0, lqr_design_check},
        {10, "dual-mode closed loop", 300.0, dual_mode_closed_loop},
        {11, "controllability region containment", 600.0, containment},
        {12, "invariant suites", 300.0, invariant_suites},
    };

    int failures = 0;
    for (const Criterion& c : criteria)
    {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.time_limit_s <= 0.0 || s <= c.time_limit_s;
        const bool pass    = o.pass && in_time;
        const bool known   = !pass && kKnownDeviations.count(c.id);
        if (!pass && (strict || !known)) ++failures;
        std::printf("%s %2d %s: %s [%.2f s%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), s,
                    in_time ? "" : ", over time limit", known ? " (known deviation)" : "");
        std::fflush(stdout);
    }
    return failures;
}
