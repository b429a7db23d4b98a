#include <qtmpc/dynamics/models.h>
#include <qtmpc/hypergraph/generic_edge.h>
#include <qtmpc/solver/sqp_solver.h>
#include <qtmpc/transcription/grid_ocp.h>

#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace qtmpc;

namespace {

GridOcp vdp_local(int N, double dt_min, double dt_max, const VectorXd& x_s, const VectorXd& x_f)
{
    return GridOcp::build_local_uniform(make_van_der_pol(), Integrator{}, x_s, TerminalSet::point(x_f), N, dt_min,
                                        dt_max);
}

}  // namespace

TEST(Sqp, QuadraticWithEquality)
{
    // min (a - 1)^2 + (b - 2)^2 s.t. a + b = 1  ->  (0, 1)
    Hypergraph g;
    const int a = g.add_vertex(Vertex::make(VertexKind::auxiliary, 0, VectorXd::Constant(1, 5.0)));
    const int b = g.add_vertex(Vertex::make(VertexKind::auxiliary, 0, VectorXd::Constant(1, -3.0)));
    g.add_edge(std::make_shared<FunctionEdge>(EdgeKind::objective, std::vector<int>{a, b}, 1, [](const VertexValues& x) {
        const double da = (*x[0])[0] - 1, db = (*x[1])[0] - 2;
        return VectorXd::Constant(1, da * da + db * db);
    }));
    auto eq = std::make_shared<FunctionEdge>(
        EdgeKind::equality, std::vector<int>{a, b}, 1,
        [](const VertexValues& x) { return VectorXd::Constant(1, (*x[0])[0] + (*x[1])[0] - 1); }, true);
    g.add_edge(eq);
    g.finalize();
    SolverOptions opt;
    opt.regularization = 2.0;  // exact Hessian of this objective
    const NlpSolution sol = solve_nlp(g, opt);
    ASSERT_TRUE(sol.ok()) << sol.message;
    EXPECT_NEAR(sol.parameters[0], 0.0, 1e-6);
    EXPECT_NEAR(sol.parameters[1], 1.0, 1e-6);
    EXPECT_NEAR(sol.equality_multipliers[0], 2.0, 1e-5);
}

TEST(Sqp, NoFreeParametersIsAnError)
{
    Hypergraph g;
    g.add_vertex(Vertex::make(VertexKind::state, 0, VectorXd::Zero(2), true));
    g.finalize();
    EXPECT_EQ(solve_nlp(g).status, SolveStatus::error);
}

TEST(Sqp, InconsistentConstraintsAreInfeasible)
{
    Hypergraph g;
    const int a = g.add_vertex(Vertex::make(VertexKind::auxiliary, 0, VectorXd::Zero(1)));
    g.add_edge(std::make_shared<FunctionEdge>(EdgeKind::equality, std::vector<int>{a}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, (*x[0])[0] * (*x[0])[0] + 1.0);
    }));
    g.finalize();
    EXPECT_EQ(solve_nlp(g).status, SolveStatus::infeasible);
}

TEST(Sqp, VanDerPolShortIntervals)
{
    GridOcp ocp = vdp_local(50, 1e-3, 0.05, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok()) << sol.message;
    EXPECT_GT(sol.objective, 1.5);
    EXPECT_LE(sol.objective, 1.6);
    EXPECT_LE(sol.max_violation, 1e-7);
}

TEST(Sqp, DoubleIntegratorRestToRest)
{
    // bang-bang optimum from (0,0) to (1,0) with |u| <= 1: t_f = 2
    GridOcp ocp = GridOcp::build_local_uniform(make_double_integrator(), Integrator{}, Eigen::Vector2d(0, 0),
                                               TerminalSet::point(Eigen::Vector2d(1, 0)), 100, 1e-3, 0.1);
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok()) << sol.message;
    EXPECT_NEAR(sol.objective, 2.0, 0.05);
}

TEST(Sqp, SteadyStateTargetHitsMinimumInterval)
{
    const Eigen::Vector2d x(0.8, 0.0);
    GridOcp ocp = GridOcp::build_local_uniform(make_van_der_pol(), Integrator{}, x, TerminalSet::point(x), 1, 1e-3, 0.1);
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok()) << sol.message;
    EXPECT_NEAR(sol.objective, 1e-3, 1e-9);
    const OcpTrajectory t = ocp.trajectory();
    EXPECT_LE(make_van_der_pol()->eval(x, t.controls[0]).norm(), 1e-6);
    const int dt_col = ocp.graph().parameter_offset(ocp.dt_vertex(0));
    EXPECT_NEAR(-sol.bound_multipliers[dt_col], 1.0, 1e-6);
}

TEST(Sqp, OptimalPointsPassKktAndPerturbationsFail)
{
    GridOcp ocp = vdp_local(16, 1e-3, 1.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
    const SolverOptions opt;
    const NlpSolution sol = ocp.solve(opt);
    ASSERT_TRUE(sol.ok());
    const KktResidual k = kkt_residual(ocp.graph(), sol);
    EXPECT_LE(k.feasibility, opt.eps_feas);
    EXPECT_LE(k.stationarity, opt.eps_kkt);
    EXPECT_LE(k.complementarity, opt.eps_kkt);

    NlpSolution bad = sol;
    bad.parameters[3] += 1e-3;
    const KktResidual kb = kkt_residual(ocp.graph(), bad);
    EXPECT_GT(std::max(kb.feasibility, kb.stationarity), opt.eps_kkt);
}

TEST(Sqp, MeritDecreasesOnEveryAcceptedStep)
{
    GridOcp ocp = vdp_local(25, 1e-3, 1.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok());
    ASSERT_FALSE(sol.merit_history.empty());
    for (const auto& [before, after] : sol.merit_history) EXPECT_LE(after, before + 1e-12 * std::abs(before));
}

TEST(Sqp, DeterministicTrace)
{
    auto run = [] {
        GridOcp ocp = vdp_local(16, 1e-3, 1.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
        std::ostringstream trace;
        SolverOptions opt;
        opt.trace = &trace;
        const NlpSolution sol = ocp.solve(opt);
        return std::make_pair(trace.str(), sol.parameters);
    };
    const auto a = run(), b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
    EXPECT_EQ(a.first.rfind("iteration,objective,feasibility", 0), 0u);
}

TEST(Sqp, SquaredObjectiveHessianKeepsMinimizer)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> pos(-0.5, 0.5);
    std::uniform_int_distribution<int> horizon(8, 20);
    int compared = 0;
    for (int trial = 0; trial < 20; ++trial)
    {
        const Eigen::Vector2d x_s(pos(rng), pos(rng));
        const Eigen::Vector2d x_f(pos(rng), 0.0);
        const int N = horizon(rng);
        GridOcp with    = vdp_local(N, 1e-3, 0.3, x_s, x_f);
        GridOcp without = vdp_local(N, 1e-3, 0.3, x_s, x_f);
        SolverOptions plain;
        plain.objective_hessian = false;
        plain.regularization    = 1e-4;
        const NlpSolution a = with.solve();
        const NlpSolution b = without.solve(plain);
        if (!a.ok() || !b.ok()) continue;
        ++compared;
        EXPECT_NEAR(a.objective, b.objective, 1e-4) << trial;
    }
    EXPECT_GE(compared, 14);
}

TEST(Sqp, WarmMultipliersReachSameOptimum)
{
    GridOcp ocp = vdp_local(16, 1e-3, 1.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
    const NlpSolution cold = ocp.solve();
    ASSERT_TRUE(cold.ok());
    GridOcp again = vdp_local(16, 1e-3, 1.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0.8, 0));
    const NlpSolution warm = again.solve({}, &cold);
    ASSERT_TRUE(warm.ok());
    EXPECT_NEAR(warm.objective, cold.objective, 1e-8);
}

TEST(Sqp, StatusNames)
{
    EXPECT_EQ(to_string(SolveStatus::optimal), "optimal");
    EXPECT_EQ(to_string(SolveStatus::max_iter), "max_iter");
    EXPECT_EQ(to_string(SolveStatus::infeasible), "infeasible");
    EXPECT_EQ(to_string(SolveStatus::error), "error");
}
