#include <qtmpc/dynamics/models.h>
#include <qtmpc/hypergraph/derivatives.h>
#include <qtmpc/hypergraph/sparsity.h>
#include <qtmpc/transcription/edges.h>
#include <qtmpc/transcription/graph_json.h>
#include <qtmpc/transcription/grid_ocp.h>

#include <algorithm>
#include <random>

#include "gtest/gtest.h"

using namespace qtmpc;

namespace {

const Eigen::Vector2d vdp_start(0.0, 0.0);
const Eigen::Vector2d vdp_target(0.8, 0.0);

GridOcp vdp_ocp(GridType grid, int N, double dt_min = 1e-3, double dt_max = 1.0,
                const Eigen::Vector2d& x_s = vdp_start)
{
    const Integrator fe{Scheme::forward_euler};
    const TerminalSet term = TerminalSet::point(vdp_target);
    return grid == GridType::global_uniform
               ? GridOcp::build_global_uniform(make_van_der_pol(), fe, x_s, term, N, dt_min, dt_max)
               : GridOcp::build_local_uniform(make_van_der_pol(), fe, x_s, term, N, dt_min, dt_max);
}

}  // namespace

TEST(GridOcp, ParameterCounts)
{
    // p = 2, q = 1: N q + (N - 1) p + dt(s)
    EXPECT_EQ(vdp_ocp(GridType::global_uniform, 10).graph().parameter_count(), 29);
    EXPECT_EQ(vdp_ocp(GridType::local_uniform, 10).graph().parameter_count(), 38);
    EXPECT_EQ(vdp_ocp(GridType::global_uniform, 1).graph().parameter_count(), 2);
    EXPECT_EQ(vdp_ocp(GridType::local_uniform, 1).graph().parameter_count(), 2);
}

TEST(GridOcp, HessianSparsity)
{
    const GraphSparsity global = derive_sparsity(vdp_ocp(GridType::global_uniform, 10).graph());
    const GraphSparsity local  = derive_sparsity(vdp_ocp(GridType::local_uniform, 10).graph());
    EXPECT_EQ(global.hessian.nonzeros(), 239);
    EXPECT_EQ(local.hessian.nonzeros(), 284);
    EXPECT_NEAR(global.hessian.density(), 239.0 / (29 * 29), 1e-12);
    EXPECT_NEAR(local.hessian.density(), 284.0 / (38 * 38), 1e-12);
    EXPECT_LT(local.hessian.density(), global.hessian.density());
}

TEST(GridOcp, GlobalDtColumnIsDense)
{
    const GridOcp ocp     = vdp_ocp(GridType::global_uniform, 10);
    const GraphSparsity s = derive_sparsity(ocp.graph());
    const int col         = ocp.graph().parameter_offset(ocp.dt_vertex(0));
    for (int r = 0; r < ocp.graph().equality_count(); ++r) EXPECT_TRUE(s.jacobian.contains(r, col)) << r;
}

TEST(GridOcp, LocalDtTouchesOwnInterval)
{
    const GridOcp ocp     = vdp_ocp(GridType::local_uniform, 10);
    const GraphSparsity s = derive_sparsity(ocp.graph());
    const int col         = ocp.graph().parameter_offset(ocp.dt_vertex(4));
    int dyn_rows          = 0;
    for (int r = 0; r < 10 * 2; ++r) dyn_rows += s.jacobian.contains(r, col);
    EXPECT_EQ(dyn_rows, 2);
}

TEST(GridOcp, MaxEdgeArity)
{
    for (GridType g : {GridType::global_uniform, GridType::local_uniform})
    {
        const GridOcp ocp = vdp_ocp(g, 10);
        int arity         = 0;
        for (const auto& e : ocp.graph().edges())
        {
            int dim = 0;
            for (int v : e->vertices()) dim += ocp.graph().vertex(v).dim();
            arity = std::max(arity, dim);
        }
        EXPECT_EQ(arity, 2 * 2 + 1 + 1);
    }
}

TEST(GridOcp, RejectsInvalidSpecs)
{
    EXPECT_THROW(vdp_ocp(GridType::local_uniform, 0), std::invalid_argument);
    EXPECT_THROW(vdp_ocp(GridType::local_uniform, 5, 0.2, 0.1), std::invalid_argument);
}

TEST(GridOcp, FixedIntervalHasNoDtParameter)
{
    const GridOcp ocp = vdp_ocp(GridType::global_uniform, 10, 0.1, 0.1);
    EXPECT_EQ(ocp.graph().parameter_count(), 28);
}

TEST(GridOcp, GraphJsonTopology)
{
    for (GridType g : {GridType::global_uniform, GridType::local_uniform})
    {
        const GridOcp ocp      = vdp_ocp(g, 6);
        const nlohmann::json j = graph_to_json(ocp.graph());
        int intervals = 0, uniformity = 0, dynamics = 0;
        std::vector<int> interval_ids;
        for (const auto& v : j["vertices"])
            if (v["kind"] == "interval")
            {
                ++intervals;
                interval_ids.push_back(v["id"]);
            }
        for (const auto& e : j["edges"])
        {
            const std::string label = e["label"];
            if (label.rfind("dynamics", 0) == 0)
            {
                ++dynamics;
                const auto ids = e["vertices"].get<std::vector<int>>();
                EXPECT_EQ(ids.size(), 4u);
                if (g == GridType::global_uniform) { EXPECT_EQ(ids[2], interval_ids.front()); }
            }
            if (label.rfind("uniformity", 0) == 0) ++uniformity;
        }
        EXPECT_EQ(dynamics, 6);
        EXPECT_EQ(intervals, g == GridType::global_uniform ? 1 : 6);
        EXPECT_EQ(uniformity, g == GridType::global_uniform ? 0 : 5);
        EXPECT_EQ(j["parameters"], ocp.graph().parameter_count());
    }
}

TEST(DynamicsEdge, AnalyticJacobianMatchesFiniteDifferences)
{
    const Model::Ptr vdp = make_van_der_pol();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(-1.5, 1.5);
    for (Scheme scheme : {Scheme::forward_euler, Scheme::trapezoidal, Scheme::backward_euler})
    {
        const DynamicsEdge edge(vdp, Integrator{scheme}, 0, 1, 2, 3, 0);
        for (int trial = 0; trial < 20; ++trial)
        {
            VectorXd x(2), u(1), dt(1), xn(2);
            x << unit(rng), unit(rng);
            u << unit(rng) / 1.5;
            dt << 0.05 + 0.1 * std::abs(unit(rng));
            xn << unit(rng), unit(rng);
            const VertexValues vals{&x, &u, &dt, &xn};
            std::vector<MatrixXd> blocks;
            ASSERT_TRUE(edge.jacobian(vals, blocks));

            std::vector<VectorXd> vars{x, u, dt, xn};
            for (int b = 0; b < 4; ++b)
                for (int i = 0; i < vars[b].size(); ++i)
                {
                    std::vector<VectorXd> plus = vars, minus = vars;
                    plus[b][i] += 1e-6;
                    minus[b][i] -= 1e-6;
                    VectorXd rp(2), rm(2);
                    edge.evaluate({&plus[0], &plus[1], &plus[2], &plus[3]}, rp);
                    edge.evaluate({&minus[0], &minus[1], &minus[2], &minus[3]}, rm);
                    const VectorXd fd = (rp - rm) / 2e-6;
                    EXPECT_LE((fd - blocks[b].col(i)).lpNorm<Eigen::Infinity>(), 1e-4);
                }
        }
    }
}

TEST(GridOcp, TrajectoryRoundTrip)
{
    GridOcp ocp = vdp_ocp(GridType::local_uniform, 4);
    ocp.initialize_default();
    OcpTrajectory t = ocp.trajectory();
    ASSERT_EQ(t.N(), 4);
    EXPECT_EQ(t.states.front(), VectorXd(vdp_start));
    EXPECT_EQ(t.states.back(), VectorXd(vdp_target));
    for (int k = 0; k < 4; ++k) t.controls[k][0] = 0.1 * k;
    std::fill(t.dt.begin(), t.dt.end(), 0.25);
    ocp.set_trajectory(t);
    const OcpTrajectory back = ocp.trajectory();
    for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(back.controls[k][0], 0.1 * k);
    EXPECT_DOUBLE_EQ(back.t_f(), 1.0);
}

TEST(GridOcp, BoxTerminalBoundsLastState)
{
    const TerminalSet box = TerminalSet::box(vdp_target, Eigen::Vector2d(0.1, 0.2));
    const GridOcp ocp = GridOcp::build_local_uniform(make_van_der_pol(), Integrator{}, vdp_start, box, 5, 1e-3, 1.0);
    const Vertex& xN  = ocp.graph().vertex(ocp.state_vertex(5));
    EXPECT_FALSE(xN.fixed);
    EXPECT_NEAR(xN.lower[0], 0.7, 1e-12);
    EXPECT_NEAR(xN.upper[1], 0.2, 1e-12);
}

TEST(ShrinkAndWarmstart, ParameterBookkeeping)
{
    for (GridType g : {GridType::global_uniform, GridType::local_uniform})
    {
        GridOcp ocp = vdp_ocp(g, 50);
        ocp.initialize_default();
        NlpSolution prev;
        prev.parameters = ocp.graph().parameters();
        const OcpTrajectory t = ocp.trajectory();
        const WarmStartedOcp next = shrink_and_warmstart(ocp, prev, t.states[1], 49);
        const int drop = ocp.graph().parameter_count() - next.ocp.graph().parameter_count();
        EXPECT_EQ(drop, 2 + 1 + (g == GridType::local_uniform ? 1 : 0));
        EXPECT_EQ(next.ocp.N(), 49);
    }
}

TEST(ShrinkAndWarmstart, SameProblemNeedsNoIterations)
{
    GridOcp ocp            = vdp_ocp(GridType::local_uniform, 16);
    const NlpSolution sol  = ocp.solve();
    ASSERT_TRUE(sol.ok()) << sol.message;
    WarmStartedOcp again   = shrink_and_warmstart(ocp, sol, vdp_start, 16);
    const NlpSolution sol2 = again.ocp.solve({}, &again.warm);
    ASSERT_TRUE(sol2.ok());
    EXPECT_EQ(sol2.iterations, 0);
    EXPECT_NEAR(sol2.objective, sol.objective, 1e-12);
}

TEST(ShrinkAndWarmstart, NominalShrinkTelescopes)
{
    for (GridType g : {GridType::global_uniform, GridType::local_uniform})
    {
        GridOcp ocp           = vdp_ocp(g, 16);
        const NlpSolution sol = ocp.solve();
        ASSERT_TRUE(sol.ok()) << sol.message;
        const OcpTrajectory t  = ocp.trajectory();
        WarmStartedOcp next    = shrink_and_warmstart(ocp, sol, t.states[1], 15);
        const NlpSolution sol2 = next.ocp.solve({}, &next.warm);
        ASSERT_TRUE(sol2.ok()) << sol2.message;
        EXPECT_NEAR(sol2.objective, sol.objective - t.dt[0], 1e-6);
    }
}

TEST(ShrinkAndWarmstart, ResizeEqualsFreshBuild)
{
    GridOcp ocp           = vdp_ocp(GridType::local_uniform, 16);
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok());
    const Eigen::Vector2d x_new(0.1, 0.05);
    for (int new_N : {12, 20})
    {
        WarmStartedOcp resized = shrink_and_warmstart(ocp, sol, x_new, new_N);
        const NlpSolution a    = resized.ocp.solve({}, &resized.warm);
        GridOcp fresh          = vdp_ocp(GridType::local_uniform, new_N, 1e-3, 1.0, x_new);
        const NlpSolution b    = fresh.solve();
        ASSERT_TRUE(a.ok() && b.ok()) << a.message << " / " << b.message;
        EXPECT_NEAR(a.objective, b.objective, 1e-8) << new_N;
    }
}

TEST(GridOcp, GlobalAndLocalFormsAgree)
{
    for (int N : {5, 16, 25})
    {
        GridOcp global = vdp_ocp(GridType::global_uniform, N);
        GridOcp local  = vdp_ocp(GridType::local_uniform, N);
        const NlpSolution sg = global.solve();
        const NlpSolution sl = local.solve();
        ASSERT_TRUE(sg.ok() && sl.ok());
        EXPECT_NEAR(sg.objective, sl.objective, 1e-4) << N;
        const OcpTrajectory tg = global.trajectory(), tl = local.trajectory();
        for (int k = 0; k <= N; ++k) EXPECT_LE((tg.states[k] - tl.states[k]).lpNorm<Eigen::Infinity>(), 1e-4);
    }
}

TEST(GridOcp, LocalIntervalsStayUniform)
{
    GridOcp ocp           = vdp_ocp(GridType::local_uniform, 25);
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok());
    const OcpTrajectory t = ocp.trajectory();
    for (double dt : t.dt) EXPECT_NEAR(dt, t.dt.front(), 1e-9);
}

TEST(GridOcp, SolutionSatisfiesDynamicsAndBounds)
{
    GridOcp ocp           = vdp_ocp(GridType::local_uniform, 16);
    const NlpSolution sol = ocp.solve();
    ASSERT_TRUE(sol.ok());
    const OcpTrajectory t = ocp.trajectory();
    const Model::Ptr vdp  = make_van_der_pol();
    const Integrator fe{Scheme::forward_euler};
    for (int k = 0; k < t.N(); ++k)
    {
        EXPECT_LE((fe.step(*vdp, t.states[k], t.controls[k], t.dt[k]) - t.states[k + 1]).lpNorm<Eigen::Infinity>(), 1e-6);
        EXPECT_LE(std::abs(t.controls[k][0]), 1.0 + 1e-9);
        EXPECT_GE(t.dt[k], 1e-3 - 1e-12);
    }
}
