#include <qtmpc/controller/closed_loop.h>
#include <qtmpc/dynamics/models.h>

#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace qtmpc;

namespace {

AdaptationConfig adaptation(AdaptationMode mode, int N_min = 3, int N_max = 100, double dt_s = 0.05,
                            double dt_eps = 0.0)
{
    AdaptationConfig a;
    a.mode      = mode;
    a.N_initial = std::max(N_min, 3);
    a.N_min     = N_min;
    a.N_max     = N_max;
    a.dt_s      = dt_s;
    a.dt_eps    = dt_eps;
    return a;
}

MpcConfig vdp_mpc(const VectorXd& x_f, int N = 50)
{
    MpcConfig c;
    c.model                = make_van_der_pol();
    c.terminal             = TerminalSet::point(x_f);
    c.dt_min               = 1e-3;
    c.dt_max               = 0.05;
    c.adaptation.N_initial = N;
    c.adaptation.N_min     = 3;
    return c;
}

std::string without_cpu_column(const TrajectoryLog& log)
{
    TrajectoryLog copy = log;
    for (LogEntry& e : copy.entries) e.cpu_ms = 0.0;
    std::ostringstream os;
    copy.write_csv(os);
    return os.str();
}

}  // namespace

TEST(Adaptation, ShrinkingDecrementsAndClamps)
{
    const AdaptationConfig a = adaptation(AdaptationMode::shrinking);
    EXPECT_EQ(adapt_grid(a, 50, 0.04), 49);
    EXPECT_EQ(adapt_grid(a, 3, 0.04), 3);
}

TEST(Adaptation, HysteresisEstimate)
{
    const AdaptationConfig a = adaptation(AdaptationMode::hysteresis_estimate, 3, 100, 0.05, 0.005);
    EXPECT_EQ(adapt_grid(a, 10, 0.2), 40);
    EXPECT_EQ(adapt_grid(a, 90, 0.2), 100);      // capped at N_max
    EXPECT_EQ(adapt_grid(a, 10, 0.052), 9);      // inside the hysteresis band: shrink
    EXPECT_EQ(adapt_grid(a, 10, 0.001), 3);      // ceil(0.2) clamped to N_min
}

TEST(Adaptation, HysteresisLinearSearch)
{
    const AdaptationConfig a = adaptation(AdaptationMode::hysteresis_linear_search, 3, 100, 0.05, 0.005);
    EXPECT_EQ(adapt_grid(a, 10, 0.2), 11);   // intervals too long: refine
    EXPECT_EQ(adapt_grid(a, 10, 0.01), 9);   // too short: coarsen
    EXPECT_EQ(adapt_grid(a, 100, 0.2), 100);
}

TEST(Adaptation, FixedKeepsN)
{
    EXPECT_EQ(adapt_grid(adaptation(AdaptationMode::fixed), 17, 0.3), 17);
}

TEST(Adaptation, InvalidConfigRejected)
{
    AdaptationConfig a;
    a.N_min = 0;
    EXPECT_THROW(a.validate(), std::invalid_argument);
    a       = AdaptationConfig{};
    a.dt_eps = -1.0;
    EXPECT_THROW(a.validate(), std::invalid_argument);
    a           = AdaptationConfig{};
    a.N_initial = 200;
    EXPECT_THROW(a.validate(), std::invalid_argument);
    EXPECT_EQ(adaptation_mode_from_string("hysteresis_estimate"), AdaptationMode::hysteresis_estimate);
    EXPECT_THROW(adaptation_mode_from_string("bisection"), std::invalid_argument);
}

TEST(Adaptation, GridSizeStaysInBounds)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dt(1e-4, 1.0);
    for (AdaptationMode mode : {AdaptationMode::shrinking, AdaptationMode::hysteresis_estimate,
                                AdaptationMode::hysteresis_linear_search, AdaptationMode::fixed})
    {
        const AdaptationConfig a = adaptation(mode, 4, 60, 0.05, 0.01);
        int N = 30, prev = N;
        for (int i = 0; i < 200; ++i)
        {
            N = adapt_grid(a, N, dt(rng));
            EXPECT_GE(N, 4);
            EXPECT_LE(N, 60);
            if (mode == AdaptationMode::shrinking)
            {
                EXPECT_LE(N, prev);
            }
            prev = N;
        }
    }
}

TEST(TimeOptimalMpc, SteadyStateHoldsMinimumInterval)
{
    const Eigen::Vector2d x_f(0.8, 0.0);
    MpcConfig c          = vdp_mpc(x_f, 1);
    c.adaptation.N_min   = 1;
    TimeOptimalMpc mpc(c);
    const ControlDecision d = mpc.decide(x_f);
    EXPECT_NEAR(d.hold, 1e-3, 1e-9);
    EXPECT_LE(c.model->eval(x_f, d.u).norm(), 1e-6);
    EXPECT_EQ(d.mode, "mpc");
}

TEST(TimeOptimalMpc, NominalReplayFollowsInitialPrediction)
{
    const Eigen::Vector2d x0(0.6, 0.6);
    MpcConfig c = vdp_mpc(Eigen::Vector2d(0, 0));
    TimeOptimalMpc mpc(c);
    VectorXd x = x0;
    ControlDecision d = mpc.decide(x);
    const OcpTrajectory initial = mpc.prediction();
    double t_f = mpc.state().last_t_f;
    int k      = 0;
    while (true)
    {
        EXPECT_GE(d.hold, c.dt_min - 1e-12);
        EXPECT_LE(d.hold, c.dt_max + 1e-12);
        if (k < 10)
        {
            EXPECT_LE((d.u - initial.controls[k]).norm(), 1e-4) << k;
        }
        x = c.integrator.step(*c.model, x, d.u, d.hold);
        ++k;
        EXPECT_LE((x - initial.states[k]).norm(), 1e-6) << k;
        if (d.N <= c.adaptation.N_min + 1) break;
        const double dt_prev = d.hold;
        d                    = mpc.decide(x);
        EXPECT_NEAR(mpc.state().last_t_f, t_f - dt_prev, 1e-6) << k;
        t_f = mpc.state().last_t_f;
    }
    EXPECT_EQ(k, 50 - 3);
}

TEST(TimeOptimalMpc, InfeasibleColdStartEmitsNoControl)
{
    MpcConfig c = vdp_mpc(Eigen::Vector2d(0.8, 0.0), 3);
    c.dt_max    = 0.01;  // 0.03 s cannot reach the target
    TimeOptimalMpc mpc(c);
    try
    {
        mpc.decide(Eigen::Vector2d(0.0, 0.0));
        FAIL() << "expected ControllerError";
    }
    catch (const ControllerError& e)
    {
        EXPECT_FALSE(e.degraded());
        EXPECT_NE(e.status(), SolveStatus::optimal);
    }
    TimeOptimalMpc again(c);
    const TrajectoryLog log =
        closed_loop_run(Plant{c.model, c.integrator, 1}, again, Eigen::Vector2d(0.0, 0.0));
    EXPECT_EQ(log.stop, StopReason::controller_error);
    EXPECT_TRUE(log.entries.empty());
}

TEST(ClosedLoop, VanDerPolReachesTargetBall)
{
    MpcConfig c = vdp_mpc(Eigen::Vector2d(0, 0));
    TimeOptimalMpc mpc(c);
    ClosedLoopOptions o;
    o.stop.max_time      = 5.0;
    o.stop.target_radius = 0.05;
    const TrajectoryLog log = closed_loop_run(Plant{c.model, c.integrator, 1}, mpc, Eigen::Vector2d(0.6, 0.6), o);
    EXPECT_EQ(log.stop, StopReason::target_reached);
    EXPECT_LE(log.final_time, 5.0);
    int prev = log.entries.front().N;
    for (const LogEntry& e : log.entries)
    {
        EXPECT_LE(e.N, prev);
        EXPECT_GE(e.N, 3);
        EXPECT_GE(e.dt_applied, c.dt_min - 1e-12);
        EXPECT_LE(e.dt_applied, c.dt_max + 1e-12);
        prev = e.N;
    }
}

TEST(ClosedLoop, StartAtTargetNeedsNoControl)
{
    MpcConfig c = vdp_mpc(Eigen::Vector2d(0, 0));
    TimeOptimalMpc mpc(c);
    const TrajectoryLog log = closed_loop_run(Plant{c.model, c.integrator, 1}, mpc, Eigen::Vector2d(0, 0));
    EXPECT_LE(log.entries.size(), 1u);
    EXPECT_EQ(log.stop, StopReason::target_reached);
}

TEST(ClosedLoop, HysteresisAtOptimalSampleTimeMatchesShrinking)
{
    const Eigen::Vector2d x0(0.6, 0.6);
    MpcConfig shrink = vdp_mpc(Eigen::Vector2d(0, 0), 50);
    TimeOptimalMpc probe(shrink);
    const double dt_star = probe.decide(x0).hold;

    MpcConfig hyst         = shrink;
    hyst.adaptation.mode   = AdaptationMode::hysteresis_estimate;
    hyst.adaptation.dt_s   = dt_star;
    hyst.adaptation.dt_eps = 1e-5;
    TimeOptimalMpc a(shrink), b(hyst);
    ClosedLoopOptions o;
    o.stop.max_time = 5.0;
    const Plant plant{shrink.model, shrink.integrator, 1};
    const TrajectoryLog la = closed_loop_run(plant, a, x0, o);
    const TrajectoryLog lb = closed_loop_run(plant, b, x0, o);
    ASSERT_GE(lb.entries.size(), 47u);
    for (std::size_t i = 0; i < la.entries.size() && la.entries[i].N > 3; ++i)
        EXPECT_EQ(la.entries[i].N, lb.entries[i].N) << i;
}

TEST(ClosedLoop, ReferenceScheduleSwitchesTarget)
{
    MpcConfig c = vdp_mpc(Eigen::Vector2d(0.5, 0.0), 30);
    TimeOptimalMpc mpc(c);
    ClosedLoopOptions o;
    o.stop.max_time      = 8.0;
    o.stop.target_radius = 0.05;
    o.references         = {{2.5, Eigen::Vector2d(0.0, 0.0)}};
    const TrajectoryLog log = closed_loop_run(Plant{c.model, c.integrator, 1}, mpc, Eigen::Vector2d(0.0, 0.0), o);
    EXPECT_EQ(log.stop, StopReason::target_reached);
    EXPECT_GT(log.final_time, 2.5);
    EXPECT_LE(log.final_state.norm(), 0.05);
    bool crossed = false;
    for (const LogEntry& e : log.entries)
        if (std::abs(e.t - 2.5) < 1e-9) crossed = true;
    EXPECT_TRUE(crossed);  // a decision exactly at the switch time
}

TEST(TrajectoryLog, CsvLayoutAndRoundTrip)
{
    TrajectoryLog log;
    log.state_dim   = 2;
    log.control_dim = 1;
    log.add(LogEntry{0.0, Eigen::Vector2d(0.6, 0.6), VectorXd::Constant(1, -1.0), 0.05, 50, 1.5, "mpc"});
    log.add(LogEntry{0.05, Eigen::Vector2d(0.1, 0.2), VectorXd::Constant(1, 0.25), 0.001, 0, 0.01, "lqr"});
    log.final_time  = 0.051;
    log.final_state = Eigen::Vector2d(0.0, 0.1);
    EXPECT_EQ(log.csv_header(), "t,x1,x2,u1,dt_applied,N,cpu_ms,mode");
    EXPECT_EQ(log.mode_switches(), 1);

    std::ostringstream os;
    log.write_csv(os);
    std::istringstream is(os.str());
    const TrajectoryLog back = TrajectoryLog::read_csv(is);
    ASSERT_EQ(back.entries.size(), 2u);
    EXPECT_EQ(back.entries[1].mode, "lqr");
    EXPECT_EQ(back.entries[0].x, log.entries[0].x);
    EXPECT_EQ(back.entries[1].u, log.entries[1].u);
    EXPECT_EQ(back.final_state, log.final_state);
    std::ostringstream again;
    back.write_csv(again);
    EXPECT_EQ(again.str(), os.str());
}

TEST(TrajectoryLog, DeterministicRunsAreByteStable)
{
    auto run = [] {
        MpcConfig c = vdp_mpc(Eigen::Vector2d(0, 0), 20);
        TimeOptimalMpc mpc(c);
        ClosedLoopOptions o;
        o.stop.max_time = 3.0;
        return closed_loop_run(Plant{c.model, c.integrator, 1}, mpc, Eigen::Vector2d(0.6, 0.6), o);
    };
    EXPECT_EQ(without_cpu_column(run()), without_cpu_column(run()));
}
