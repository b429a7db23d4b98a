#include <qtmpc/harness/benchmark.h>
#include <qtmpc/harness/experiments.h>
#include <qtmpc/transcription/graph_json.h>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace qtmpc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common
{
    std::string config;
    std::string out;
    bool trace = false;
};

/// Failed run, reported as one machine-parsable line on stderr.
class CommandFailure : public std::runtime_error
{
 public:
    using std::runtime_error::runtime_error;
};

fs::path out_dir(const Common& c, const ExperimentConfig& cfg)
{
    fs::path dir = c.out.empty() ? fs::path(cfg.output_dir) : fs::path(c.out);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    return os;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

int cmd_solve(const Common& c)
{
    const ExperimentConfig cfg = ExperimentConfig::load(c.config);
    const fs::path dir = out_dir(c, cfg);
    std::ostringstream trace;
    const OpenLoopResult r = solve_open_loop(cfg, c.trace ? &trace : nullptr);
    open_loop_log(cfg, r).save_csv((dir / "trajectory.csv").string());
    if (r.ocp) open_out(dir / "graph.json") << graph_to_json_string(r.ocp->graph()) << '\n';
    if (c.trace) open_out(dir / "solver_trace.csv") << trace.str();
    write_json(dir / "solution.json", {{"config", cfg.name},
                                       {"method", std::string(to_string(cfg.method))},
                                       {"status", std::string(to_string(r.status))},
                                       {"N", r.N},
                                       {"t_f", r.t_f},
                                       {"iterations", r.iterations},
                                       {"wall_ms", r.wall_ms},
                                       {"message", r.message}});
    std::cout << "status=" << to_string(r.status) << " N=" << r.N << " t_f=" << r.t_f << '\n';
    if (r.status != SolveStatus::optimal) throw CommandFailure("solve status " + std::string(to_string(r.status)) + ": " + r.message);
    return 0;
}

int cmd_simulate(const Common& c)
{
    const ExperimentConfig cfg = ExperimentConfig::load(c.config);
    const fs::path dir = out_dir(c, cfg);
    const TrajectoryLog log = simulate_closed_loop(cfg);
    log.save_csv((dir / "trajectory_log.csv").string());
    const VectorXd& xf = log.final_state;
    write_json(dir / "summary.json", {{"config", cfg.name},
                                      {"stop", std::string(to_string(log.stop))},
                                      {"final_time", log.final_time},
                                      {"final_state", std::vector<double>(xf.data(), xf.data() + xf.size())},
                                      {"steps", log.entries.size()},
                                      {"mode_switches", log.mode_switches()},
                                      {"message", log.message}});
    std::cout << "stop=" << to_string(log.stop) << " t=" << log.final_time << " steps=" << log.entries.size()
              << " switches=" << log.mode_switches() << '\n';
    if (log.stop == StopReason::controller_error) throw CommandFailure("controller error: " + log.message);
    return 0;
}

int cmd_region(const Common& c, const std::string& kind)
{
    const ExperimentConfig cfg = ExperimentConfig::load(c.config);
    const fs::path dir = out_dir(c, cfg);
    if (kind == "roa")
    {
        const RoaEstimate roa = region_of_attraction(cfg);
        std::ofstream os = open_out(dir / "roa_samples.csv");
        const int p = static_cast<int>(cfg.x_f.size());
        for (int i = 1; i <= p; ++i) os << 'x' << i << ',';
        os << "qualifies\n";
        os.precision(17);
        for (const RoaSample& s : roa.samples)
        {
            for (int i = 0; i < p; ++i) os << s.x[i] << ',';
            os << (s.qualifies ? 1 : 0) << '\n';
        }
        write_json(dir / "ellipse.json", roa.ellipse.to_json());
        std::cout << "ellipse=" << roa.ellipse.to_json().dump() << '\n';
        return 0;
    }
    const RegionEstimate region = controllability_region(cfg);
    std::ofstream os = open_out(dir / "region.csv");
    region.write_csv(os);
    write_json(dir / "region.json", region.metadata());
    std::cout << "points=" << region.size() << " N=" << region.N << " t_c=" << region.t_c << '\n';
    return 0;
}

int cmd_bench(const Common& c, int repetitions)
{
    const std::vector<ExperimentConfig> cfgs = load_configs(c.config);
    const fs::path dir = out_dir(c, cfgs.front());
    const BenchmarkReport report = run_benchmark(cfgs, repetitions);
    std::ofstream rows = open_out(dir / "bench_rows.csv");
    report.write_rows_csv(rows);
    std::ofstream summary = open_out(dir / "bench_summary.csv");
    report.write_summary_csv(summary);
    report.write_summary_csv(std::cout);
    int failed = 0;
    for (const BenchmarkSummary& s : report.summary) failed += s.status == "error" ? 1 : 0;
    if (failed > 0) throw CommandFailure(std::to_string(failed) + " benchmark config(s) ended in error");
    return 0;
}

int cmd_check(const Common& c)
{
    const ExperimentConfig cfg = ExperimentConfig::load(c.config);
    const fs::path dir = out_dir(c, cfg);
    const Ellipse region = cfg.x_lin ? Ellipse(cfg.x_f, *cfg.x_lin) : region_of_attraction(cfg).ellipse;
    const RegionEstimate P = controllability_region(cfg);
    const ContainmentResult res = check_containment(P, region);
    json ce = json::array();
    for (const VectorXd& x : res.counterexamples) ce.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    write_json(dir / "check.json", {{"contained", res.contained},
                                    {"violations", res.violations},
                                    {"points", P.size()},
                                    {"N", P.N},
                                    {"t_c", P.t_c},
                                    {"ellipse", region.to_json()},
                                    {"counterexamples", ce}});
    std::cout << "contained=" << (res.contained ? "true" : "false") << " points=" << P.size()
              << " violations=" << res.violations << '\n';
    if (!res.contained) throw CommandFailure("containment violated by " + std::to_string(res.violations) + " point(s)");
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-optimal MPC on variable uniform grids"};
    app.require_subcommand(1);
    Common common;
    std::string region_kind = "controllability";
    int repetitions         = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory (default: output_dir of the config)");
        sub->add_flag("--trace", common.trace, "write per-iteration solver trace");
    };
    CLI::App* solve    = app.add_subcommand("solve", "open-loop solve: trajectory CSV, graph JSON, solution JSON");
    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run: trajectory log CSV");
    CLI::App* region   = app.add_subcommand("region", "controllability region (CSV + JSON) or LQR region of attraction");
    CLI::App* bench    = app.add_subcommand("bench", "benchmark sweep: per-run rows and medians");
    CLI::App* check    = app.add_subcommand("check", "containment of the controllability region in X_lin");
    for (CLI::App* s : {solve, simulate, region, bench, check}) add_common(s);
    region->add_option("--kind", region_kind, "controllability or roa")
        ->check(CLI::IsMember({"controllability", "roa"}));
    bench->add_option("--repetitions", repetitions, "override the configs' repetition count");

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try
    {
        if (*solve) return cmd_solve(common);
        if (*simulate) return cmd_simulate(common);
        if (*region) return cmd_region(common, region_kind);
        if (*bench) return cmd_bench(common, repetitions);
        if (*check) return cmd_check(common);
    }
    catch (const std::exception& e)
    {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: command=" << name << " message=\"" << msg << "\"\n";
        return 1;
    }
    return 1;
}
