#include <qtmpc/harness/benchmark.h>
#include <qtmpc/harness/experiments.h>

#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace qtmpc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Reference solutions depend only on the task, not on method or N.
std::string task_key(const ExperimentConfig& cfg)
{
    ExperimentConfig t = cfg;
    t.name        = "";
    t.method      = Method::local_grid;
    t.N           = cfg.reference_N;
    t.repetitions = 1;
    t.sweep_N.clear();
    t.output_dir = "";
    t.adaptation = AdaptationConfig{};
    return t.to_json().dump();
}

void put_double(std::ostream& os, double v)
{
    if (std::isnan(v))
        os << "nan";
    else
        os << v;
}

}  // namespace

std::vector<ExperimentConfig> expand_sweep(const std::vector<ExperimentConfig>& configs)
{
    std::vector<ExperimentConfig> out;
    for (const ExperimentConfig& c : configs)
    {
        if (c.sweep_N.empty())
        {
            out.push_back(c);
            continue;
        }
        for (int n : c.sweep_N)
        {
            ExperimentConfig e = c;
            e.sweep_N.clear();
            e.N    = n;
            e.name = c.name + "_N" + std::to_string(n);
            e.adaptation.N_min = std::min(e.adaptation.N_min, n);
            e.adaptation.N_max = std::max(e.adaptation.N_max, n);
            out.push_back(std::move(e));
        }
    }
    return out;
}

BenchmarkReport run_benchmark(const std::vector<ExperimentConfig>& configs, int repetitions)
{
    BenchmarkReport report;
    std::map<std::string, std::pair<DenseTrajectory, std::string>> references;

    for (const ExperimentConfig& cfg : expand_sweep(configs))
    {
        const int reps = repetitions > 0 ? repetitions : cfg.repetitions;
        std::vector<double> walls;
        BenchmarkSummary s;
        s.config = cfg.name;
        s.method = cfg.method;
        s.N      = cfg.N;

        for (int rep = 0; rep < reps; ++rep)
        {
            BenchmarkRow row;
            row.config         = cfg.name;
            row.method         = cfg.method;
            row.N              = cfg.N;
            row.repetition     = rep;
            row.integral_error = kNaN;
            try
            {
                if (cfg.method == Method::dual_mode)
                    throw std::invalid_argument("dual_mode has no open-loop benchmark; use simulate");
                const OpenLoopResult r = solve_open_loop(cfg);
                row.status     = std::string(to_string(r.status));
                row.N          = r.N;
                row.t_f        = r.t_f;
                row.iterations = r.iterations;
                row.wall_ms    = r.wall_ms;
                row.message    = r.message;
                if (r.status == SolveStatus::optimal)
                {
                    const std::string key = task_key(cfg);
                    auto it               = references.find(key);
                    if (it == references.end())
                    {
                        std::pair<DenseTrajectory, std::string> ref;
                        try
                        {
                            ref.first = reference_solution(cfg);
                        }
                        catch (const std::exception& e)
                        {
                            ref.second = e.what();
                        }
                        it = references.emplace(key, std::move(ref)).first;
                    }
                    if (!it->second.second.empty())
                        row.message = it->second.second;
                    else
                    {
                        const Model::Ptr model = model_from_config(cfg);
                        row.integral_error = integral_error(it->second.first, r.trajectory.control(), cfg.x_s, *model,
                                                            integrator_from_config(cfg));
                    }
                }
            }
            catch (const std::exception& e)
            {
                row.status  = "error";
                row.message = e.what();
            }
            if (row.status != "optimal") ++s.failures;
            if (rep == 0)
            {
                s.status         = row.status;
                s.N              = row.N;
                s.t_f            = row.t_f;
                s.integral_error = row.integral_error;
            }
            walls.push_back(row.wall_ms);
            report.rows.push_back(std::move(row));
        }
        s.runs           = reps;
        s.median_wall_ms = median(walls);
        report.summary.push_back(std::move(s));
    }
    return report;
}

void BenchmarkReport::write_rows_csv(std::ostream& os) const
{
    os << "config,method,N,repetition,status,t_f,integral_error,iterations,wall_ms,message\n";
    os.precision(12);
    for (const BenchmarkRow& r : rows)
    {
        os << r.config << ',' << to_string(r.method) << ',' << r.N << ',' << r.repetition << ',' << r.status << ',';
        put_double(os, r.t_f);
        os << ',';
        put_double(os, r.integral_error);
        os << ',' << r.iterations << ',';
        put_double(os, r.wall_ms);
        os << ",\"";
        for (char c : r.message) os << (c == '"' ? "\"\"" : std::string(1, c == '\n' ? ' ' : c));
        os << "\"\n";
    }
}

void BenchmarkReport::write_summary_csv(std::ostream& os) const
{
    os << "config,method,N,runs,failures,status,t_f,integral_error,median_wall_ms\n";
    os.precision(12);
    for (const BenchmarkSummary& s : summary)
    {
        os << s.config << ',' << to_string(s.method) << ',' << s.N << ',' << s.runs << ',' << s.failures << ','
           << s.status << ',';
        put_double(os, s.t_f);
        os << ',';
        put_double(os, s.integral_error);
        os << ',';
        put_double(os, s.median_wall_ms);
        os << '\n';
    }
}

}  // namespace qtmpc
