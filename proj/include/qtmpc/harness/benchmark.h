#ifndef QTMPC_HARNESS_BENCHMARK_H_
#define QTMPC_HARNESS_BENCHMARK_H_

#include <qtmpc/harness/config.h>

#include <iosfwd>
#include <string>
#include <vector>

namespace qtmpc {

struct BenchmarkRow
{
    std::string config;
    Method method = Method::local_grid;
    int N         = 0;  // N* for TOMPC
    int repetition = 0;
    std::string status;
    double t_f            = 0.0;
    double integral_error = 0.0;  // NaN when unavailable
    int iterations        = 0;
    double wall_ms        = 0.0;
    std::string message;
};

struct BenchmarkSummary
{
    std::string config;
    Method method = Method::local_grid;
    int N         = 0;
    int runs      = 0;
    int failures  = 0;
    std::string status;  // of the first run
    double t_f            = 0.0;
    double integral_error = 0.0;
    double median_wall_ms = 0.0;
};

struct BenchmarkReport
{
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkSummary> summary;

    /// Per-run rows; timing is confined to the wall_ms column.
    void write_rows_csv(std::ostream& os) const;
    void write_summary_csv(std::ostream& os) const;
};

/// Expands sweep_N: one config per listed N (name suffixed with _N<n>).
std::vector<ExperimentConfig> expand_sweep(const std::vector<ExperimentConfig>& configs);

/**
 * Runs every config `repetitions` times (<= 0: the config's own count) and
 * reports per-run rows plus medians. Failures become status rows.
 */
BenchmarkReport run_benchmark(const std::vector<ExperimentConfig>& configs, int repetitions = 0);

}  // namespace qtmpc

#endif  // QTMPC_HARNESS_BENCHMARK_H_
