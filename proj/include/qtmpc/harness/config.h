#ifndef QTMPC_HARNESS_CONFIG_H_
#define QTMPC_HARNESS_CONFIG_H_

#include <qtmpc/controller/closed_loop.h>
#include <qtmpc/dual_mode/region.h>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtmpc {

enum class Method
{
    local_grid,
    global_grid,
    tompc,
    l1,
    dual_mode
};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/**
 * One experiment as a single JSON document. Every field has a default, so a
 * config file only lists what differs. Unknown keys are rejected.
 */
struct ExperimentConfig
{
    std::string name = "experiment";

    // plant and task
    std::string model = "vdp";
    Scheme integrator = Scheme::forward_euler;
    int substeps      = 1;  // plant integrator steps per applied hold
    VectorXd x_s;
    VectorXd x_f;
    ReferenceSchedule references;  // closed loop only: (time, x_f) switches

    // method
    Method method = Method::local_grid;
    int N         = 16;
    double dt_min = 1e-3;
    double dt_max = 1.0;
    AdaptationConfig adaptation;  // N_initial follows N

    // fixed-grid baselines
    double fixed_dt = 0.1;
    int tompc_N_max = 30;
    MatrixXd Q_s;  // empty: identity
    double theta = 1.1;
    VectorXd l1_weights;  // empty: ones

    // dual mode
    MatrixXd lqr_Q;  // empty: identity
    MatrixXd lqr_R;  // empty: identity
    double lqr_dt = 0.0;  // <= 0: dt_min
    std::optional<MatrixXd> x_lin;  // ellipse shape around x_f; estimated when absent
    double roa_grid_step  = 0.2;
    double roa_half_width = 1.0;
    double roa_horizon    = 10.0;

    // controllability region
    int region_N = 0;             // <= 0: adaptation.N_min
    double region_t_c = 0.0;      // <= 0: (region_N - 1) dt_max
    double control_step = 0.1;
    double time_step    = 0.01;
    std::uint64_t region_budget = 50'000'000;

    // closed loop
    StopCriteria stop;
    double sample_period = 0.0;

    // solver
    int sqp_max_iterations = 300;
    double eps_kkt         = 1e-6;
    double eps_feas        = 1e-7;

    // benchmark
    int reference_N = 200;
    int repetitions = 1;
    std::vector<int> sweep_N;  // bench: one run set per N (empty: N only)

    std::string output_dir = "out";
    std::uint64_t seed     = 0;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    void save(const std::string& path) const;

    SolverOptions solver_options() const;
    int effective_region_N() const { return region_N > 0 ? region_N : adaptation.N_min; }
    double effective_region_t_c() const;
    double effective_lqr_dt() const { return lqr_dt > 0.0 ? lqr_dt : dt_min; }

    bool operator==(const ExperimentConfig& other) const { return to_json() == other.to_json(); }
};

/// A config file holds one config object or an array of them.
std::vector<ExperimentConfig> load_configs(const std::string& path);

}  // namespace qtmpc

#endif  // QTMPC_HARNESS_CONFIG_H_
