#include <qtmpc/dynamics/models.h>
#include <qtmpc/harness/config.h>

#include <fstream>
#include <set>
#include <stdexcept>

namespace qtmpc {

using nlohmann::json;

namespace {

json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vec_from(const json& j, const std::string& key)
{
    if (!j.is_array()) throw std::invalid_argument("config: '" + key + "' must be an array of numbers");
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json mat_json(const MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
    return rows;
}

MatrixXd mat_from(const json& j, const std::string& key)
{
    if (!j.is_array()) throw std::invalid_argument("config: '" + key + "' must be an array of rows");
    if (j.empty()) return MatrixXd();
    const std::size_t cols = j[0].size();
    MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r)
    {
        if (!j[r].is_array() || j[r].size() != cols)
            throw std::invalid_argument("config: '" + key + "' rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

/// Reads optional keys of one object and rejects the ones nobody asked for.
class Reader
{
 public:
    Reader(const json& j, std::string where) : _j(j), _where(std::move(where))
    {
        if (!_j.is_object()) throw std::invalid_argument("config: " + _where + " must be an object");
    }

    const json* find(const std::string& key)
    {
        _known.insert(key);
        auto it = _j.find(key);
        return it == _j.end() ? nullptr : &*it;
    }

    template <typename T>
    void get(const std::string& key, T& out)
    {
        if (const json* v = find(key))
        {
            try
            {
                out = v->get<T>();
            }
            catch (const json::exception& e)
            {
                throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
            }
        }
    }

    void finish() const
    {
        for (auto it = _j.begin(); it != _j.end(); ++it)
            if (!_known.count(it.key())) throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + _where);
    }

 private:
    const json& _j;
    std::string _where;
    std::set<std::string> _known;
};

}  // namespace

std::string_view to_string(Method method)
{
    switch (method)
    {
        case Method::local_grid: return "local_grid";
        case Method::global_grid: return "global_grid";
        case Method::tompc: return "tompc";
        case Method::l1: return "l1";
        case Method::dual_mode: return "dual_mode";
    }
    return "unknown";
}

Method method_from_string(std::string_view name)
{
    for (Method m : {Method::local_grid, Method::global_grid, Method::tompc, Method::l1, Method::dual_mode})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

double ExperimentConfig::effective_region_t_c() const
{
    return region_t_c > 0.0 ? region_t_c : (effective_region_N() - 1) * dt_max;
}

SolverOptions ExperimentConfig::solver_options() const
{
    SolverOptions o;
    o.sqp_max_iterations = sqp_max_iterations;
    o.eps_kkt            = eps_kkt;
    o.eps_feas           = eps_feas;
    return o;
}

void ExperimentConfig::validate() const
{
    const Model::Ptr m = make_model(model);
    const int p = m->state_dim(), q = m->control_dim();
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument("config: " + what);
    };
    need(x_s.size() == p, "x_s must have " + std::to_string(p) + " entries");
    need(x_f.size() == p, "x_f must have " + std::to_string(p) + " entries");
    for (const auto& [t, x] : references) need(x.size() == p && t >= 0.0, "reference entries need t >= 0 and a full x_f");
    for (std::size_t i = 1; i < references.size(); ++i)
        need(references[i].first > references[i - 1].first, "reference times must increase");
    need(substeps >= 1, "substeps must be >= 1");
    need(N >= 1, "N must be >= 1");
    need(dt_min >= 0.0 && dt_max >= dt_min && dt_max > 0.0, "need 0 <= dt_min <= dt_max, dt_max > 0");
    AdaptationConfig a = adaptation;
    a.N_initial        = N;
    if (method == Method::local_grid || method == Method::global_grid || method == Method::dual_mode) a.validate();
    need(fixed_dt > 0.0 && tompc_N_max >= 1, "fixed_dt > 0 and tompc_N_max >= 1 required");
    need(Q_s.size() == 0 || (Q_s.rows() == p && Q_s.cols() == p), "Q_s must be p x p");
    need(theta > 0.0, "theta must be positive");
    need(l1_weights.size() == 0 || l1_weights.size() == p, "l1_weights must have p entries");
    need(lqr_Q.size() == 0 || (lqr_Q.rows() == p && lqr_Q.cols() == p), "lqr.Q must be p x p");
    need(lqr_R.size() == 0 || (lqr_R.rows() == q && lqr_R.cols() == q), "lqr.R must be q x q");
    need(!x_lin || (x_lin->rows() == p && x_lin->cols() == p), "x_lin must be p x p");
    need(roa_grid_step > 0.0 && roa_half_width > 0.0 && roa_horizon > 0.0, "roa settings must be positive");
    need(control_step > 0.0 && time_step > 0.0, "region steps must be positive");
    need(stop.max_time > 0.0 && stop.max_steps >= 1, "stop.max_time > 0 and stop.max_steps >= 1 required");
    need(sample_period >= 0.0, "sample_period must be >= 0");
    need(sqp_max_iterations >= 1 && eps_kkt > 0.0 && eps_feas > 0.0, "solver settings must be positive");
    need(reference_N >= 1 && repetitions >= 1, "reference_N and repetitions must be >= 1");
    for (int n : sweep_N) need(n >= 1, "sweep_N entries must be >= 1");
}

json ExperimentConfig::to_json() const
{
    json j;
    j["name"]       = name;
    j["model"]      = model;
    j["integrator"] = std::string(qtmpc::to_string(integrator));
    j["substeps"]   = substeps;
    j["x_s"]        = vec_json(x_s);
    j["x_f"]        = vec_json(x_f);
    json refs       = json::array();
    for (const auto& [t, x] : references) refs.push_back({{"t", t}, {"x_f", vec_json(x)}});
    j["references"] = refs;
    j["method"]     = std::string(qtmpc::to_string(method));
    j["N"]          = N;
    j["dt_min"]     = dt_min;
    j["dt_max"]     = dt_max;
    j["adaptation"] = {{"mode", std::string(qtmpc::to_string(adaptation.mode))},
                       {"N_min", adaptation.N_min},
                       {"N_max", adaptation.N_max},
                       {"dt_s", adaptation.dt_s},
                       {"dt_eps", adaptation.dt_eps}};
    j["fixed_dt"]    = fixed_dt;
    j["tompc_N_max"] = tompc_N_max;
    j["Q_s"]         = mat_json(Q_s);
    j["theta"]       = theta;
    j["l1_weights"]  = vec_json(l1_weights);
    j["lqr"]         = {{"Q", mat_json(lqr_Q)}, {"R", mat_json(lqr_R)}, {"dt", lqr_dt}};
    j["x_lin"]       = x_lin ? mat_json(*x_lin) : json(nullptr);
    j["roa"]         = {{"grid_step", roa_grid_step}, {"half_width", roa_half_width}, {"horizon", roa_horizon}};
    j["region"]      = {{"N", region_N},
                        {"t_c", region_t_c},
                        {"control_step", control_step},
                        {"time_step", time_step},
                        {"budget", region_budget}};
    j["stop"]   = {{"max_time", stop.max_time}, {"target_radius", stop.target_radius}, {"max_steps", stop.max_steps}};
    j["sample_period"] = sample_period;
    j["solver"] = {{"sqp_max_iterations", sqp_max_iterations}, {"eps_kkt", eps_kkt}, {"eps_feas", eps_feas}};
    j["reference_N"] = reference_N;
    j["repetitions"] = repetitions;
    j["sweep_N"]     = sweep_N;
    j["output_dir"]  = output_dir;
    j["seed"]        = seed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    Reader r(j, "config");
    r.get("name", c.name);
    r.get("model", c.model);
    if (const json* v = r.find("integrator")) c.integrator = scheme_from_string(v->get<std::string>());
    r.get("substeps", c.substeps);
    if (const json* v = r.find("x_s")) c.x_s = vec_from(*v, "x_s");
    if (const json* v = r.find("x_f")) c.x_f = vec_from(*v, "x_f");
    if (const json* v = r.find("references"))
    {
        if (!v->is_array()) throw std::invalid_argument("config: 'references' must be an array");
        for (const json& e : *v)
        {
            Reader er(e, "references entry");
            double t = 0.0;
            er.get("t", t);
            const json* x = er.find("x_f");
            if (!x) throw std::invalid_argument("config: reference entry without x_f");
            c.references.emplace_back(t, vec_from(*x, "references.x_f"));
            er.finish();
        }
    }
    if (const json* v = r.find("method")) c.method = method_from_string(v->get<std::string>());
    r.get("N", c.N);
    r.get("dt_min", c.dt_min);
    r.get("dt_max", c.dt_max);
    if (const json* v = r.find("adaptation"))
    {
        Reader a(*v, "adaptation");
        if (const json* m = a.find("mode")) c.adaptation.mode = adaptation_mode_from_string(m->get<std::string>());
        a.get("N_min", c.adaptation.N_min);
        a.get("N_max", c.adaptation.N_max);
        a.get("dt_s", c.adaptation.dt_s);
        a.get("dt_eps", c.adaptation.dt_eps);
        a.finish();
    }
    r.get("fixed_dt", c.fixed_dt);
    r.get("tompc_N_max", c.tompc_N_max);
    if (const json* v = r.find("Q_s")) c.Q_s = mat_from(*v, "Q_s");
    r.get("theta", c.theta);
    if (const json* v = r.find("l1_weights")) c.l1_weights = vec_from(*v, "l1_weights");
    if (const json* v = r.find("lqr"))
    {
        Reader l(*v, "lqr");
        if (const json* m = l.find("Q")) c.lqr_Q = mat_from(*m, "lqr.Q");
        if (const json* m = l.find("R")) c.lqr_R = mat_from(*m, "lqr.R");
        l.get("dt", c.lqr_dt);
        l.finish();
    }
    if (const json* v = r.find("x_lin"); v && !v->is_null()) c.x_lin = mat_from(*v, "x_lin");
    if (const json* v = r.find("roa"))
    {
        Reader o(*v, "roa");
        o.get("grid_step", c.roa_grid_step);
        o.get("half_width", c.roa_half_width);
        o.get("horizon", c.roa_horizon);
        o.finish();
    }
    if (const json* v = r.find("region"))
    {
        Reader o(*v, "region");
        o.get("N", c.region_N);
        o.get("t_c", c.region_t_c);
        o.get("control_step", c.control_step);
        o.get("time_step", c.time_step);
        o.get("budget", c.region_budget);
        o.finish();
    }
    if (const json* v = r.find("stop"))
    {
        Reader o(*v, "stop");
        o.get("max_time", c.stop.max_time);
        o.get("target_radius", c.stop.target_radius);
        o.get("max_steps", c.stop.max_steps);
        o.finish();
    }
    r.get("sample_period", c.sample_period);
    if (const json* v = r.find("solver"))
    {
        Reader o(*v, "solver");
        o.get("sqp_max_iterations", c.sqp_max_iterations);
        o.get("eps_kkt", c.eps_kkt);
        o.get("eps_feas", c.eps_feas);
        o.finish();
    }
    r.get("reference_N", c.reference_N);
    r.get("repetitions", c.repetitions);
    r.get("sweep_N", c.sweep_N);
    r.get("output_dir", c.output_dir);
    r.get("seed", c.seed);
    r.finish();
    c.adaptation.N_initial = c.N;
    return c;
}

namespace {

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw std::invalid_argument("config '" + path + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    ExperimentConfig c = from_json(read_json_file(path));
    c.validate();
    return c;
}

void ExperimentConfig::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_json().dump(2) << '\n';
}

std::vector<ExperimentConfig> load_configs(const std::string& path)
{
    const json j = read_json_file(path);
    std::vector<ExperimentConfig> out;
    if (j.is_array())
        for (const json& e : j) out.push_back(ExperimentConfig::from_json(e));
    else
        out.push_back(ExperimentConfig::from_json(j));
    for (const ExperimentConfig& c : out) c.validate();
    return out;
}

}  // namespace qtmpc
