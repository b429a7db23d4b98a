#include <qtmpc/baselines/l1_mpc.h>

#include <qtmpc/transcription/edges.h>

#include <chrono>
#include <cmath>
#include <memory>

namespace qtmpc {

void L1Config::validate(int state_dim) const
{
    if (!(dt > 0.0)) throw std::invalid_argument("L1Config: dt must be positive");
    if (N < 1) throw std::invalid_argument("L1Config: N must be at least 1");
    if (!(theta > 1.0)) throw std::invalid_argument("L1Config: theta must exceed 1");
    if (weights.size() > 0 && weights.size() != state_dim) throw std::invalid_argument("L1Config: weight dimension");
}

L1Result l1_solve(Model::Ptr model, const Integrator& integrator, const VectorXd& x_s, const VectorXd& x_f,
                  const L1Config& cfg)
{
    if (!model) throw std::invalid_argument("l1_solve: missing model");
    const int p = model->state_dim();
    cfg.validate(p);
    const VectorXd W = cfg.weights.size() > 0 ? cfg.weights : VectorXd::Ones(p);
    const auto start = std::chrono::steady_clock::now();

    OcpSpec spec{model, integrator, GridType::global_uniform, x_s, TerminalSet::point(x_f), cfg.N, cfg.dt, cfg.dt};
    spec.time_objective = false;
    GridOcp ocp(spec);
    Hypergraph& g = ocp.graph();
    std::vector<int> slack_ids;
    for (int k = 1; k < cfg.N; ++k)
    {
        const VectorXd& xk = g.vertex(ocp.state_vertex(k)).value;
        Vertex s           = Vertex::make(VertexKind::auxiliary, k, (W.array() * (xk - x_f).array()).abs().matrix());
        s.lower            = VectorXd::Zero(p);
        const int sid      = g.add_vertex(std::move(s));
        slack_ids.push_back(sid);
        g.add_edge(std::make_shared<AbsoluteSlackEdge>(ocp.state_vertex(k), sid, x_f, W, k));
        g.add_edge(std::make_shared<WeightedSumEdge>(sid, VectorXd::Constant(p, std::pow(cfg.theta, k)), k));
    }
    g.finalize();

    const NlpSolution sol = ocp.solve(cfg.solver);
    L1Result out;
    out.status     = sol.status;
    out.message    = sol.message;
    out.trajectory = ocp.trajectory(sol.parameters);
    out.cost       = sol.objective + (W.array() * (x_s - x_f).array()).abs().sum();  // k = 0 term
    const std::vector<VectorXd> values = g.values_at(sol.parameters);
    for (int id : slack_ids) out.slacks.push_back(values[id]);
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace qtmpc
