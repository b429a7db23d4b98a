#include <qtmpc/transcription/edges.h>

#include <string>

namespace qtmpc {

DynamicsEdge::DynamicsEdge(Model::Ptr model, const Integrator& integrator, int x_k, int u_k, int dt, int x_next,
                           int stage)
    : Edge(EdgeKind::equality, {x_k, u_k, dt, x_next}, model->state_dim(), "dynamics_" + std::to_string(stage)),
      _model(std::move(model)),
      _integrator(integrator)
{
}

void DynamicsEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    residual = _integrator.defect(*_model, *values[0], *values[1], (*values[2])[0], *values[3]);
}

bool DynamicsEdge::jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const
{
    Integrator::DefectJacobian jac;
    if (!_integrator.defect_jacobian(*_model, *values[0], *values[1], (*values[2])[0], *values[3], jac)) return false;
    blocks = {jac.x, jac.u, jac.dt, jac.x_next};
    return true;
}

UniformityEdge::UniformityEdge(int dt_k, int dt_next, int stage)
    : Edge(EdgeKind::equality, {dt_k, dt_next}, 1, "uniformity_" + std::to_string(stage))
{
}

void UniformityEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    residual[0] = (*values[0])[0] - (*values[1])[0];
}

bool UniformityEdge::jacobian(const VertexValues&, std::vector<MatrixXd>& blocks) const
{
    blocks = {MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, -1.0)};
    return true;
}

TimeObjectiveEdge::TimeObjectiveEdge(int dt, double weight)
    : Edge(EdgeKind::objective, {dt}, 1, "transition_time"), _weight(weight)
{
}

void TimeObjectiveEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    residual[0] = _weight * (*values[0])[0];
}

bool TimeObjectiveEdge::jacobian(const VertexValues&, std::vector<MatrixXd>& blocks) const
{
    blocks = {MatrixXd::Constant(1, 1, _weight)};
    return true;
}

bool TimeObjectiveEdge::hessian_model(const VertexValues&, MatrixXd& hessian) const
{
    hessian = MatrixXd::Constant(1, 1, 2.0 * _weight);
    return true;
}

QuadraticStateEdge::QuadraticStateEdge(int x, const VectorXd& target, const MatrixXd& Q, int stage)
    : Edge(EdgeKind::objective, {x}, 1, "state_cost_" + std::to_string(stage)), _target(target), _Q(Q)
{
}

void QuadraticStateEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    const VectorXd e = *values[0] - _target;
    residual[0]      = e.dot(_Q * e);
}

bool QuadraticStateEdge::jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const
{
    const VectorXd e = *values[0] - _target;
    blocks           = {((_Q + _Q.transpose()) * e).transpose()};
    return true;
}

bool QuadraticStateEdge::hessian_model(const VertexValues&, MatrixXd& hessian) const
{
    hessian = _Q + _Q.transpose();
    return true;
}

WeightedSumEdge::WeightedSumEdge(int s, const VectorXd& weights, int stage)
    : Edge(EdgeKind::objective, {s}, 1, "slack_cost_" + std::to_string(stage)), _weights(weights)
{
}

void WeightedSumEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    residual[0] = _weights.dot(*values[0]);
}

bool WeightedSumEdge::jacobian(const VertexValues&, std::vector<MatrixXd>& blocks) const
{
    blocks = {_weights.transpose()};
    return true;
}

AbsoluteSlackEdge::AbsoluteSlackEdge(int x, int s, const VectorXd& target, const VectorXd& weights, int stage)
    : Edge(EdgeKind::inequality, {x, s}, 2 * static_cast<int>(target.size()), "l1_slack_" + std::to_string(stage)),
      _target(target),
      _weights(weights)
{
}

void AbsoluteSlackEdge::evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const
{
    const int p      = static_cast<int>(_target.size());
    const VectorXd e = _weights.cwiseProduct(*values[0] - _target);
    residual.head(p) = e - *values[1];
    residual.tail(p) = -e - *values[1];
}

bool AbsoluteSlackEdge::jacobian(const VertexValues&, std::vector<MatrixXd>& blocks) const
{
    const int p = static_cast<int>(_target.size());
    MatrixXd jx(2 * p, p), js(2 * p, p);
    jx << MatrixXd(_weights.asDiagonal()), -MatrixXd(_weights.asDiagonal());
    js << -MatrixXd::Identity(p, p), -MatrixXd::Identity(p, p);
    blocks = {jx, js};
    return true;
}

}  // namespace qtmpc
