#ifndef QTMPC_TRANSCRIPTION_EDGES_H_
#define QTMPC_TRANSCRIPTION_EDGES_H_

#include <qtmpc/dynamics/integrator.h>
#include <qtmpc/dynamics/model.h>
#include <qtmpc/hypergraph/hypergraph.h>

namespace qtmpc {

/// x_{k+1} = phi(dt, x_k, u_k) in defect form; vertices (x_k, u_k, dt, x_{k+1}).
class DynamicsEdge : public Edge
{
 public:
    DynamicsEdge(Model::Ptr model, const Integrator& integrator, int x_k, int u_k, int dt, int x_next, int stage);

    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;

 private:
    Model::Ptr _model;
    Integrator _integrator;
};

/// dt_k - dt_{k+1} = 0.
class UniformityEdge : public Edge
{
 public:
    UniformityEdge(int dt_k, int dt_next, int stage);

    bool is_linear() const override { return true; }
    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;
};

/**
 * Transition time contribution weight * dt. Its curvature model is that of
 * (weight * dt)^2 / weight, i.e. 2 * weight: the squared objective has the
 * same minimizer and gives the QP a positive definite dt block.
 */
class TimeObjectiveEdge : public Edge
{
 public:
    TimeObjectiveEdge(int dt, double weight);

    bool is_linear() const override { return true; }
    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;
    bool hessian_model(const VertexValues& values, MatrixXd& hessian) const override;

 private:
    double _weight;
};

/// (x - target)' Q (x - target) on a state vertex, Gauss-Newton curvature 2Q.
class QuadraticStateEdge : public Edge
{
 public:
    QuadraticStateEdge(int x, const VectorXd& target, const MatrixXd& Q, int stage);

    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;
    bool hessian_model(const VertexValues& values, MatrixXd& hessian) const override;

 private:
    VectorXd _target;
    MatrixXd _Q;
};

/// Sum of weights_i * s_i over an auxiliary slack vertex.
class WeightedSumEdge : public Edge
{
 public:
    WeightedSumEdge(int s, const VectorXd& weights, int stage);

    bool is_linear() const override { return true; }
    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;

 private:
    VectorXd _weights;
};

/// Stacked +-W (x - target) - s <= 0 (slack bound of an l1 term).
class AbsoluteSlackEdge : public Edge
{
 public:
    AbsoluteSlackEdge(int x, int s, const VectorXd& target, const VectorXd& weights, int stage);

    bool is_linear() const override { return true; }
    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override;
    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override;

 private:
    VectorXd _target;
    VectorXd _weights;
};

}  // namespace qtmpc

#endif  // QTMPC_TRANSCRIPTION_EDGES_H_
