#ifndef QTMPC_HYPERGRAPH_GENERIC_EDGE_H_
#define QTMPC_HYPERGRAPH_GENERIC_EDGE_H_

#include <qtmpc/hypergraph/hypergraph.h>

#include <functional>

namespace qtmpc {

/// Edge defined by callables; convenient for tests and small auxiliary terms.
class FunctionEdge : public Edge
{
 public:
    using Residual = std::function<VectorXd(const VertexValues&)>;
    using Jacobian = std::function<std::vector<MatrixXd>(const VertexValues&)>;
    using Hessian  = std::function<MatrixXd(const VertexValues&)>;

    FunctionEdge(EdgeKind kind, std::vector<int> vertices, int dimension, Residual residual, bool linear = false,
                 std::string label = {})
        : Edge(kind, std::move(vertices), dimension, std::move(label)), _residual(std::move(residual)), _linear(linear)
    {
    }

    FunctionEdge& set_jacobian(Jacobian jacobian)
    {
        _jacobian = std::move(jacobian);
        return *this;
    }
    FunctionEdge& set_hessian_model(Hessian hessian)
    {
        _hessian = std::move(hessian);
        return *this;
    }

    bool is_linear() const override { return _linear; }

    void evaluate(const VertexValues& values, Eigen::Ref<VectorXd> residual) const override { residual = _residual(values); }

    bool jacobian(const VertexValues& values, std::vector<MatrixXd>& blocks) const override
    {
        if (!_jacobian) return false;
        blocks = _jacobian(values);
        return true;
    }

    bool hessian_model(const VertexValues& values, MatrixXd& hessian) const override
    {
        if (!_hessian) return false;
        hessian = _hessian(values);
        return true;
    }

 private:
    Residual _residual;
    Jacobian _jacobian;
    Hessian _hessian;
    bool _linear;
};

}  // namespace qtmpc

#endif  // QTMPC_HYPERGRAPH_GENERIC_EDGE_H_
