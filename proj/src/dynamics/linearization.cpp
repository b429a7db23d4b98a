#include <qtmpc/dynamics/linearization.h>

#include <cmath>
#include <stdexcept>

namespace qtmpc {

LinearModel linearize(const Model& model, const VectorXd& x_ref, const VectorXd& u_ref)
{
    return {model.jacobian_x(x_ref, u_ref), model.jacobian_u(x_ref, u_ref)};
}

MatrixXd matrix_exponential(const MatrixXd& M)
{
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix_exponential: matrix must be square");
    const int n = static_cast<int>(M.rows());

    // Scale so that ||M / 2^s||_1 <= 0.5, then the Taylor series converges fast.
    const double norm = M.cwiseAbs().colwise().sum().maxCoeff();
    int s             = 0;
    if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const MatrixXd X = M / std::pow(2.0, s);

    MatrixXd result = MatrixXd::Identity(n, n);
    MatrixXd term   = MatrixXd::Identity(n, n);
    for (int k = 1; k <= 30; ++k)
    {
        term = term * X / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * std::max(1.0, result.cwiseAbs().maxCoeff())) break;
    }
    for (int i = 0; i < s; ++i) result = result * result;
    return result;
}

LinearModel zoh_discretize(const MatrixXd& A_c, const MatrixXd& B_c, double dt)
{
    if (dt <= 0.0) throw std::invalid_argument("zoh_discretize: dt must be positive");
    if (A_c.rows() != A_c.cols() || B_c.rows() != A_c.rows())
        throw std::invalid_argument("zoh_discretize: inconsistent (A_c, B_c)");

    // exp([[A_c, B_c], [0, 0]] dt) = [[A, B], [0, I]].
    const int p = static_cast<int>(A_c.rows());
    const int q = static_cast<int>(B_c.cols());
    MatrixXd augmented         = MatrixXd::Zero(p + q, p + q);
    augmented.topLeftCorner(p, p)  = A_c * dt;
    augmented.topRightCorner(p, q) = B_c * dt;
    const MatrixXd E           = matrix_exponential(augmented);
    return {E.topLeftCorner(p, p), E.topRightCorner(p, q)};
}

}  // namespace qtmpc
