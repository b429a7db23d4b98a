#ifndef QTMPC_DYNAMICS_LINEARIZATION_H_
#define QTMPC_DYNAMICS_LINEARIZATION_H_

#include <qtmpc/dynamics/model.h>

namespace qtmpc {

struct LinearModel
{
    MatrixXd A;
    MatrixXd B;
};

/// Continuous-time Jacobians (A_c, B_c) at (x_ref, u_ref).
LinearModel linearize(const Model& model, const VectorXd& x_ref, const VectorXd& u_ref);

/// Zero-order-hold discretization: A = exp(A_c dt), B = int_0^dt exp(A_c s) ds B_c.
LinearModel zoh_discretize(const MatrixXd& A_c, const MatrixXd& B_c, double dt);

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
MatrixXd matrix_exponential(const MatrixXd& M);

}  // namespace qtmpc

#endif  // QTMPC_DYNAMICS_LINEARIZATION_H_
