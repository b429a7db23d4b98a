#ifndef QTMPC_DUAL_MODE_LQR_H_
#define QTMPC_DUAL_MODE_LQR_H_

#include <qtmpc/dynamics/linearization.h>
#include <qtmpc/dynamics/model.h>

#include <stdexcept>

namespace qtmpc {

class LqrDesignError : public std::runtime_error
{
 public:
    using std::runtime_error::runtime_error;
};

struct LqrGain
{
    MatrixXd K;  // q x p, u = K (x_f - x) + u_ref
    MatrixXd P;  // DARE solution
    double dt = 0.0;
    int iterations = 0;
};

struct LqrOptions
{
    double tolerance   = 1e-10;  // Frobenius norm of the DARE residual
    int max_iterations = 1000000;
};

/// Frobenius norm of Q + A'PA - A'PB (R + B'PB)^-1 B'PA - P.
double dare_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& P);

/// Discrete-time LQR by fixed-point iteration of the Riccati recursion starting at P = Q.
LqrGain lqr_design(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                   const LqrOptions& options = {});

/// Spectral radius of a square matrix.
double spectral_radius(const MatrixXd& M);

/// Control holding x_f at rest: least-squares solution of f(x_f, u) = 0 (Gauss-Newton).
VectorXd steady_state_control(const Model& model, const VectorXd& x_f);

enum class Discretization
{
    euler,  // A = I + dt A_c, B = dt B_c
    zoh
};

/// Linearize at (x_f, u_ref), discretize with sample time dt and design the LQR.
LqrGain lqr_design_for_model(const Model& model, const VectorXd& x_f, const VectorXd& u_ref, const MatrixXd& Q,
                             const MatrixXd& R, double dt, Discretization method = Discretization::euler);

}  // namespace qtmpc

#endif  // QTMPC_DUAL_MODE_LQR_H_
