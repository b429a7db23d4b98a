#include <qtmpc/dual_mode/lqr.h>

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace qtmpc {

namespace {

MatrixXd riccati_map(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& P)
{
    const MatrixXd BtP = B.transpose() * P;
    const MatrixXd S   = R + BtP * B;
    return Q + A.transpose() * P * A - (BtP * A).transpose() * S.ldlt().solve(BtP * A);
}

}  // namespace

double dare_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& P)
{
    return (riccati_map(A, B, Q, R, P) - P).norm();
}

double spectral_radius(const MatrixXd& M)
{
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

LqrGain lqr_design(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                   const LqrOptions& options)
{
    const Eigen::Index p = A.rows();
    if (A.cols() != p || B.rows() != p || Q.rows() != p || Q.cols() != p || R.rows() != B.cols() ||
        R.cols() != B.cols())
        throw std::invalid_argument("lqr_design: dimension mismatch");
    if (R.ldlt().info() != Eigen::Success || (R.ldlt().vectorD().array() <= 0.0).any())
        throw std::invalid_argument("lqr_design: R must be positive definite");

    MatrixXd P = Q;
    LqrGain out;
    for (int it = 1; it <= options.max_iterations; ++it)
    {
        MatrixXd next = riccati_map(A, B, Q, R, P);
        next          = 0.5 * (next + next.transpose());
        if (!next.allFinite() || next.norm() > 1e15)
            throw LqrDesignError("lqr_design: Riccati iteration diverges (pair not stabilizable?)");
        P = std::move(next);
        if (dare_residual(A, B, Q, R, P) <= options.tolerance)
        {
            out.iterations = it;
            break;
        }
        if (it == options.max_iterations)
            throw LqrDesignError("lqr_design: no convergence in " + std::to_string(options.max_iterations) +
                                 " iterations");
    }
    const MatrixXd BtP = B.transpose() * P;
    out.P              = P;
    out.K              = (R + BtP * B).ldlt().solve(BtP * A);
    if (spectral_radius(A - B * out.K) >= 1.0)
        throw LqrDesignError("lqr_design: closed loop not stable (pair not stabilizable?)");
    return out;
}

VectorXd steady_state_control(const Model& model, const VectorXd& x_f)
{
    VectorXd u = VectorXd::Zero(model.control_dim());
    for (int it = 0; it < 50; ++it)
    {
        const VectorXd r = model.eval(x_f, u);
        if (r.norm() <= 1e-14) break;
        const MatrixXd J = model.jacobian_u(x_f, u);
        const VectorXd du = J.completeOrthogonalDecomposition().solve(-r);
        u += du;
        if (du.norm() <= 1e-15) break;
    }
    return u;
}

LqrGain lqr_design_for_model(const Model& model, const VectorXd& x_f, const VectorXd& u_ref, const MatrixXd& Q,
                             const MatrixXd& R, double dt, Discretization method)
{
    if (!(dt > 0.0)) throw std::invalid_argument("lqr_design_for_model: dt must be positive");
    const LinearModel c = linearize(model, x_f, u_ref);
    LinearModel d;
    if (method == Discretization::zoh)
        d = zoh_discretize(c.A, c.B, dt);
    else
        d = {MatrixXd::Identity(c.A.rows(), c.A.cols()) + dt * c.A, dt * c.B};
    LqrGain g = lqr_design(d.A, d.B, Q, R);
    g.dt      = dt;
    return g;
}

}  // namespace qtmpc
