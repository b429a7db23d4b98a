#include <qtmpc/dynamics/integrator.h>

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace qtmpc {

std::string_view to_string(Scheme scheme)
{
    switch (scheme)
    {
        case Scheme::forward_euler: return "forward_euler";
        case Scheme::backward_euler: return "backward_euler";
        case Scheme::trapezoidal: return "trapezoidal";
        case Scheme::rk4: return "rk4";
    }
    return "unknown";
}

Scheme scheme_from_string(std::string_view name)
{
    if (name == "forward_euler") return Scheme::forward_euler;
    if (name == "backward_euler") return Scheme::backward_euler;
    if (name == "trapezoidal") return Scheme::trapezoidal;
    if (name == "rk4") return Scheme::rk4;
    throw std::invalid_argument("unknown integration scheme '" + std::string(name) + "'");
}

namespace {

VectorXd rk4_step(const Model& model, const VectorXd& x, const VectorXd& u, double dt)
{
    VectorXd k1 = model.eval(x, u);
    VectorXd k2 = model.eval(x + 0.5 * dt * k1, u);
    VectorXd k3 = model.eval(x + 0.5 * dt * k2, u);
    VectorXd k4 = model.eval(x + dt * k3, u);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Damped Newton on r(z) = 0 where the caller supplies residual and Jacobian.
template <typename Residual, typename Jacobian>
VectorXd newton_solve(VectorXd z, Residual&& residual, Jacobian&& jacobian, int max_iterations, double tolerance,
                      const char* context)
{
    VectorXd r  = residual(z);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iterations && norm > tolerance; ++it)
    {
        Eigen::PartialPivLU<MatrixXd> lu(jacobian(z));
        VectorXd dz = -lu.solve(r);
        if (!dz.allFinite()) break;

        double alpha = 1.0;
        VectorXd trial;
        double trial_norm = norm;
        for (int ls = 0; ls < 30; ++ls)
        {
            trial      = z + alpha * dz;
            VectorXd rt = residual(trial);
            trial_norm = rt.allFinite() ? rt.lpNorm<Eigen::Infinity>() : INFINITY;
            if (trial_norm < norm || trial_norm <= tolerance)
            {
                r = std::move(rt);
                break;
            }
            alpha *= 0.5;
        }
        if (!(trial_norm < norm) && trial_norm > tolerance) break;
        z    = std::move(trial);
        norm = trial_norm;
    }
    if (!(norm <= tolerance))
    {
        std::ostringstream msg;
        msg << context << ": Newton did not converge (residual " << norm << ")";
        throw IntegrationError(msg.str(), norm);
    }
    return z;
}

}  // namespace

VectorXd Integrator::step(const Model& model, const VectorXd& x, const VectorXd& u, double dt) const
{
    if (dt < 0.0) throw std::invalid_argument("Integrator::step: negative dt");
    if (!x.allFinite() || !u.allFinite()) throw std::invalid_argument("Integrator::step: non-finite input");
    if (dt == 0.0)
    {
        model.eval(x, u);  // dimension check
        return x;
    }

    const int p = model.state_dim();
    switch (scheme)
    {
        case Scheme::forward_euler: return x + dt * model.eval(x, u);
        case Scheme::rk4: return rk4_step(model, x, u, dt);
        case Scheme::backward_euler:
        {
            VectorXd guess = x + dt * model.eval(x, u);
            return newton_solve(
                guess, [&](const VectorXd& z) -> VectorXd { return z - x - dt * model.eval(z, u); },
                [&](const VectorXd& z) -> MatrixXd { return MatrixXd::Identity(p, p) - dt * model.jacobian_x(z, u); },
                newton_max_iterations, newton_tolerance, "backward_euler");
        }
        case Scheme::trapezoidal:
        {
            VectorXd fx    = model.eval(x, u);
            VectorXd guess = x + dt * fx;
            return newton_solve(
                guess, [&](const VectorXd& z) -> VectorXd { return z - x - 0.5 * dt * (fx + model.eval(z, u)); },
                [&](const VectorXd& z) -> MatrixXd {
                    return MatrixXd::Identity(p, p) - 0.5 * dt * model.jacobian_x(z, u);
                },
                newton_max_iterations, newton_tolerance, "trapezoidal");
        }
    }
    return x;
}

VectorXd Integrator::step_back(const Model& model, const VectorXd& x_next, const VectorXd& u, double dt) const
{
    if (dt < 0.0) throw std::invalid_argument("Integrator::step_back: negative dt");
    if (dt == 0.0) return x_next;

    const int p = model.state_dim();
    switch (scheme)
    {
        case Scheme::backward_euler: return x_next - dt * model.eval(x_next, u);
        case Scheme::forward_euler:
        {
            VectorXd guess = x_next - dt * model.eval(x_next, u);
            return newton_solve(
                guess, [&](const VectorXd& z) -> VectorXd { return z + dt * model.eval(z, u) - x_next; },
                [&](const VectorXd& z) -> MatrixXd { return MatrixXd::Identity(p, p) + dt * model.jacobian_x(z, u); },
                newton_max_iterations, newton_tolerance, "forward_euler inverse");
        }
        case Scheme::trapezoidal:
        {
            VectorXd fn    = model.eval(x_next, u);
            VectorXd guess = x_next - dt * fn;
            return newton_solve(
                guess, [&](const VectorXd& z) -> VectorXd { return x_next - z - 0.5 * dt * (model.eval(z, u) + fn); },
                [&](const VectorXd& z) -> MatrixXd {
                    return -MatrixXd::Identity(p, p) - 0.5 * dt * model.jacobian_x(z, u);
                },
                newton_max_iterations, newton_tolerance, "trapezoidal inverse");
        }
        case Scheme::rk4:
        {
            // Start from the exact-ish backward RK4 step and polish with Newton
            // on the forward map so that step(result) == x_next.
            VectorXd guess = rk4_step(model, x_next, u, -dt);
            auto residual  = [&](const VectorXd& z) -> VectorXd { return rk4_step(model, z, u, dt) - x_next; };
            auto jacobian  = [&](const VectorXd& z) -> MatrixXd {
                MatrixXd J(p, p);
                VectorXd zp = z;
                for (int j = 0; j < p; ++j)
                {
                    const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
                    zp[j]          = z[j] + h;
                    VectorXd fp    = rk4_step(model, zp, u, dt);
                    zp[j]          = z[j] - h;
                    VectorXd fm    = rk4_step(model, zp, u, dt);
                    zp[j]          = z[j];
                    J.col(j)       = (fp - fm) / (2.0 * h);
                }
                return J;
            };
            return newton_solve(guess, residual, jacobian, newton_max_iterations, newton_tolerance, "rk4 inverse");
        }
    }
    return x_next;
}

VectorXd Integrator::defect(const Model& model, const VectorXd& x, const VectorXd& u, double dt,
                            const VectorXd& x_next) const
{
    switch (scheme)
    {
        case Scheme::forward_euler: return x_next - x - dt * model.eval(x, u);
        case Scheme::backward_euler: return x_next - x - dt * model.eval(x_next, u);
        case Scheme::trapezoidal: return x_next - x - 0.5 * dt * (model.eval(x, u) + model.eval(x_next, u));
        case Scheme::rk4: return x_next - rk4_step(model, x, u, dt);
    }
    return x_next - x;
}

bool Integrator::defect_jacobian(const Model& model, const VectorXd& x, const VectorXd& u, double dt,
                                 const VectorXd& x_next, DefectJacobian& jac) const
{
    if (scheme == Scheme::rk4 || !model.has_jacobians()) return false;

    const int p = model.state_dim();
    const MatrixXd I = MatrixXd::Identity(p, p);
    switch (scheme)
    {
        case Scheme::forward_euler:
            jac.x      = -I - dt * model.jacobian_x(x, u);
            jac.u      = -dt * model.jacobian_u(x, u);
            jac.dt     = -model.eval(x, u);
            jac.x_next = I;
            return true;
        case Scheme::backward_euler:
            jac.x      = -I;
            jac.u      = -dt * model.jacobian_u(x_next, u);
            jac.dt     = -model.eval(x_next, u);
            jac.x_next = I - dt * model.jacobian_x(x_next, u);
            return true;
        case Scheme::trapezoidal:
            jac.x      = -I - 0.5 * dt * model.jacobian_x(x, u);
            jac.u      = -0.5 * dt * (model.jacobian_u(x, u) + model.jacobian_u(x_next, u));
            jac.dt     = -0.5 * (model.eval(x, u) + model.eval(x_next, u));
            jac.x_next = I - 0.5 * dt * model.jacobian_x(x_next, u);
            return true;
        case Scheme::rk4: break;
    }
    return false;
}

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<VectorXd> values, double dt)
    : _values(std::move(values)), _dt(dt)
{
    if (dt < 0.0) throw std::invalid_argument("PiecewiseConstantControl: negative interval length");
}

const VectorXd& PiecewiseConstantControl::at(double t) const
{
    if (_values.empty()) throw std::out_of_range("PiecewiseConstantControl: empty control");
    if (t < 0.0 || t > horizon() * (1.0 + 1e-12) + 1e-15) throw std::out_of_range("PiecewiseConstantControl: t outside [0, N dt]");
    if (_dt <= 0.0) return _values.front();
    int k = static_cast<int>(std::floor(t / _dt));
    if (k >= size()) k = size() - 1;
    if (k < 0) k = 0;
    return _values[k];
}

std::vector<VectorXd> simulate(const Model& model, const Integrator& integrator, const VectorXd& x0,
                               const PiecewiseConstantControl& control, int substeps)
{
    if (substeps < 1) throw std::invalid_argument("simulate: substeps must be >= 1");
    std::vector<VectorXd> states;
    states.reserve(control.size() + 1);
    states.push_back(x0);
    const double h = control.interval() / substeps;
    for (int k = 0; k < control.size(); ++k)
    {
        VectorXd x = states.back();
        try
        {
            for (int s = 0; s < substeps; ++s) x = integrator.step(model, x, control[k], h);
        }
        catch (const IntegrationError& e)
        {
            throw IntegrationError(std::string(e.what()) + " in interval " + std::to_string(k), e.residual_norm(), k);
        }
        if (!x.allFinite()) throw IntegrationError("simulate: state diverged in interval " + std::to_string(k), INFINITY, k);
        states.push_back(std::move(x));
    }
    return states;
}

}  // namespace qtmpc
