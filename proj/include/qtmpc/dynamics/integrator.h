#ifndef QTMPC_DYNAMICS_INTEGRATOR_H_
#define QTMPC_DYNAMICS_INTEGRATOR_H_

#include <qtmpc/dynamics/model.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qtmpc {

enum class Scheme
{
    forward_euler,
    backward_euler,
    trapezoidal,
    rk4
};

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/// Raised when an implicit step fails to converge or a simulation step diverges.
class IntegrationError : public std::runtime_error
{
 public:
    IntegrationError(const std::string& what, double residual_norm, int interval = -1)
        : std::runtime_error(what), _residual_norm(residual_norm), _interval(interval)
    {
    }

    double residual_norm() const { return _residual_norm; }
    int interval() const { return _interval; }

 private:
    double _residual_norm;
    int _interval;
};

/**
 * One-step method approximating the solution map phi(dt, x, u) under a
 * constant control.
 *
 * Besides stepping, the integrator exposes its defect form
 * d(x, u, dt, x_next) = 0 <=> x_next = phi(dt, x, u), which is what the
 * transcription uses as the dynamics constraint. Implicit schemes are written
 * directly in implicit form, so the NLP never runs an inner Newton loop.
 */
struct Integrator
{
    Scheme scheme              = Scheme::forward_euler;
    int newton_max_iterations  = 50;
    double newton_tolerance    = 1e-10;

    VectorXd step(const Model& model, const VectorXd& x, const VectorXd& u, double dt) const;

    /// Inverse map: finds x with step(x, u, dt) = x_next (reverse-time propagation).
    VectorXd step_back(const Model& model, const VectorXd& x_next, const VectorXd& u, double dt) const;

    VectorXd defect(const Model& model, const VectorXd& x, const VectorXd& u, double dt, const VectorXd& x_next) const;

    struct DefectJacobian
    {
        MatrixXd x;       // p x p
        MatrixXd u;       // p x q
        VectorXd dt;      // p
        MatrixXd x_next;  // p x p
    };

    /// Closed-form defect derivatives. Returns false when not available (rk4 or
    /// models without analytic Jacobians); callers fall back to finite differences.
    bool defect_jacobian(const Model& model, const VectorXd& x, const VectorXd& u, double dt, const VectorXd& x_next,
                         DefectJacobian& jac) const;

    bool is_implicit() const { return scheme == Scheme::backward_euler || scheme == Scheme::trapezoidal; }
};

/// Control held constant on each of N intervals of length dt.
class PiecewiseConstantControl
{
 public:
    PiecewiseConstantControl() = default;
    PiecewiseConstantControl(std::vector<VectorXd> values, double dt);

    int size() const { return static_cast<int>(_values.size()); }
    double interval() const { return _dt; }
    double horizon() const { return _dt * size(); }
    const std::vector<VectorXd>& values() const { return _values; }
    const VectorXd& operator[](int k) const { return _values[k]; }

    /// u_k for t in [k dt, (k+1) dt); the end point t = N dt maps to u_{N-1}.
    const VectorXd& at(double t) const;

 private:
    std::vector<VectorXd> _values;
    double _dt = 0.0;
};

/**
 * Propagates x0 through every interval, splitting each into `substeps` equal
 * integrator steps. Returns the N+1 grid-point states.
 */
std::vector<VectorXd> simulate(const Model& model, const Integrator& integrator, const VectorXd& x0,
                               const PiecewiseConstantControl& control, int substeps = 1);

}  // namespace qtmpc

#endif  // QTMPC_DYNAMICS_INTEGRATOR_H_
