#ifndef QTMPC_DYNAMICS_MODEL_H_
#define QTMPC_DYNAMICS_MODEL_H_

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>

namespace qtmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Elementwise box [lower, upper]; infinite entries denote unbounded channels.
struct Box
{
    VectorXd lower;
    VectorXd upper;

    static Box unbounded(int dim);
    static Box symmetric(const VectorXd& half_width);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const VectorXd& x, double tolerance = 0.0) const;
    bool is_bounded() const;
};

/**
 * Continuous-time, time-invariant plant xdot = f(x, u) with box constraint sets.
 *
 * A model is immutable once handed out as shared_ptr<const Model>; evaluation
 * has no side effects and may run concurrently.
 */
class Model
{
 public:
    using Ptr         = std::shared_ptr<const Model>;
    using VectorField = std::function<VectorXd(const VectorXd& x, const VectorXd& u)>;
    using Jacobian    = std::function<MatrixXd(const VectorXd& x, const VectorXd& u)>;

    Model(std::string name, int state_dim, int control_dim, VectorField f);

    Model& set_jacobians(Jacobian dfdx, Jacobian dfdu);
    Model& set_state_bounds(Box bounds);
    Model& set_control_bounds(Box bounds);

    const std::string& name() const { return _name; }
    int state_dim() const { return _state_dim; }
    int control_dim() const { return _control_dim; }
    const Box& state_bounds() const { return _state_bounds; }
    const Box& control_bounds() const { return _control_bounds; }
    bool has_jacobians() const { return static_cast<bool>(_dfdx) && static_cast<bool>(_dfdu); }

    /// f(x, u); throws std::invalid_argument on dimension mismatch.
    VectorXd eval(const VectorXd& x, const VectorXd& u) const;

    // Analytic when available, central differences (step 1e-6) otherwise.
    MatrixXd jacobian_x(const VectorXd& x, const VectorXd& u) const;
    MatrixXd jacobian_u(const VectorXd& x, const VectorXd& u) const;

    MatrixXd finite_difference_jacobian_x(const VectorXd& x, const VectorXd& u, double step = 1e-6) const;
    MatrixXd finite_difference_jacobian_u(const VectorXd& x, const VectorXd& u, double step = 1e-6) const;

 private:
    void check_dims(const VectorXd& x, const VectorXd& u) const;

    std::string _name;
    int _state_dim;
    int _control_dim;
    VectorField _f;
    Jacobian _dfdx;
    Jacobian _dfdu;
    Box _state_bounds;
    Box _control_bounds;
};

}  // namespace qtmpc

#endif  // QTMPC_DYNAMICS_MODEL_H_
