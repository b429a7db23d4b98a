#include <qtmpc/dynamics/model.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qtmpc {

Box Box::unbounded(int dim)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {VectorXd::Constant(dim, -inf), VectorXd::Constant(dim, inf)};
}

Box Box::symmetric(const VectorXd& half_width) { return {-half_width, half_width}; }

bool Box::contains(const VectorXd& x, double tolerance) const
{
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i)
    {
        if (x[i] < lower[i] - tolerance || x[i] > upper[i] + tolerance) return false;
    }
    return true;
}

bool Box::is_bounded() const { return lower.allFinite() && upper.allFinite(); }

Model::Model(std::string name, int state_dim, int control_dim, VectorField f)
    : _name(std::move(name)),
      _state_dim(state_dim),
      _control_dim(control_dim),
      _f(std::move(f)),
      _state_bounds(Box::unbounded(state_dim)),
      _control_bounds(Box::unbounded(control_dim))
{
    if (state_dim < 1 || control_dim < 1) throw std::invalid_argument("Model: dimensions must be positive");
    if (!_f) throw std::invalid_argument("Model: empty vector field");
}

Model& Model::set_jacobians(Jacobian dfdx, Jacobian dfdu)
{
    _dfdx = std::move(dfdx);
    _dfdu = std::move(dfdu);
    return *this;
}

Model& Model::set_state_bounds(Box bounds)
{
    if (bounds.dim() != _state_dim || bounds.upper.size() != _state_dim)
        throw std::invalid_argument("Model: state bounds dimension mismatch");
    if ((bounds.lower.array() > bounds.upper.array()).any()) throw std::invalid_argument("Model: state bounds lower > upper");
    _state_bounds = std::move(bounds);
    return *this;
}

Model& Model::set_control_bounds(Box bounds)
{
    if (bounds.dim() != _control_dim || bounds.upper.size() != _control_dim)
        throw std::invalid_argument("Model: control bounds dimension mismatch");
    if ((bounds.lower.array() > bounds.upper.array()).any()) throw std::invalid_argument("Model: control bounds lower > upper");
    _control_bounds = std::move(bounds);
    return *this;
}

void Model::check_dims(const VectorXd& x, const VectorXd& u) const
{
    if (x.size() != _state_dim || u.size() != _control_dim)
    {
        std::ostringstream msg;
        msg << "Model '" << _name << "': expected x in R^" << _state_dim << " and u in R^" << _control_dim << ", got "
            << x.size() << " and " << u.size();
        throw std::invalid_argument(msg.str());
    }
}

VectorXd Model::eval(const VectorXd& x, const VectorXd& u) const
{
    check_dims(x, u);
    return _f(x, u);
}

MatrixXd Model::jacobian_x(const VectorXd& x, const VectorXd& u) const
{
    check_dims(x, u);
    if (_dfdx) return _dfdx(x, u);
    return finite_difference_jacobian_x(x, u);
}

MatrixXd Model::jacobian_u(const VectorXd& x, const VectorXd& u) const
{
    check_dims(x, u);
    if (_dfdu) return _dfdu(x, u);
    return finite_difference_jacobian_u(x, u);
}

MatrixXd Model::finite_difference_jacobian_x(const VectorXd& x, const VectorXd& u, double step) const
{
    check_dims(x, u);
    MatrixXd J(_state_dim, _state_dim);
    VectorXd xp = x;
    for (int j = 0; j < _state_dim; ++j)
    {
        xp[j]    = x[j] + step;
        VectorXd fp = _f(xp, u);
        xp[j]    = x[j] - step;
        VectorXd fm = _f(xp, u);
        xp[j]    = x[j];
        J.col(j) = (fp - fm) / (2.0 * step);
    }
    return J;
}

MatrixXd Model::finite_difference_jacobian_u(const VectorXd& x, const VectorXd& u, double step) const
{
    check_dims(x, u);
    MatrixXd J(_state_dim, _control_dim);
    VectorXd up = u;
    for (int j = 0; j < _control_dim; ++j)
    {
        up[j]    = u[j] + step;
        VectorXd fp = _f(x, up);
        up[j]    = u[j] - step;
        VectorXd fm = _f(x, up);
        up[j]    = u[j];
        J.col(j) = (fp - fm) / (2.0 * step);
    }
    return J;
}

}  // namespace qtmpc
