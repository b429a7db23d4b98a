#include <qtmpc/dynamics/models.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qtmpc {

Model::Ptr make_van_der_pol()
{
    auto f = [](const VectorXd& x, const VectorXd& u) {
        VectorXd dx(2);
        dx << x[1], (1.0 - x[0] * x[0]) * x[1] - x[0] + u[0];
        return dx;
    };
    auto dfdx = [](const VectorXd& x, const VectorXd&) {
        MatrixXd J(2, 2);
        J << 0.0, 1.0, -2.0 * x[0] * x[1] - 1.0, 1.0 - x[0] * x[0];
        return J;
    };
    auto dfdu = [](const VectorXd&, const VectorXd&) {
        MatrixXd J(2, 1);
        J << 0.0, 1.0;
        return J;
    };
    auto model = std::make_shared<Model>("vdp", 2, 1, f);
    model->set_jacobians(dfdx, dfdu);
    model->set_control_bounds(Box::symmetric(VectorXd::Ones(1)));
    return model;
}

Model::Ptr make_ecp220(const Ecp220Parameters& prm)
{
    auto f = [prm](const VectorXd& x, const VectorXd& u) {
        VectorXd dx(2);
        dx << x[1], -prm.c1 * x[1] - prm.c2 * std::tanh(prm.c3 * x[1]) + prm.k1 * u[0] - prm.k2 * u[1];
        return dx;
    };
    auto dfdx = [prm](const VectorXd& x, const VectorXd&) {
        const double th = std::tanh(prm.c3 * x[1]);
        MatrixXd J(2, 2);
        J << 0.0, 1.0, 0.0, -prm.c1 - prm.c2 * prm.c3 * (1.0 - th * th);
        return J;
    };
    auto dfdu = [prm](const VectorXd&, const VectorXd&) {
        MatrixXd J(2, 2);
        J << 0.0, 0.0, prm.k1, -prm.k2;
        return J;
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto model           = std::make_shared<Model>("ecp220", 2, 2, f);
    model->set_jacobians(dfdx, dfdu);
    model->set_control_bounds(Box::symmetric(VectorXd::Constant(2, prm.control_limit)));
    model->set_state_bounds(Box{Eigen::Vector2d(-inf, -prm.velocity_limit), Eigen::Vector2d(inf, prm.velocity_limit)});
    return model;
}

Model::Ptr make_double_integrator(double control_limit)
{
    auto f = [](const VectorXd& x, const VectorXd& u) {
        VectorXd dx(2);
        dx << x[1], u[0];
        return dx;
    };
    auto dfdx = [](const VectorXd&, const VectorXd&) {
        MatrixXd J(2, 2);
        J << 0.0, 1.0, 0.0, 0.0;
        return J;
    };
    auto dfdu = [](const VectorXd&, const VectorXd&) {
        MatrixXd J(2, 1);
        J << 0.0, 1.0;
        return J;
    };
    auto model = std::make_shared<Model>("double_integrator", 2, 1, f);
    model->set_jacobians(dfdx, dfdu);
    model->set_control_bounds(Box::symmetric(VectorXd::Constant(1, control_limit)));
    return model;
}

Model::Ptr make_linear(const MatrixXd& A, const MatrixXd& B, const Box* control_bounds)
{
    if (A.rows() != A.cols() || B.rows() != A.rows()) throw std::invalid_argument("make_linear: inconsistent (A, B)");
    auto model = std::make_shared<Model>(
        "linear", static_cast<int>(A.rows()), static_cast<int>(B.cols()),
        [A, B](const VectorXd& x, const VectorXd& u) -> VectorXd { return A * x + B * u; });
    model->set_jacobians([A](const VectorXd&, const VectorXd&) { return A; },
                         [B](const VectorXd&, const VectorXd&) { return B; });
    if (control_bounds) model->set_control_bounds(*control_bounds);
    return model;
}

Model::Ptr make_model(std::string_view name)
{
    if (name == "vdp") return make_van_der_pol();
    if (name == "ecp220") return make_ecp220();
    if (name == "double_integrator") return make_double_integrator();
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

}  // namespace qtmpc
