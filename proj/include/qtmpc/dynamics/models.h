#ifndef QTMPC_DYNAMICS_MODELS_H_
#define QTMPC_DYNAMICS_MODELS_H_

#include <qtmpc/dynamics/model.h>

#include <string_view>

namespace qtmpc {

/// xdot = (x2, (1 - x1^2) x2 - x1 + u), |u| <= 1, unbounded states.
Model::Ptr make_van_der_pol();

struct Ecp220Parameters
{
    double k1 = 34.51;
    double k2 = 34.13;
    double c1 = 1.46;
    double c2 = 2.53;
    double c3 = 5.0;
    double control_limit  = 0.5;
    double velocity_limit = 5.0;
};

/// Two-motor plant emulator: xddot = -c1 xdot - c2 tanh(c3 xdot) + k1 u1 - k2 u2.
Model::Ptr make_ecp220(const Ecp220Parameters& params = {});

/// xddot = u with |u| <= control_limit.
Model::Ptr make_double_integrator(double control_limit = 1.0);

/// xdot = A x + B u, unconstrained unless bounds are given afterwards.
Model::Ptr make_linear(const MatrixXd& A, const MatrixXd& B, const Box* control_bounds = nullptr);

/// Built-in models by config name: "vdp", "ecp220", "double_integrator".
Model::Ptr make_model(std::string_view name);

}  // namespace qtmpc

#endif  // QTMPC_DYNAMICS_MODELS_H_
