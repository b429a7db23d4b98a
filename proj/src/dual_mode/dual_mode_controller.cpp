#include <qtmpc/dual_mode/dual_mode_controller.h>

#include <chrono>

namespace qtmpc {

DualModeController::DualModeController(TimeOptimalMpc& mpc, LqrGain lqr, Ellipse region, VectorXd u_ref)
    : _mpc(mpc), _lqr(std::move(lqr)), _region(std::move(region)), _u_ref(std::move(u_ref))
{
    const int p = _mpc.config().model->state_dim();
    const int q = _mpc.config().model->control_dim();
    if (_lqr.K.rows() != q || _lqr.K.cols() != p) throw std::invalid_argument("DualModeController: gain dimension");
    if (_region.dim() != p || _u_ref.size() != q) throw std::invalid_argument("DualModeController: dimension mismatch");
    if (!(_lqr.dt > 0.0)) throw std::invalid_argument("DualModeController: LQR sample time must be positive");
}

ControlDecision DualModeController::decide(const VectorXd& x)
{
    if (!_latched && _region.contains(x)) _latched = true;
    if (!_latched) return _mpc.decide(x);

    const auto start = std::chrono::steady_clock::now();
    ControlDecision d;
    d.u      = _lqr.K * (target() - x) + _u_ref;
    d.hold   = _lqr.dt;
    d.mode   = "lqr";
    d.N      = 0;
    d.cpu_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return d;
}

void DualModeController::set_target(const VectorXd& x_f)
{
    _mpc.set_target(x_f);
    _region  = _region.translated(x_f);
    _u_ref   = steady_state_control(*_mpc.config().model, x_f);
    _latched = false;
}

}  // namespace qtmpc
