#ifndef QTMPC_DUAL_MODE_DUAL_MODE_CONTROLLER_H_
#define QTMPC_DUAL_MODE_DUAL_MODE_CONTROLLER_H_

#include <qtmpc/controller/time_optimal_mpc.h>
#include <qtmpc/dual_mode/ellipse.h>
#include <qtmpc/dual_mode/lqr.h>

namespace qtmpc {

/**
 * Time-optimal MPC outside X_lin, LQR u = K (x_f - x) + u_ref at the LQR
 * sample time inside. Once the LQR branch is taken it stays latched until
 * the set point changes.
 */
class DualModeController : public FeedbackController
{
 public:
    DualModeController(TimeOptimalMpc& mpc, LqrGain lqr, Ellipse region, VectorXd u_ref);

    ControlDecision decide(const VectorXd& x) override;
    const VectorXd& target() const override { return _mpc.target(); }
    /// Moves X_lin to the new set point, recomputes u_ref and releases the latch.
    void set_target(const VectorXd& x_f) override;

    bool latched() const { return _latched; }
    const Ellipse& region() const { return _region; }
    const VectorXd& u_ref() const { return _u_ref; }

 private:
    TimeOptimalMpc& _mpc;
    LqrGain _lqr;
    Ellipse _region;
    VectorXd _u_ref;
    bool _latched = false;
};

}  // namespace qtmpc

#endif  // QTMPC_DUAL_MODE_DUAL_MODE_CONTROLLER_H_
