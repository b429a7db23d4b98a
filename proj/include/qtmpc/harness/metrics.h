#ifndef QTMPC_HARNESS_METRICS_H_
#define QTMPC_HARNESS_METRICS_H_

#include <qtmpc/transcription/grid_ocp.h>

#include <vector>

namespace qtmpc {

/// State samples at increasing times, starting at t = 0.
struct DenseTrajectory
{
    std::vector<double> t;
    std::vector<VectorXd> x;

    double horizon() const { return t.empty() ? 0.0 : t.back(); }
};

/// Grid-point states of an OCP solution with their time stamps.
DenseTrajectory dense_from_ocp(const OcpTrajectory& trajectory);

/**
 * Integral dynamics error of a candidate control w.r.t. a reference solution:
 * the candidate control is propagated from x_s with `integrator` on the
 * reference's time grid and || x_ref(t_j) - x_cand(t_j) ||_2 is integrated by
 * the composite trapezoid over the reference horizon.
 * Throws std::invalid_argument when the candidate horizon does not cover the
 * reference horizon or the reference is malformed.
 */
double integral_error(const DenseTrajectory& reference, const PiecewiseConstantControl& candidate,
                      const VectorXd& x_s, const Model& model, const Integrator& integrator);

double median(std::vector<double> values);

}  // namespace qtmpc

#endif  // QTMPC_HARNESS_METRICS_H_
