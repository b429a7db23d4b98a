#include <qtmpc/harness/metrics.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtmpc {

DenseTrajectory dense_from_ocp(const OcpTrajectory& trajectory)
{
    DenseTrajectory d;
    double t = 0.0;
    for (std::size_t k = 0; k < trajectory.states.size(); ++k)
    {
        d.t.push_back(t);
        d.x.push_back(trajectory.states[k]);
        if (k < trajectory.dt.size()) t += trajectory.dt[k];
    }
    return d;
}

double integral_error(const DenseTrajectory& reference, const PiecewiseConstantControl& candidate,
                      const VectorXd& x_s, const Model& model, const Integrator& integrator)
{
    const std::size_t M = reference.t.size();
    if (M < 2 || reference.x.size() != M) throw std::invalid_argument("integral_error: reference needs >= 2 samples");
    if (reference.t.front() != 0.0) throw std::invalid_argument("integral_error: reference must start at t = 0");
    for (std::size_t j = 1; j < M; ++j)
        if (!(reference.t[j] > reference.t[j - 1]))
            throw std::invalid_argument("integral_error: reference times must increase");
    if (candidate.size() == 0) throw std::invalid_argument("integral_error: empty candidate control");
    const double T = reference.horizon();
    if (candidate.horizon() < T * (1.0 - 1e-9))
        throw std::invalid_argument("integral_error: candidate horizon " + std::to_string(candidate.horizon()) +
                                    " does not cover the reference horizon " + std::to_string(T));
    if (x_s.size() != model.state_dim() || reference.x.front().size() != x_s.size())
        throw std::invalid_argument("integral_error: state dimension mismatch");

    VectorXd x = x_s;
    double total = 0.0;
    double prev  = (reference.x[0] - x).norm();
    for (std::size_t j = 0; j + 1 < M; ++j)
    {
        const double h = reference.t[j + 1] - reference.t[j];
        x              = integrator.step(model, x, candidate.at(reference.t[j]), h);
        const double e = (reference.x[j + 1] - x).norm();
        total += 0.5 * h * (prev + e);
        prev = e;
    }
    return total;
}

double median(std::vector<double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace qtmpc
