#ifndef QTMPC_DUAL_MODE_REGION_H_
#define QTMPC_DUAL_MODE_REGION_H_

#include <qtmpc/dual_mode/ellipse.h>
#include <qtmpc/dual_mode/lqr.h>
#include <qtmpc/dynamics/integrator.h>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtmpc {

class RegionError : public std::runtime_error
{
 public:
    using std::runtime_error::runtime_error;
};

/// Raised before sampling when the enumeration would exceed the budget.
class SampleBudgetError : public RegionError
{
 public:
    SampleBudgetError(const std::string& what, std::uint64_t required)
        : RegionError(what), _required(required)
    {
    }
    std::uint64_t required() const { return _required; }

 private:
    std::uint64_t _required;
};

struct RoaOptions
{
    VectorXd grid_step;   // per state dimension
    VectorXd half_width;  // sampled box around x_f
    double horizon     = 10.0;
    double convergence = 1e-3;
    int shape_angles   = 180;  // planar shape search resolution
    int shape_ratios   = 81;
    int boundary_directions   = 360;   // radial limit probes (planar); axis probes otherwise
    double boundary_tolerance = 1e-3;
};

struct RoaSample
{
    VectorXd x;
    bool qualifies = false;
};

struct RoaEstimate
{
    Ellipse ellipse;
    std::vector<RoaSample> samples;
};

/**
 * Closed-loop simulation of u = K (x_f - x) + u_ref (held for lqr.dt) from a
 * state grid. A sample qualifies when its controls stay in the control box,
 * it ends within `convergence` of x_f and it never leaves the sampled box.
 * Returns the largest ellipse centered at x_f that contains no
 * non-qualifying grid sample, stays inside the sampled box and stays within
 * the radial qualification limit along each probe direction.
 */
RoaEstimate estimate_roa(const Model& model, const Integrator& integrator, const LqrGain& lqr, const VectorXd& x_f,
                         const VectorXd& u_ref, const RoaOptions& options);

struct RegionOptions
{
    int N            = 3;
    double t_c       = 0.1;
    double control_step = 0.1;
    double time_step    = 0.01;
    std::uint64_t budget = 50'000'000;  // max endpoints to enumerate
    int threads      = 0;               // 0: hardware concurrency
    bool keep_generators = false;
};

/**
 * Sampled controllability region P(N, t_c): end points of the reverse-time
 * system from x_f over all control sequences on the control grid and all
 * transition times on the time grid (uniform intervals T / N).
 */
struct RegionEstimate
{
    VectorXd x_f;
    std::vector<VectorXd> points;
    // Generators (when kept): transition time and N controls per point.
    std::vector<double> times;
    std::vector<std::vector<VectorXd>> controls;

    int N = 0;
    double t_c = 0.0;
    double control_step = 0.0;
    double time_step    = 0.0;
    /// Nearest-sample membership radius (half the typical sample spacing).
    double tolerance = 0.0;

    bool contains(const VectorXd& x) const;
    std::size_t size() const { return points.size(); }

    void write_csv(std::ostream& os) const;
    nlohmann::json metadata() const;
};

RegionEstimate estimate_controllability_region(const Model& model, const Integrator& integrator, const VectorXd& x_f,
                                               const RegionOptions& options);

struct ContainmentResult
{
    bool contained = true;
    std::vector<VectorXd> counterexamples;  // at most 10
    std::size_t violations = 0;
};

ContainmentResult check_containment(const RegionEstimate& region, const Ellipse& ellipse, double tolerance = 0.0);

/// Every point of `inner` lies in `outer` (nearest-sample tolerance of `outer`).
bool region_subset(const RegionEstimate& inner, const RegionEstimate& outer);

}  // namespace qtmpc

#endif  // QTMPC_DUAL_MODE_REGION_H_
