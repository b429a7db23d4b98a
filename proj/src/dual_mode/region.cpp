#include <qtmpc/dual_mode/region.h>

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace qtmpc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> axis_values(double center, double step, double half_width)
{
    const int k = static_cast<int>(std::floor(half_width / step + 1e-9));
    std::vector<double> v;
    for (int i = -k; i <= k; ++i) v.push_back(center + i * step);
    return v;
}

std::vector<VectorXd> tensor_grid(const std::vector<std::vector<double>>& axes)
{
    std::vector<VectorXd> out(1, VectorXd(0));
    for (const auto& axis : axes)
    {
        std::vector<VectorXd> next;
        next.reserve(out.size() * axis.size());
        for (const VectorXd& prefix : out)
            for (double a : axis)
            {
                VectorXd v(prefix.size() + 1);
                v << prefix, a;
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

bool simulate_lqr(const Model& model, const Integrator& integrator, const LqrGain& lqr, const VectorXd& x_f,
                  const VectorXd& u_ref, const RoaOptions& o, VectorXd x)
{
    const Box& ub  = model.control_bounds();
    const int steps = static_cast<int>(std::ceil(o.horizon / lqr.dt - 1e-9));
    for (int k = 0; k <= steps; ++k)
    {
        const VectorXd e = x - x_f;
        if ((e.cwiseAbs().array() > o.half_width.array() + 1e-12).any()) return false;
        if (e.norm() <= o.convergence) return true;
        if (k == steps) break;
        const VectorXd u = lqr.K * (x_f - x) + u_ref;
        if (ub.dim() == u.size() && !ub.contains(u, 1e-12)) return false;
        try
        {
            x = integrator.step(model, x, u, lqr.dt);
        }
        catch (const IntegrationError&)
        {
            return false;
        }
        if (!x.allFinite()) return false;
    }
    return false;
}

}  // namespace

RoaEstimate estimate_roa(const Model& model, const Integrator& integrator, const LqrGain& lqr, const VectorXd& x_f,
                         const VectorXd& u_ref, const RoaOptions& options)
{
    const int p = model.state_dim();
    if (x_f.size() != p || options.grid_step.size() != p || options.half_width.size() != p)
        throw std::invalid_argument("estimate_roa: dimension mismatch");
    if (!(lqr.dt > 0.0)) throw std::invalid_argument("estimate_roa: LQR sample time must be positive");

    std::vector<std::vector<double>> axes;
    for (int i = 0; i < p; ++i) axes.push_back(axis_values(x_f[i], options.grid_step[i], options.half_width[i]));

    RoaEstimate out;
    for (VectorXd& x : tensor_grid(axes))
    {
        RoaSample s;
        s.qualifies = simulate_lqr(model, integrator, lqr, x_f, u_ref, options, x);
        s.x         = std::move(x);
        out.samples.push_back(std::move(s));
    }
    bool any = false;
    for (const RoaSample& s : out.samples) any = any || s.qualifies;
    if (!any) throw RegionError("estimate_roa: no sample qualifies");

    // Candidate shapes, normalized to unit determinant.
    std::vector<MatrixXd> shapes;
    auto add_shape = [&](const MatrixXd& S) {
        const double det = S.determinant();
        if (det > 0.0) shapes.push_back(S / std::pow(det, 1.0 / p));
    };
    MatrixXd box_scale = MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) box_scale(i, i) = 1.0 / (options.half_width[i] * options.half_width[i]);
    add_shape(box_scale);
    add_shape(MatrixXd::Identity(p, p));
    if (lqr.P.rows() == p) add_shape(0.5 * (lqr.P + lqr.P.transpose()));
    if (p == 2)
    {
        for (int a = 0; a < options.shape_angles; ++a)
        {
            const double th = kPi * a / options.shape_angles;
            Eigen::Matrix2d R;
            R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
            for (int r = 0; r < options.shape_ratios; ++r)
            {
                const double ratio = std::pow(10.0, -2.0 + 4.0 * r / std::max(options.shape_ratios - 1, 1));
                add_shape(R * Eigen::Vector2d(1.0, ratio).asDiagonal() * R.transpose());
            }
        }
    }

    // Radial qualification limits: along each direction the distance to the
    // first failing state, found by scan + bisection on direct simulations.
    std::vector<VectorXd> rays;
    if (p == 2)
        for (int a = 0; a < options.boundary_directions; ++a)
        {
            const double th = 2.0 * kPi * a / options.boundary_directions;
            rays.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
        }
    else
        for (int i = 0; i < p; ++i)
            for (double sgn : {-1.0, 1.0}) rays.push_back(sgn * VectorXd::Unit(p, i));
    std::vector<double> limits;
    const double scan = 0.25 * options.grid_step.minCoeff();
    for (const VectorXd& d : rays)
    {
        double reach = std::numeric_limits<double>::infinity();
        for (int i = 0; i < p; ++i)
            if (d[i] != 0.0) reach = std::min(reach, options.half_width[i] / std::abs(d[i]));
        auto ok = [&](double r) { return simulate_lqr(model, integrator, lqr, x_f, u_ref, options, x_f + r * d); };
        double lo = 0.0, hi = reach;
        bool failed = false;
        for (double r = scan; !failed; r += scan)
        {
            r = std::min(r, reach);
            if (!ok(r))
            {
                hi     = r;
                failed = true;
            }
            else
                lo = r;
            if (r >= reach) break;
        }
        if (failed)
            while (hi - lo > options.boundary_tolerance)
            {
                const double mid = 0.5 * (lo + hi);
                (ok(mid) ? lo : hi) = mid;
            }
        limits.push_back(lo);
    }

    double best_volume = -1.0;
    MatrixXd best;
    for (const MatrixXd& S : shapes)
    {
        // Largest level c with {e' S e <= c} free of failing samples, inside the
        // radial limits and inside the box.
        double c = std::numeric_limits<double>::infinity();
        for (const RoaSample& s : out.samples)
            if (!s.qualifies)
            {
                const VectorXd e = s.x - x_f;
                c                = std::min(c, e.dot(S * e) * (1.0 - 1e-9));
            }
        for (std::size_t r = 0; r < rays.size(); ++r)
            c = std::min(c, limits[r] * limits[r] * rays[r].dot(S * rays[r]));
        const MatrixXd Sinv = S.inverse();
        for (int i = 0; i < p; ++i)
            c = std::min(c, options.half_width[i] * options.half_width[i] / Sinv(i, i));
        if (!(c > 0.0)) continue;
        const double volume = std::pow(c, 0.5 * p);  // det S = 1
        if (volume > best_volume)
        {
            best_volume = volume;
            best        = S / c;
        }
    }
    if (best_volume <= 0.0) throw RegionError("estimate_roa: no ellipse fits the qualifying set");
    out.ellipse = Ellipse(x_f, 0.5 * (best + best.transpose()));
    return out;
}

bool RegionEstimate::contains(const VectorXd& x) const
{
    const double tol2 = tolerance * tolerance;
    for (const VectorXd& p : points)
        if ((p - x).squaredNorm() <= tol2) return true;
    return false;
}

void RegionEstimate::write_csv(std::ostream& os) const
{
    const Eigen::Index p = x_f.size();
    for (Eigen::Index i = 1; i <= p; ++i) os << (i > 1 ? "," : "") << 'x' << i;
    os << '\n';
    os.precision(17);
    for (const VectorXd& x : points)
    {
        for (Eigen::Index i = 0; i < p; ++i) os << (i > 0 ? "," : "") << x[i];
        os << '\n';
    }
}

nlohmann::json RegionEstimate::metadata() const
{
    nlohmann::json j;
    j["N"]            = N;
    j["t_c"]          = t_c;
    j["control_step"] = control_step;
    j["time_step"]    = time_step;
    j["tolerance"]    = tolerance;
    j["points"]       = points.size();
    j["x_f"]          = std::vector<double>(x_f.data(), x_f.data() + x_f.size());
    return j;
}

RegionEstimate estimate_controllability_region(const Model& model, const Integrator& integrator, const VectorXd& x_f,
                                               const RegionOptions& o)
{
    const int q = model.control_dim();
    if (o.N < 1 || !(o.t_c > 0.0) || !(o.control_step > 0.0) || !(o.time_step > 0.0))
        throw std::invalid_argument("estimate_controllability_region: need N >= 1 and positive t_c and steps");
    if (x_f.size() != model.state_dim()) throw std::invalid_argument("estimate_controllability_region: x_f dimension");
    const Box& ub = model.control_bounds();
    if (ub.dim() != q || !ub.is_bounded())
        throw std::invalid_argument("estimate_controllability_region: bounded control box required");

    std::vector<std::vector<double>> axes;
    for (int i = 0; i < q; ++i)
    {
        std::vector<double> axis;
        const int m = static_cast<int>(std::floor((ub.upper[i] - ub.lower[i]) / o.control_step + 1e-9));
        for (int k = 0; k <= m; ++k) axis.push_back(ub.lower[i] + k * o.control_step);
        axes.push_back(std::move(axis));
    }
    const std::vector<VectorXd> controls = tensor_grid(axes);
    const int times = static_cast<int>(std::floor(o.t_c / o.time_step + 1e-9));

    // Required endpoints: |U|^N sequences per transition time.
    double required = times;
    for (int k = 0; k < o.N; ++k) required *= static_cast<double>(controls.size());
    if (required > static_cast<double>(o.budget))
        throw SampleBudgetError("estimate_controllability_region: " + std::to_string(required) +
                                    " samples required, budget " + std::to_string(o.budget),
                                required >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                                   : static_cast<std::uint64_t>(required));

    RegionEstimate out;
    out.x_f          = x_f;
    out.N            = o.N;
    out.t_c          = o.t_c;
    out.control_step = o.control_step;
    out.time_step    = o.time_step;

    // Half the state displacement of one control or time grid step.
    {
        const VectorXd u_mid = 0.5 * (ub.lower + ub.upper);
        const double du      = (o.t_c / o.N) * model.jacobian_u(x_f, u_mid).norm() * o.control_step;
        double fmax          = 0.0;
        for (const VectorXd& u : controls) fmax = std::max(fmax, model.eval(x_f, u).norm());
        out.tolerance = 0.5 * std::max(du, o.time_step * fmax);
    }

    // Work items: (time index, last control), each enumerated depth first.
    struct Item
    {
        std::vector<VectorXd> points;
        std::vector<std::vector<int>> sequences;
    };
    const std::size_t nu = controls.size();
    const std::size_t n_items = static_cast<std::size_t>(times) * nu;
    std::vector<Item> items(n_items);

    auto run_item = [&](std::size_t item) {
        const int j      = static_cast<int>(item / nu) + 1;
        const double dt  = j * o.time_step / o.N;
        Item& result     = items[item];
        std::vector<int> seq(o.N, 0);
        std::vector<VectorXd> stack(o.N + 1);
        stack[o.N] = x_f;
        // Position o.N - 1 (last forward interval) is fixed by the item.
        std::vector<std::size_t> idx(o.N, 0);
        int depth = o.N - 1;
        idx[depth] = item % nu;
        auto step_back = [&](int d) {
            try
            {
                stack[d] = integrator.step_back(model, stack[d + 1], controls[idx[d]], dt);
                return stack[d].allFinite();
            }
            catch (const IntegrationError&)
            {
                return false;
            }
        };
        // Iterative DFS over positions N-2 .. 0.
        if (!step_back(depth)) return;
        if (depth == 0)
        {
            result.points.push_back(stack[0]);
            if (o.keep_generators) result.sequences.push_back({static_cast<int>(idx[0])});
            return;
        }
        int d = depth - 1;
        idx[d] = 0;
        while (d < depth)
        {
            if (idx[d] >= nu)
            {
                ++d;
                if (d < depth) ++idx[d];
                continue;
            }
            if (step_back(d))
            {
                if (d == 0)
                {
                    result.points.push_back(stack[0]);
                    if (o.keep_generators)
                    {
                        std::vector<int> s(o.N);
                        for (int k = 0; k < o.N; ++k) s[k] = static_cast<int>(idx[k]);
                        result.sequences.push_back(std::move(s));
                    }
                    ++idx[d];
                }
                else
                {
                    --d;
                    idx[d] = 0;
                }
            }
            else
            {
                ++idx[d];
            }
        }
    };

    int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads     = static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(n_items, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_items; i = next++) run_item(i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    out.points.push_back(x_f);  // zero transition time
    if (o.keep_generators)
    {
        out.times.push_back(0.0);
        out.controls.emplace_back(o.N, controls[0] * 0.0);
    }
    for (std::size_t i = 0; i < n_items; ++i)
    {
        const double T = (static_cast<int>(i / nu) + 1) * o.time_step;
        for (std::size_t k = 0; k < items[i].points.size(); ++k)
        {
            out.points.push_back(std::move(items[i].points[k]));
            if (o.keep_generators)
            {
                out.times.push_back(T);
                std::vector<VectorXd> seq;
                for (int c : items[i].sequences[k]) seq.push_back(controls[c]);
                out.controls.push_back(std::move(seq));
            }
        }
    }
    return out;
}

ContainmentResult check_containment(const RegionEstimate& region, const Ellipse& ellipse, double tolerance)
{
    ContainmentResult r;
    for (const VectorXd& x : region.points)
        if (!ellipse.contains(x, tolerance))
        {
            r.contained = false;
            ++r.violations;
            if (r.counterexamples.size() < 10) r.counterexamples.push_back(x);
        }
    return r;
}

bool region_subset(const RegionEstimate& inner, const RegionEstimate& outer)
{
    for (const VectorXd& x : inner.points)
        if (!outer.contains(x)) return false;
    return true;
}

}  // namespace qtmpc
