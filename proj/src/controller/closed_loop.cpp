#include <qtmpc/controller/closed_loop.h>

#include <algorithm>

namespace qtmpc {

TrajectoryLog closed_loop_run(const Plant& plant, FeedbackController& controller, const VectorXd& x0,
                              const ClosedLoopOptions& options)
{
    if (!plant.model) throw std::invalid_argument("closed_loop_run: missing plant model");
    if (x0.size() != plant.model->state_dim()) throw std::invalid_argument("closed_loop_run: x0 dimension mismatch");

    TrajectoryLog log;
    log.state_dim   = plant.model->state_dim();
    log.control_dim = plant.model->control_dim();

    VectorXd x      = x0;
    double t        = 0.0;
    std::size_t ref = 0;
    const double eps_time = 1e-12;

    auto finish = [&](StopReason reason, std::string message = {}) {
        log.final_time  = t;
        log.final_state = x;
        log.stop        = reason;
        log.message     = std::move(message);
        return log;
    };

    for (int step = 0;; ++step)
    {
        while (ref < options.references.size() && options.references[ref].first <= t + eps_time)
            controller.set_target(options.references[ref++].second);

        const bool last_reference = ref >= options.references.size();
        if (options.stop.target_radius > 0.0 && last_reference &&
            (x - controller.target()).norm() <= options.stop.target_radius)
            return finish(StopReason::target_reached);
        if (t >= options.stop.max_time - eps_time) return finish(StopReason::max_time);
        if (step >= options.stop.max_steps) return finish(StopReason::max_steps);

        ControlDecision d;
        try
        {
            d = controller.decide(x);
        }
        catch (const ControllerError& e)
        {
            if (e.degraded())
            {
                // Zero-order hold of the previous control for one more interval, then stop.
                const double hold = log.empty() ? options.sample_period : log.entries.back().dt_applied;
                LogEntry entry{t, x, e.fallback(), hold, log.empty() ? 0 : log.entries.back().N, 0.0, "fallback"};
                if (hold > 0.0)
                {
                    x = simulate(*plant.model, plant.integrator, x, PiecewiseConstantControl({e.fallback()}, hold),
                                 plant.substeps)
                            .back();
                    t += hold;
                }
                log.add(std::move(entry));
            }
            return finish(StopReason::controller_error, e.what());
        }

        double hold = options.sample_period > 0.0 ? options.sample_period : d.hold;
        // Do not step across a reference change.
        if (!last_reference) hold = std::min(hold, options.references[ref].first - t);
        hold = std::min(hold, std::max(options.stop.max_time - t, 0.0));
        if (!(hold > 0.0)) return finish(StopReason::max_time);

        log.add(LogEntry{t, x, d.u, hold, d.N, d.cpu_ms, d.mode});
        try
        {
            x = simulate(*plant.model, plant.integrator, x, PiecewiseConstantControl({d.u}, hold), plant.substeps)
                    .back();
        }
        catch (const IntegrationError& e)
        {
            return finish(StopReason::controller_error, e.what());
        }
        t += hold;
    }
}

}  // namespace qtmpc
