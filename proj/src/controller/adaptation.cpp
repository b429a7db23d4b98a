#include <qtmpc/controller/adaptation.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qtmpc {

std::string_view to_string(AdaptationMode mode)
{
    switch (mode)
    {
        case AdaptationMode::shrinking: return "shrinking";
        case AdaptationMode::hysteresis_estimate: return "hysteresis_estimate";
        case AdaptationMode::hysteresis_linear_search: return "hysteresis_linear_search";
        case AdaptationMode::fixed: return "fixed";
    }
    return "unknown";
}

AdaptationMode adaptation_mode_from_string(std::string_view name)
{
    for (AdaptationMode m : {AdaptationMode::shrinking, AdaptationMode::hysteresis_estimate,
                             AdaptationMode::hysteresis_linear_search, AdaptationMode::fixed})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown adaptation mode '" + std::string(name) + "'");
}

void AdaptationConfig::validate() const
{
    if (N_min < 1 || N_min > N_initial || N_initial > N_max)
        throw std::invalid_argument("AdaptationConfig: need 1 <= N_min <= N_initial <= N_max");
    if (!(dt_eps >= 0.0)) throw std::invalid_argument("AdaptationConfig: dt_eps must be non-negative");
    if (mode != AdaptationMode::shrinking && mode != AdaptationMode::fixed && !(dt_s > 0.0))
        throw std::invalid_argument("AdaptationConfig: hysteresis modes need dt_s > 0");
}

int adapt_grid(const AdaptationConfig& cfg, int N_n, double dt_star)
{
    const int shrunk = std::max(N_n - 1, cfg.N_min);
    switch (cfg.mode)
    {
        case AdaptationMode::fixed: return N_n;
        case AdaptationMode::shrinking: return shrunk;
        case AdaptationMode::hysteresis_estimate:
        case AdaptationMode::hysteresis_linear_search:
            break;
    }
    if (std::abs(dt_star - cfg.dt_s) <= cfg.dt_eps) return shrunk;

    int next = N_n;
    if (cfg.mode == AdaptationMode::hysteresis_estimate)
    {
        // Small tolerance so that exact ratios are not pushed up by rounding.
        const double ratio = N_n * dt_star / cfg.dt_s;
        next               = static_cast<int>(std::min<double>(std::ceil(ratio - 1e-9), cfg.N_max));
    }
    else
    {
        next = dt_star > cfg.dt_s ? N_n + 1 : N_n - 1;
    }
    return std::clamp(next, cfg.N_min, cfg.N_max);
}

}  // namespace qtmpc
