#ifndef QTMPC_CONTROLLER_ADAPTATION_H_
#define QTMPC_CONTROLLER_ADAPTATION_H_

#include <string_view>

namespace qtmpc {

enum class AdaptationMode
{
    shrinking,
    hysteresis_estimate,       // jump to ceil(N dt* / dt_s)
    hysteresis_linear_search,  // N +- 1 towards dt_s
    fixed
};

std::string_view to_string(AdaptationMode mode);
AdaptationMode adaptation_mode_from_string(std::string_view name);

struct AdaptationConfig
{
    AdaptationMode mode = AdaptationMode::shrinking;
    int N_initial       = 50;
    int N_min           = 3;
    int N_max           = 100;
    double dt_s         = 0.05;  // desired sample time (hysteresis modes)
    double dt_eps       = 0.0;   // hysteresis half width

    /// Throws std::invalid_argument unless 1 <= N_min <= N_initial <= N_max and dt_eps >= 0.
    void validate() const;
};

/// Grid size for the next sampling instant given the current size and the optimal interval length.
int adapt_grid(const AdaptationConfig& cfg, int N_n, double dt_star);

}  // namespace qtmpc

#endif  // QTMPC_CONTROLLER_ADAPTATION_H_
