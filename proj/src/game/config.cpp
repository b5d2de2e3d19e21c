#include "bidgame/game.hpp"

#include <cmath>

namespace bidgame {

const char* to_string(PlayMode m) noexcept
{
    return m == PlayMode::best_response ? "best_response" : "better_response";
}

const char* to_string(UpdateOrder o) noexcept
{
    return o == UpdateOrder::simultaneous ? "simultaneous" : "sequential";
}

const char* to_string(Label l) noexcept
{
    switch (l) {
    case Label::fixed_point: return "fixed_point";
    case Label::limit_cycle: return "limit_cycle";
    case Label::boundary_fixed_point: return "boundary_fixed_point";
    case Label::non_terminated: return "non_terminated";
    }
    return "unknown";
}

std::vector<std::string> validate(const GameConfig& c)
{
    std::vector<std::string> out;
    if (!(c.price_lower >= 0.0) || !(c.price_lower < c.price_upper) || !std::isfinite(c.price_upper))
        out.emplace_back("game price bounds must satisfy 0 <= price_lower < price_upper < inf");
    if (!(c.br_grid_step > 0.0))
        out.emplace_back("game br_grid_step must be positive");
    if (!(c.deriv_eps > 0.0))
        out.emplace_back("game deriv_eps must be positive");
    if (!(c.zeta_fraction > 0.0 && c.zeta_fraction < 1.0))
        out.emplace_back("game zeta_fraction must lie in (0, 1)");
    if (!(c.zeta_min > 0.0))
        out.emplace_back("game zeta_min must be positive");
    if (c.max_rounds < 1)
        out.emplace_back("game max_rounds must be at least 1");
    if (!(c.convergence_tol >= 0.0))
        out.emplace_back("game convergence_tol must be nonnegative");
    if (c.cycle_detect_window < 2)
        out.emplace_back("game cycle_detect_window must be at least 2");
    return out;
}

}  // namespace bidgame
