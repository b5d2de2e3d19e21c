#include "bidgame/game.hpp"

#include <cmath>

namespace bidgame {

namespace {

struct QuiverPlan {
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<bool> frozen;
    GameConfig config;
};

QuiverPlan plan(const QuiverGrid& grid, std::span<const double> base, std::size_t free1, std::size_t free2,
                const GameConfig& config)
{
    if (free1 >= base.size() || free2 >= base.size() || free1 == free2)
        throw std::invalid_argument("quiver needs two distinct free players");
    QuiverPlan p;
    p.axis1 = axis_points(grid.lo1, grid.hi1, grid.step1);
    p.axis2 = axis_points(grid.lo2, grid.hi2, grid.step2);
    p.frozen.assign(base.size(), true);
    p.frozen[free1] = false;
    p.frozen[free2] = false;
    p.config = config;
    p.config.mode = PlayMode::better_response;
    p.config.update_order = UpdateOrder::simultaneous;
    return p;
}

QuiverNode node_at(const QuiverPlan& plan, std::size_t idx, std::span<const double> base, std::size_t free1,
                   std::size_t free2, const PowerNetwork& network, const MarketParams& params)
{
    const std::size_t n2 = plan.axis2.size();
    QuiverNode node;
    node.p1 = plan.axis1[idx / n2];
    node.p2 = plan.axis2[idx % n2];
    std::vector<double> prices(base.begin(), base.end());
    prices[free1] = node.p1;
    prices[free2] = node.p2;
    try {
        const std::vector<double> next =
            play_round(prices, network, params, plan.config, plan.frozen, Backend::serial);
        node.dp1 = next[free1] - node.p1;
        node.dp2 = next[free2] - node.p2;
        node.ok = true;
    } catch (const std::exception& e) {
        node.ok = false;
        node.error = e.what();
    }
    return node;
}

}  // namespace

std::vector<double> axis_points(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("axis needs step > 0 and hi >= lo");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double v = std::nearbyint((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
        if (v > hi + 1e-9 * step)
            break;
        out.push_back(v);
    }
    return out;
}

std::vector<QuiverNode> quiver_field_serial(const QuiverGrid& grid, std::span<const double> base_prices,
                                            std::size_t free1, std::size_t free2, const PowerNetwork& network,
                                            const MarketParams& params, const GameConfig& config)
{
    const QuiverPlan p = plan(grid, base_prices, free1, free2, config);
    std::vector<QuiverNode> out(p.axis1.size() * p.axis2.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = node_at(p, i, base_prices, free1, free2, network, params);
    return out;
}

std::vector<QuiverNode> quiver_field_omp(const QuiverGrid& grid, std::span<const double> base_prices,
                                         std::size_t free1, std::size_t free2, const PowerNetwork& network,
                                         const MarketParams& params, const GameConfig& config)
{
    const QuiverPlan p = plan(grid, base_prices, free1, free2, config);
    std::vector<QuiverNode> out(p.axis1.size() * p.axis2.size());
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            node_at(p, static_cast<std::size_t>(i), base_prices, free1, free2, network, params);
    return out;
}

std::vector<QuiverNode> quiver_field(const QuiverGrid& grid, std::span<const double> base_prices, std::size_t free1,
                                     std::size_t free2, const PowerNetwork& network, const MarketParams& params,
                                     const GameConfig& config, Backend backend)
{
    if (backend == Backend::serial)
        return quiver_field_serial(grid, base_prices, free1, free2, network, params, config);
    return quiver_field_omp(grid, base_prices, free1, free2, network, params, config);
}

}  // namespace bidgame
