#include "bidgame/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bidgame {

std::vector<std::string> validate(const MarketParams& p)
{
    std::vector<std::string> out;
    if (!(p.d_min >= 0.0) || !(p.d_min <= p.d_max) || !std::isfinite(p.d_max))
        out.emplace_back("market demand limits must satisfy 0 <= d_min <= d_max < inf");
    if (!(p.p_max > 0.0) || !std::isfinite(p.p_max))
        out.emplace_back("market p_max must be positive");
    if (!(p.clearing_tol > 0.0))
        out.emplace_back("market clearing_tol must be positive");
    if (p.clearing_max_iters < 1)
        out.emplace_back("market clearing_max_iters must be at least 1");
    return out;
}

double total_demand(double price, const MarketParams& params)
{
    if (!(price >= 0.0))
        throw MarketDomainError("clearing price must be nonnegative, got " + std::to_string(price));
    if (price >= params.p_max)
        return params.d_min;
    return (params.d_max - params.d_min) * (1.0 - price / params.p_max) + params.d_min;
}

std::vector<double> split_demand(double demand, std::span<const Load> loads)
{
    std::vector<double> out(loads.size(), 0.0);
    if (loads.empty())
        return out;
    double assigned = 0.0;
    for (std::size_t l = 0; l + 1 < loads.size(); ++l) {
        out[l] = loads[l].share * demand;
        assigned += out[l];
    }
    out.back() = demand - assigned;
    return out;
}

double clearing_price(std::span<const double> supplies, std::span<const double> prices)
{
    if (supplies.size() != prices.size() || prices.empty())
        throw std::invalid_argument("clearing_price needs one supply per price");
    const auto [lo, hi] = std::minmax_element(prices.begin(), prices.end());
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t g = 0; g < prices.size(); ++g) {
        total += supplies[g];
        weighted += supplies[g] * prices[g];
    }
    if (!(total > 0.0))
        throw DegenerateMarket("total supply is zero; clearing price undefined");
    if (*lo == *hi)
        return *lo;
    return std::clamp(weighted / total, *lo, *hi);
}

ClearingState clearing_fixed_point(const PowerNetwork& network, std::span<const double> prices,
                                   const MarketParams& params)
{
    if (prices.empty())
        throw std::invalid_argument("clearing_fixed_point needs at least one price");
    double price = std::accumulate(prices.begin(), prices.end(), 0.0) / static_cast<double>(prices.size());
    if (std::all_of(prices.begin(), prices.end(), [&](double p) { return p == prices[0]; }))
        price = prices[0];

    ClearingState state;
    const ShiftFactors factors = shift_factors(network);
    lp::Basis warm;
    for (int it = 1; it <= params.clearing_max_iters; ++it) {
        const double demand = total_demand(price, params);
        std::vector<double> loads = split_demand(demand, network.loads);
        DispatchSolution dispatch = solve_opf(OpfRequest{network, prices, loads}, factors, &warm);
        warm = dispatch.basis;
        double next;
        try {
            next = clearing_price(dispatch.supplies, prices);
        } catch (const DegenerateMarket&) {
            next = std::accumulate(prices.begin(), prices.end(), 0.0) / static_cast<double>(prices.size());
        }
        state.total_demand = demand;
        state.per_load_demands = std::move(loads);
        state.dispatch = std::move(dispatch);
        state.iterations_used = it;
        const double change = std::abs(next - price);
        state.clearing_price = next;
        if (change < params.clearing_tol) {
            state.converged = true;
            return state;
        }
        price = next;
    }
    state.converged = false;
    return state;
}

double utility(double price, double supply, double cost_coeff)
{
    return price * supply - cost_coeff * supply * supply;
}

std::pair<double, double> soft_bounds(double price, double cost_coeff, double u_min)
{
    if (!(cost_coeff > 0.0) || !(u_min >= 0.0))
        throw std::invalid_argument("soft_bounds needs cost_coeff > 0 and u_min >= 0");
    const double disc = price * price - 4.0 * cost_coeff * u_min;
    if (disc < 0.0 || price < 0.0)
        throw NoProfitableAllocation("price " + std::to_string(price) + " is below 2*sqrt(a*u_min)");
    const double root = std::sqrt(disc);
    // The smaller root is written as 2u/(p + root) so it stays accurate when
    // 4au << p^2.
    const double upper = (price + root) / (2.0 * cost_coeff);
    const double lower = price + root > 0.0 ? 2.0 * u_min / (price + root) : 0.0;
    return {lower, upper};
}

double consumer_utility(double demand, const MarketParams& params)
{
    if (demand < params.d_min || demand > params.d_max)
        throw MarketDomainError("demand " + std::to_string(demand) + " outside [d_min, d_max]");
    const double gap = params.d_max - demand;
    return 0.5 * params.p_max * (params.d_max * params.d_max - gap * gap) / (params.d_max - params.d_min);
}

double inverse_demand(double demand, const MarketParams& params)
{
    if (demand < params.d_min || demand > params.d_max)
        throw MarketDomainError("demand " + std::to_string(demand) + " outside [d_min, d_max]");
    return params.p_max * (params.d_max - demand) / (params.d_max - params.d_min);
}

}  // namespace bidgame
