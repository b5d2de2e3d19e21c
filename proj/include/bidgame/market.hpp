#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bidgame/dcopf.hpp"
#include "bidgame/network.hpp"

namespace bidgame {

struct MarketParams {
    double d_max = 0.0;  // MW at zero price
    double d_min = 0.0;  // inflexible demand, MW
    double p_max = 0.0;  // price at which flexible demand vanishes
    double clearing_tol = 1e-6;
    // The clearing map contracts slowly (ratio near -0.95) while the cheap
    // generators sit at their limits; 100 passes is not enough there.
    int clearing_max_iters = 1000;

    bool operator==(const MarketParams&) const = default;
};

/// Empty when the parameters are usable.
std::vector<std::string> validate(const MarketParams& params);

/// Consistent clearing price, demand and dispatch for one price vector.
struct ClearingState {
    double clearing_price = 0.0;
    double total_demand = 0.0;
    std::vector<double> per_load_demands;
    DispatchSolution dispatch;
    int iterations_used = 0;
    bool converged = false;
};

class MarketDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Zero total supply; the supply-weighted price is undefined.
class DegenerateMarket : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Price below 2 sqrt(a u_min): no allocation earns u_min.
class NoProfitableAllocation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Linear demand response, clamped to d_min above p_max.
double total_demand(double price, const MarketParams& params);

/// share_l * D per load; the last load takes the rounding remainder so the
/// components sum to D exactly.
std::vector<double> split_demand(double demand, std::span<const Load> loads);

/// Supply-weighted mean price. Exactly the common price when all prices are
/// equal. Throws DegenerateMarket on zero total supply.
double clearing_price(std::span<const double> supplies, std::span<const double> prices);

/// Alternate demand response and dispatch until the clearing price settles.
///
/// Starts from the unweighted mean of `prices`. Each pass computes demand at
/// the current price, dispatches it, and recomputes the price. Stops when the
/// price moves by less than clearing_tol, or after clearing_max_iters passes
/// with converged = false. InfeasibleDispatch propagates.
ClearingState clearing_fixed_point(const PowerNetwork& network, std::span<const double> prices,
                                   const MarketParams& params);

/// price * supply - cost_coeff * supply^2
double utility(double price, double supply, double cost_coeff);

/// Supply interval on which utility stays at or above u_min.
std::pair<double, double> soft_bounds(double price, double cost_coeff, double u_min);

/// Aggregate consumer utility V(D) whose marginal value inverts the demand
/// curve on [d_min, d_max].
double consumer_utility(double demand, const MarketParams& params);

/// Price at which total_demand returns `demand` (inverse of the linear part).
double inverse_demand(double demand, const MarketParams& params);

}  // namespace bidgame
