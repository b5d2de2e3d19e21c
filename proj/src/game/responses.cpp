#include "bidgame/game.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bidgame {

namespace {

// Round to the nearest multiple of 1e-12 so grid points built by repeated
// addition compare equal to the same decimal price read from a file.
double snap(double v)
{
    return std::nearbyint(v * 1e12) / 1e12;
}

bool same_utility(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

CandidateValue evaluate_one(std::size_t g, double candidate, std::span<const double> prices,
                            const PowerNetwork& network, const MarketParams& params)
{
    CandidateValue v;
    v.price = candidate;
    try {
        v.utility = frozen_utility(g, candidate, prices, network, params);
        v.ok = true;
    } catch (const EvaluationFailure&) {
        v.ok = false;
    }
    return v;
}

}  // namespace

double frozen_utility(std::size_t g, double candidate, std::span<const double> prices, const PowerNetwork& network,
                      const MarketParams& params)
{
    if (g >= prices.size())
        throw std::out_of_range("player index " + std::to_string(g) + " out of range");
    std::vector<double> trial(prices.begin(), prices.end());
    trial[g] = candidate;
    ClearingState state;
    try {
        state = clearing_fixed_point(network, trial, params);
    } catch (const InfeasibleDispatch& e) {
        throw EvaluationFailure(e.what());
    }
    if (!state.converged)
        throw EvaluationFailure("clearing price did not settle within " + std::to_string(params.clearing_max_iters) +
                                " iterations");
    return utility(candidate, state.dispatch.supplies[g], network.generators[g].cost_coeff);
}

std::vector<double> best_response_candidates(double incumbent, const GameConfig& config)
{
    std::vector<double> out;
    const double lo = config.price_lower;
    const double hi = config.price_upper;
    const double step = config.br_grid_step;
    for (long k = 0;; ++k) {
        const double v = snap(lo + static_cast<double>(k) * step);
        if (v > hi + 1e-9 * step)
            break;
        out.push_back(std::min(v, hi));
    }
    if (out.empty() || out.back() < hi)
        out.push_back(hi);
    if (incumbent >= lo && incumbent <= hi)
        out.push_back(incumbent);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<CandidateValue> evaluate_candidates_serial(std::size_t g, std::span<const double> candidates,
                                                       std::span<const double> prices, const PowerNetwork& network,
                                                       const MarketParams& params)
{
    std::vector<CandidateValue> out(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        out[i] = evaluate_one(g, candidates[i], prices, network, params);
    return out;
}

std::vector<CandidateValue> evaluate_candidates_omp(std::size_t g, std::span<const double> candidates,
                                                    std::span<const double> prices, const PowerNetwork& network,
                                                    const MarketParams& params)
{
    std::vector<CandidateValue> out(candidates.size());
    const long n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            evaluate_one(g, candidates[static_cast<std::size_t>(i)], prices, network, params);
    return out;
}

BestResponse best_response_detail(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                                  const MarketParams& params, const GameConfig& config, Backend backend)
{
    if (g >= prices.size())
        throw std::out_of_range("player index " + std::to_string(g) + " out of range");
    const double incumbent = prices[g];
    const std::vector<double> grid = best_response_candidates(incumbent, config);
    const std::vector<CandidateValue> values = backend == Backend::serial
                                                   ? evaluate_candidates_serial(g, grid, prices, network, params)
                                                   : evaluate_candidates_omp(g, grid, prices, network, params);

    BestResponse best;
    bool found = false;
    for (const CandidateValue& v : values) {
        if (!v.ok) {
            ++best.skipped;
            continue;
        }
        ++best.evaluated;
        if (!found) {
            best.price = v.price;
            best.utility = v.utility;
            found = true;
            continue;
        }
        if (same_utility(v.utility, best.utility)) {
            // ascending scan: on equal distance the earlier (lower) price stays
            if (std::abs(v.price - incumbent) < std::abs(best.price - incumbent)) {
                best.price = v.price;
                best.utility = v.utility;
            }
        } else if (v.utility > best.utility) {
            best.price = v.price;
            best.utility = v.utility;
        }
    }
    if (!found)
        throw EvaluationFailure("no best-response candidate for player " + std::to_string(g) +
                                " could be evaluated");
    return best;
}

double best_response(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                     const MarketParams& params, const GameConfig& config, Backend backend)
{
    return best_response_detail(g, prices, network, params, config, backend).price;
}

BetterStep better_response_detail(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                                  const MarketParams& params, const GameConfig& config)
{
    if (g >= prices.size())
        throw std::out_of_range("player index " + std::to_string(g) + " out of range");
    const double p = prices[g];
    const double eps = config.deriv_eps;

    BetterStep step;
    step.price = p;
    const double u0 = frozen_utility(g, p, prices, network, params);
    step.utility_before = u0;
    step.utility_after = u0;
    step.slope_up = (frozen_utility(g, p + eps, prices, network, params) - u0) / eps;
    step.slope_down = (u0 - frozen_utility(g, std::max(0.0, p - eps), prices, network, params)) / eps;

    const bool gain_up = step.slope_up > 0.0;
    const bool gain_down = step.slope_down < 0.0;
    double dir = 0.0;
    if (gain_up && gain_down)
        dir = std::abs(step.slope_up) > std::abs(step.slope_down) ? 1.0 : -1.0;
    else if (gain_up)
        dir = 1.0;
    else if (gain_down)
        dir = -1.0;
    if (dir == 0.0)
        return step;  // local maximum or flat

    for (double zeta = config.zeta_fraction * p; zeta >= config.zeta_min; zeta *= 0.5) {
        const double cand = std::clamp(p + dir * zeta, config.price_lower, config.price_upper);
        if (cand == p)
            break;
        const double u = frozen_utility(g, cand, prices, network, params);
        if (u > u0) {
            step.price = cand;
            step.utility_after = u;
            step.zeta = std::abs(cand - p);
            break;
        }
    }
    return step;
}

double better_response_step(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                            const MarketParams& params, const GameConfig& config)
{
    return better_response_detail(g, prices, network, params, config).price;
}

}  // namespace bidgame
