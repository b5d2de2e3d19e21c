#include "bidgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace bidgame {

namespace {

double max_change(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool is_frozen(const std::vector<bool>& frozen, std::size_t g)
{
    return g < frozen.size() && frozen[g];
}

double respond(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
               const MarketParams& params, const GameConfig& config, Backend backend)
{
    if (config.mode == PlayMode::best_response)
        return best_response(g, prices, network, params, config, backend);
    return better_response_step(g, prices, network, params, config);
}

RoundRecord make_record(std::vector<double> prices, const PowerNetwork& network, const MarketParams& params)
{
    RoundRecord rec;
    try {
        rec.clearing = clearing_fixed_point(network, prices, params);
    } catch (const InfeasibleDispatch& e) {
        throw EvaluationFailure(e.what());
    }
    if (!rec.clearing.converged)
        throw EvaluationFailure("clearing price did not settle for the round's prices");
    rec.utilities.resize(prices.size());
    for (std::size_t g = 0; g < prices.size(); ++g)
        rec.utilities[g] =
            utility(prices[g], rec.clearing.dispatch.supplies[g], network.generators[g].cost_coeff);
    rec.prices = std::move(prices);
    return rec;
}

}  // namespace

std::vector<double> play_round(std::span<const double> prices, const PowerNetwork& network,
                               const MarketParams& params, const GameConfig& config,
                               const std::vector<bool>& frozen, Backend backend)
{
    std::vector<double> next(prices.begin(), prices.end());
    if (config.update_order == UpdateOrder::simultaneous) {
        for (std::size_t g = 0; g < prices.size(); ++g)
            if (!is_frozen(frozen, g))
                next[g] = respond(g, prices, network, params, config, backend);
    } else {
        for (std::size_t g = 0; g < prices.size(); ++g)
            if (!is_frozen(frozen, g))
                next[g] = respond(g, next, network, params, config, backend);
    }
    return next;
}

std::optional<std::vector<double>> RoundCache::find(std::span<const double> prices) const
{
    std::shared_lock lock(mutex_);
    const auto it = rounds_.find(std::vector<double>(prices.begin(), prices.end()));
    if (it == rounds_.end())
        return std::nullopt;
    ++hits_;
    return it->second;
}

void RoundCache::store(std::span<const double> prices, const std::vector<double>& next)
{
    std::unique_lock lock(mutex_);
    rounds_.emplace(std::vector<double>(prices.begin(), prices.end()), next);
}

std::size_t RoundCache::size() const
{
    std::shared_lock lock(mutex_);
    return rounds_.size();
}

std::optional<int> detect_cycle(std::span<const std::vector<double>> history, int window, double tol)
{
    const long t = static_cast<long>(history.size()) - 1;
    for (int k = 2; k <= window; ++k) {
        if (t < 2L * k)
            break;
        bool periodic = true;
        for (long i = 0; i <= k && periodic; ++i)
            periodic = max_change(history[static_cast<std::size_t>(t - i)],
                                  history[static_cast<std::size_t>(t - i - k)]) <= tol;
        if (periodic)
            return k;
    }
    return std::nullopt;
}

Classification classify_trajectory(const Trajectory& trajectory, const GameConfig& config)
{
    const auto& rounds = trajectory.rounds;
    if (rounds.empty())
        throw std::invalid_argument("cannot classify an empty trajectory");

    Classification c;
    c.rounds_used = static_cast<int>(rounds.size()) - 1;
    const auto& last = rounds.back().prices;

    if (rounds.size() >= 2 && max_change(last, rounds[rounds.size() - 2].prices) < config.convergence_tol) {
        c.label = Label::fixed_point;
        c.fixed_point_prices = last;
        for (std::size_t g = 0; g < last.size(); ++g) {
            if (is_frozen(trajectory.frozen, g))
                continue;
            if (std::abs(last[g] - config.price_lower) <= config.convergence_tol ||
                std::abs(last[g] - config.price_upper) <= config.convergence_tol)
                c.label = Label::boundary_fixed_point;
        }
        return c;
    }

    std::vector<std::vector<double>> history;
    history.reserve(rounds.size());
    for (const auto& r : rounds)
        history.push_back(r.prices);
    if (const auto k = detect_cycle(history, config.cycle_detect_window, config.convergence_tol)) {
        c.label = Label::limit_cycle;
        c.cycle_period = *k;
        c.cycle_points.assign(history.end() - *k, history.end());
        return c;
    }
    c.label = Label::non_terminated;
    return c;
}

GameResult run_game(std::span<const double> initial_prices, const PowerNetwork& network,
                    const MarketParams& params, const GameConfig& config, const std::vector<bool>& frozen,
                    Backend backend, RoundCache* cache)
{
    if (initial_prices.size() != network.num_generators())
        throw std::invalid_argument("expected one initial price per generator");
    for (double p : initial_prices)
        if (!(p >= config.price_lower - 1e-12 && p <= config.price_upper + 1e-12))
            throw std::invalid_argument("initial price " + std::to_string(p) + " outside [price_lower, price_upper]");

    GameResult result;
    result.trajectory.frozen = frozen;
    result.trajectory.frozen.resize(initial_prices.size(), false);
    auto& rounds = result.trajectory.rounds;
    std::vector<std::vector<double>> history;

    std::string cause;
    try {
        rounds.push_back(make_record({initial_prices.begin(), initial_prices.end()}, network, params));
        history.push_back(rounds.back().prices);
        for (int r = 1; r <= config.max_rounds; ++r) {
            const std::vector<double>& current = rounds.back().prices;
            std::optional<std::vector<double>> cached;
            if (cache != nullptr)
                cached = cache->find(current);
            std::vector<double> next;
            if (cached) {
                next = std::move(*cached);
            } else {
                next = play_round(current, network, params, config, result.trajectory.frozen, backend);
                if (cache != nullptr)
                    cache->store(current, next);
            }
            const double change = max_change(next, rounds.back().prices);
            rounds.push_back(make_record(std::move(next), network, params));
            history.push_back(rounds.back().prices);
            if (change < config.convergence_tol)
                break;
            if (detect_cycle(history, config.cycle_detect_window, config.convergence_tol))
                break;
        }
    } catch (const EvaluationFailure& e) {
        cause = e.what();
    } catch (const DegenerateMarket& e) {
        cause = e.what();
    }

    if (rounds.empty()) {
        result.classification.label = Label::non_terminated;
        result.classification.cause = cause;
        return result;
    }
    result.classification = classify_trajectory(result.trajectory, config);
    if (!cause.empty()) {
        result.classification.label = Label::non_terminated;
        result.classification.cause = cause;
    }
    return result;
}

}  // namespace bidgame
