#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidgame/market.hpp"
#include "bidgame/network.hpp"

namespace bidgame {

enum class PlayMode { best_response, better_response };
enum class UpdateOrder { simultaneous, sequential };

/// Which implementation of the data-parallel kernels to run. `serial` is the
/// reference; `openmp` must produce bit-identical results.
enum class Backend { serial, openmp };

const char* to_string(PlayMode m) noexcept;
const char* to_string(UpdateOrder o) noexcept;

struct GameConfig {
    PlayMode mode = PlayMode::best_response;
    double price_lower = 0.01;
    double price_upper = 5.0;
    double br_grid_step = 0.01;
    double deriv_eps = 1e-6;
    double zeta_fraction = 0.005;
    double zeta_min = 5e-5;  // 1e-5 * price_upper
    int max_rounds = 200;
    double convergence_tol = 1e-9;
    int cycle_detect_window = 20;
    UpdateOrder update_order = UpdateOrder::simultaneous;

    bool operator==(const GameConfig&) const = default;
};

std::vector<std::string> validate(const GameConfig& config);

struct RoundRecord {
    std::vector<double> prices;
    ClearingState clearing;
    std::vector<double> utilities;
};

struct Trajectory {
    std::vector<RoundRecord> rounds;
    std::vector<bool> frozen;  // players whose price never moves
};

enum class Label { fixed_point, limit_cycle, boundary_fixed_point, non_terminated };

const char* to_string(Label l) noexcept;

struct Classification {
    Label label = Label::non_terminated;
    std::vector<double> fixed_point_prices;
    int cycle_period = 0;
    std::vector<std::vector<double>> cycle_points;
    int rounds_used = 0;
    std::string cause;  // set when a round failed
};

struct GameResult {
    Trajectory trajectory;
    Classification classification;
};

/// A candidate price could not be evaluated: the clearing loop did not settle
/// or the dispatch was infeasible.
class EvaluationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Utility of player g when it alone moves to `candidate`, at the consistent
/// clearing state of the resulting price vector.
double frozen_utility(std::size_t g, double candidate, std::span<const double> prices,
                      const PowerNetwork& network, const MarketParams& params);

/// Search grid for player g: price_lower, price_lower + step, ..., price_upper,
/// plus the incumbent price when it is off-grid. Ascending, no duplicates.
std::vector<double> best_response_candidates(double incumbent, const GameConfig& config);

struct CandidateValue {
    double price = 0.0;
    double utility = 0.0;
    bool ok = false;
};

/// Evaluates frozen_utility at every candidate. Failed candidates have ok=false.
std::vector<CandidateValue> evaluate_candidates_serial(std::size_t g, std::span<const double> candidates,
                                                       std::span<const double> prices, const PowerNetwork& network,
                                                       const MarketParams& params);
std::vector<CandidateValue> evaluate_candidates_omp(std::size_t g, std::span<const double> candidates,
                                                    std::span<const double> prices, const PowerNetwork& network,
                                                    const MarketParams& params);

struct BestResponse {
    double price = 0.0;
    double utility = 0.0;
    int evaluated = 0;
    int skipped = 0;
};

/// Grid argmax of frozen_utility. Ties go to the candidate nearest the
/// incumbent, then to the lower price. Throws EvaluationFailure if no
/// candidate can be evaluated.
BestResponse best_response_detail(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                                  const MarketParams& params, const GameConfig& config,
                                  Backend backend = Backend::openmp);

double best_response(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                     const MarketParams& params, const GameConfig& config, Backend backend = Backend::openmp);

struct BetterStep {
    double price = 0.0;         // new price
    double utility_before = 0.0;
    double utility_after = 0.0;
    double slope_up = 0.0;      // (u(p + eps) - u(p)) / eps
    double slope_down = 0.0;    // (u(p) - u(p - eps)) / eps
    double zeta = 0.0;          // accepted step, 0 when the price stays
};

/// One finite-difference guided step with a halving step size.
BetterStep better_response_detail(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                                  const MarketParams& params, const GameConfig& config);

double better_response_step(std::size_t g, std::span<const double> prices, const PowerNetwork& network,
                            const MarketParams& params, const GameConfig& config);

/// One round of play. Frozen players keep their price. An empty mask freezes
/// nobody.
std::vector<double> play_round(std::span<const double> prices, const PowerNetwork& network,
                               const MarketParams& params, const GameConfig& config,
                               const std::vector<bool>& frozen = {}, Backend backend = Backend::openmp);

/// play_round results keyed by the exact price vector, shared by runs on the
/// same network, market, config and freeze mask. Thread safe. A run that uses
/// it returns exactly what it would return without it.
class RoundCache {
public:
    std::optional<std::vector<double>> find(std::span<const double> prices) const;
    void store(std::span<const double> prices, const std::vector<double>& next);

    std::size_t size() const;
    std::size_t hits() const noexcept { return hits_.load(); }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::vector<double>, std::vector<double>> rounds_;
    mutable std::atomic<std::size_t> hits_{0};
};

/// Iterates play_round from `initial_prices` until a fixed point, a detected
/// cycle, a failed round, or max_rounds.
GameResult run_game(std::span<const double> initial_prices, const PowerNetwork& network,
                    const MarketParams& params, const GameConfig& config, const std::vector<bool>& frozen = {},
                    Backend backend = Backend::openmp, RoundCache* cache = nullptr);

/// Smallest period k in [2, window] such that the last 2k+1 price vectors are
/// k-periodic within tol (the cycle has been traversed twice).
std::optional<int> detect_cycle(std::span<const std::vector<double>> history, int window, double tol);

Classification classify_trajectory(const Trajectory& trajectory, const GameConfig& config);

struct QuiverGrid {
    double lo1 = 0.0, hi1 = 0.0, step1 = 0.0;
    double lo2 = 0.0, hi2 = 0.0, step2 = 0.0;
};

struct QuiverNode {
    double p1 = 0.0, p2 = 0.0;
    double dp1 = 0.0, dp2 = 0.0;
    bool ok = false;
    std::string error;
};

/// Evenly spaced points lo, lo + step, ... up to hi (inclusive within 1e-9 step).
std::vector<double> axis_points(double lo, double hi, double step);

/// Simultaneous better-response displacement at every node of a 2-D price grid.
/// `base_prices` fixes every player except free1 and free2. Nodes are ordered
/// with p1 varying slowest.
std::vector<QuiverNode> quiver_field_serial(const QuiverGrid& grid, std::span<const double> base_prices,
                                            std::size_t free1, std::size_t free2, const PowerNetwork& network,
                                            const MarketParams& params, const GameConfig& config);
std::vector<QuiverNode> quiver_field_omp(const QuiverGrid& grid, std::span<const double> base_prices,
                                         std::size_t free1, std::size_t free2, const PowerNetwork& network,
                                         const MarketParams& params, const GameConfig& config);
std::vector<QuiverNode> quiver_field(const QuiverGrid& grid, std::span<const double> base_prices, std::size_t free1,
                                     std::size_t free2, const PowerNetwork& network, const MarketParams& params,
                                     const GameConfig& config, Backend backend = Backend::openmp);

}  // namespace bidgame
