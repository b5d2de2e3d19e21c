#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidgame/case_file.hpp"
#include "bidgame/dcopf.hpp"
#include "bidgame/game.hpp"
#include "bidgame/market.hpp"

namespace bidgame {

/// Closed price range sampled every `step`, as lo:hi:step on the command
/// line. A single value is a one-point axis.
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    std::vector<double> points() const;
};

/// Parses "lo:hi:step" or a single number.
GridAxis parse_axis(const std::string& text);

/// A grid of starting prices. Player g sweeps axes[g] unless frozen[g] holds
/// a price, in which case it starts there and never moves.
struct SweepSpec {
    std::vector<GridAxis> axes;
    std::vector<std::optional<double>> frozen;
    PlayMode mode = PlayMode::best_response;
    std::optional<int> max_rounds;  // overrides the case default
};

/// Throws std::invalid_argument unless every axis and frozen price lies in
/// [price_lower, price_upper] and the sizes match the player count.
void validate_sweep(const SweepSpec& spec, std::size_t players, const GameConfig& config);

/// Starting vectors in row-major order, the last player varying fastest.
std::vector<std::vector<double>> sweep_starts(const SweepSpec& spec);

struct SweepCell {
    std::vector<double> start;
    Classification classification;
    std::vector<double> terminal;  // last recorded prices
    std::string error;             // non-empty if the run could not start
};

/// Runs every grid cell. Results come back in sweep_starts order and do not
/// depend on the backend or the thread count. Runs share a RoundCache.
std::vector<SweepCell> sweep_serial(const CaseFile& c, const SweepSpec& spec);
std::vector<SweepCell> sweep_omp(const CaseFile& c, const SweepSpec& spec);
std::vector<SweepCell> sweep(const CaseFile& c, const SweepSpec& spec, Backend backend = Backend::openmp);

/// One dispatch at fixed prices. Demands come from the clearing fixed point
/// unless `demand` overrides the total.
struct OpfReport {
    std::vector<double> prices;
    double clearing_price = 0.0;
    double total_demand = 0.0;
    bool demand_overridden = false;
    int clearing_iterations = 0;
    DispatchSolution dispatch;
};

/// Throws InfeasibleDispatch, DegenerateMarket or EvaluationFailure.
OpfReport cmd_opf(const CaseFile& c, std::span<const double> prices, std::optional<double> demand = std::nullopt);

struct RunRequest {
    std::vector<double> start;
    PlayMode mode = PlayMode::best_response;
    std::vector<std::optional<double>> freeze;  // per player, may be shorter
    std::optional<int> max_rounds;
};

/// Frozen players start at their frozen price.
GameResult cmd_run(const CaseFile& c, const RunRequest& req, Backend backend = Backend::openmp);

/// Every number is printed with 9 significant digits.
std::string format_number(double v);

void write_opf_text(std::ostream& out, const CaseFile& c, const OpfReport& r);
void write_opf_json(std::ostream& out, const CaseFile& c, const OpfReport& r);

/// Header: round,p_1..p_n,S_1..S_n,P,D,u_1..u_n. One row per recorded round.
void write_trajectory_csv(std::ostream& out, const GameResult& result);
void write_summary_json(std::ostream& out, const GameResult& result, const GameConfig& config);

/// Header: start_1..start_n,label,rounds_used,cycle_period,end_1..end_n,cycle,error
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

/// Header: p1,p2,dp1,dp2. Failed nodes carry nan displacements.
void write_quiver_csv(std::ostream& out, const std::vector<QuiverNode>& nodes);

}  // namespace bidgame
