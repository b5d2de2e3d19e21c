// Acceptance suite: one PASS/FAIL line per criterion (and per fallback for
// the criteria that depend on the bundled reactance data). Exit status is
// nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "bidgame/experiments.hpp"

using namespace bidgame;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
    std::string id;
    bool pass = false;
    std::string detail;
};

std::vector<Line> g_lines;

void report(const std::string& id, bool pass, const std::string& detail)
{
    g_lines.push_back({id, pass, detail});
    std::fprintf(stderr, "  [%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string vec(const std::vector<double>& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_number(v[i]);
    return s + ")";
}

// Criterion 2 audits every dispatch this binary produces or receives.
struct ConservationAudit {
    long solves = 0;
    double worst_balance = 0.0;
    double worst_limit = 0.0;

    void add(const PowerNetwork& net, const DispatchSolution& s)
    {
        ++solves;
        worst_balance = std::max(worst_balance, std::abs(s.total_supply() - s.total_demand()));
        worst_limit = std::max(worst_limit, testing::limit_violation(net, s));
    }

    void add(const PowerNetwork& net, const GameResult& r)
    {
        for (const RoundRecord& rec : r.trajectory.rounds)
            add(net, rec.clearing.dispatch);
    }
};

ConservationAudit g_audit;

// ---------------------------------------------------------------- criterion 1

void criterion_lp_oracle()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<std::size_t> vars(1, 8);
    int lps = 0;
    double worst = 0.0;
    bool statuses_agree = true;
    while (lps < 1200) {
        const std::size_t n = vars(rng);
        const std::size_t m = std::min<std::size_t>(n, rng() % 5);
        const lp::LinearProgram prog = testing::random_lp(rng, n, m);
        const lp::LpSolution s = lp::solve_lp(prog);
        const lp::LpSolution o = lp::enumerate_vertices_oracle(prog);
        if (s.status != o.status) {
            statuses_agree = false;
        } else if (s.optimal()) {
            worst = std::max(worst, std::abs(s.objective_value - o.objective_value));
        }
        ++lps;
    }

    const CaseFile& c = testing::case9();
    const ShiftFactors factors = shift_factors(c.network);
    std::uniform_real_distribution<double> price(0.5, 5.0), demand(30.0, 770.0);
    double worst_opf = 0.0;
    int opfs = 0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> prices{price(rng), price(rng), price(rng)};
        if (i % 5 == 0)
            prices = {prices[0], prices[0], prices[0]};
        const std::vector<double> loads = split_demand(demand(rng), c.network.loads);
        const OpfRequest req{c.network, prices, loads};
        const lp::LpSolution o = lp::enumerate_vertices_oracle(build_opf(req));
        const lp::LpSolution angle = lp::solve_lp(build_opf(req));
        const lp::LpSolution reduced = lp::solve_lp(build_opf_reduced(req, factors).program);
        const DispatchSolution d = solve_opf(req);
        g_audit.add(c.network, d);
        if (!o.optimal() || !angle.optimal() || !reduced.optimal()) {
            statuses_agree = false;
            continue;
        }
        worst_opf = std::max({worst_opf, std::abs(angle.objective_value - o.objective_value),
                              std::abs(reduced.objective_value - o.objective_value),
                              std::abs(d.dispatch_cost - o.objective_value)});
        ++opfs;
    }
    const double secs = seconds_since(t0);
    report("criterion 1: LP oracle equivalence",
           statuses_agree && worst < 1e-6 && worst_opf < 1e-6 && opfs == 20 && secs < 30.0,
           fmt("%d random LPs max |diff| %.2e; %d case9 OPFs max |diff| %.2e; %.1f s (limit 30 s)", lps, worst, opfs,
               worst_opf, secs));
}

// ---------------------------------------------------------------- criterion 3

void criterion_clearing()
{
    const CaseFile& c = testing::case9();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> price(0.5, 5.0);
    int equal_ok = 0;
    for (int i = 0; i < 100; ++i) {
        const double p = price(rng);
        const std::vector<double> prices{p, p, p};
        const ClearingState s = clearing_fixed_point(c.network, prices, c.market);
        g_audit.add(c.network, s.dispatch);
        equal_ok += (s.converged && s.iterations_used == 1 && s.clearing_price == p) ? 1 : 0;
    }
    int unequal_ok = 0, most_iters = 0;
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> prices{price(rng), price(rng), price(rng)};
        const ClearingState s = clearing_fixed_point(c.network, prices, c.market);
        g_audit.add(c.network, s.dispatch);
        unequal_ok += s.converged ? 1 : 0;
        most_iters = std::max(most_iters, s.iterations_used);
    }
    report("criterion 3: clearing fixed point", equal_ok == 100 && unequal_ok == 100,
           fmt("equal prices: %d/100 in one iteration at P = p; unequal: %d/100 converged "
               "(most iterations %d, cap %d)",
               equal_ok, unequal_ok, most_iters, c.market.clearing_max_iters));
}

// ------------------------------------------------------------ game sweeps

std::vector<GameResult> run_all(const CaseFile& c, const std::vector<std::vector<double>>& starts,
                                const std::vector<bool>& frozen, const GameConfig& config, RoundCache* cache)
{
    std::vector<GameResult> out(starts.size());
    const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            run_game(starts[static_cast<std::size_t>(i)], c.network, c.market, config, frozen, Backend::serial, cache);
    for (const GameResult& r : out)
        g_audit.add(c.network, r);
    return out;
}

std::vector<double> axis(double lo, double hi, int points)
{
    std::vector<double> v;
    for (int i = 0; i < points; ++i)
        v.push_back(std::nearbyint((lo + (hi - lo) * i / (points - 1)) * 1e12) / 1e12);
    return v;
}

// Tolerance test for prices on a decimal grid: 3.36 - 3.34 is 0.02 in
// decimal but 0.020000000000000018 in binary.
bool within(double a, double b, double tol)
{
    return std::abs(a - b) <= tol + 1e-12;
}

bool is_fixed(const GameResult& r)
{
    return r.classification.label == Label::fixed_point || r.classification.label == Label::boundary_fixed_point;
}

double spread(const std::vector<double>& p, std::size_t n)
{
    const auto [lo, hi] = std::minmax_element(p.begin(), p.begin() + static_cast<long>(n));
    return *hi - *lo;
}

struct Swings {
    double oscillation = 0.0;  // turning points at most `horizon` rounds apart
    double excursion = 0.0;    // any two consecutive turning points
};

// Swings between consecutive turning points of each price after round
// `from`. A monotone series has none.
Swings swings(const GameResult& r, std::size_t from, std::size_t horizon)
{
    const auto& rounds = r.trajectory.rounds;
    Swings out;
    for (std::size_t g = 0; g < rounds.front().prices.size(); ++g) {
        std::vector<std::pair<std::size_t, double>> turns;
        int dir = 0;
        for (std::size_t t = from + 1; t < rounds.size(); ++t) {
            const double d = rounds[t].prices[g] - rounds[t - 1].prices[g];
            const int now = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (now == 0)
                continue;
            if (dir != 0 && now != dir)
                turns.push_back({t - 1, rounds[t - 1].prices[g]});
            dir = now;
        }
        for (std::size_t k = 1; k < turns.size(); ++k) {
            const double swing = std::abs(turns[k].second - turns[k - 1].second);
            out.excursion = std::max(out.excursion, swing);
            if (turns[k].first - turns[k - 1].first <= horizon)
                out.oscillation = std::max(out.oscillation, swing);
        }
    }
    return out;
}

// Largest coordinate range over the last `window` rounds.
double tail_diameter(const GameResult& r, std::size_t window, std::size_t players)
{
    const auto& rounds = r.trajectory.rounds;
    const std::size_t first = rounds.size() > window ? rounds.size() - window : 0;
    double d = 0.0;
    for (std::size_t g = 0; g < players; ++g) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t t = first; t < rounds.size(); ++t) {
            lo = std::min(lo, rounds[t].prices[g]);
            hi = std::max(hi, rounds[t].prices[g]);
        }
        d = std::max(d, hi - lo);
    }
    return d;
}

// ---------------------------------------------------------------- criterion 4, 7b

std::vector<GameResult> g_three_player;

void criterion_segment()
{
    const auto t0 = Clock::now();
    const CaseFile& c = testing::case9();
    GameConfig config = c.game;
    config.mode = PlayMode::best_response;
    std::vector<std::vector<double>> starts;
    for (double a : axis(2.5, 4.5, 5))
        for (double b : axis(2.5, 4.5, 5))
            for (double d : axis(2.5, 4.5, 5))
                starts.push_back({a, b, d});
    RoundCache cache;
    g_three_player = run_all(c, starts, {}, config, &cache);
    const double secs = seconds_since(t0);

    int hits = 0;
    std::map<std::string, int> terminal_counts;
    std::vector<double> equal_fixed_points;
    for (const GameResult& r : g_three_player) {
        if (!is_fixed(r))
            continue;
        const auto& p = r.classification.fixed_point_prices;
        terminal_counts[vec(p)]++;
        if (within(spread(p, 3), 0.0, 0.01)) {
            equal_fixed_points.push_back(p[0]);
            if (within(p[0], (2.56 + 3.20) / 2, (3.20 - 2.56) / 2))  // [2.61 - 0.05, 3.15 + 0.05]
                ++hits;
        }
    }
    std::string top;
    int shown = 0;
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& [k, v] : terminal_counts)
        ranked.push_back({v, k});
    std::sort(ranked.rbegin(), ranked.rend());
    for (const auto& [v, k] : ranked) {
        if (shown++ == 3)
            break;
        top += (top.empty() ? "" : ", ") + k + " x" + std::to_string(v);
    }
    const double share = static_cast<double>(hits) / static_cast<double>(starts.size());
    report("criterion 4 (contingent): equal-price equilibrium segment", share >= 0.60 && secs < 600.0,
           fmt("%d/%zu runs (%.0f%%) end at an equal-price fixed point in [2.56, 3.20]; most common: %s; %.0f s "
               "(limit 600 s, %zu cached rounds reused)",
               hits, starts.size(), 100.0 * share, top.c_str(), secs, cache.hits()));

    // Fallback: some (p*,p*,p*) is a best-response fixed point with equal supplies.
    std::sort(equal_fixed_points.begin(), equal_fixed_points.end());
    equal_fixed_points.erase(std::unique(equal_fixed_points.begin(), equal_fixed_points.end()),
                             equal_fixed_points.end());
    if (equal_fixed_points.empty())
        for (double p = 2.5; p <= 3.3; p += 0.05)
            equal_fixed_points.push_back(std::nearbyint(p * 100) / 100);
    bool found = false;
    std::string witness;
    for (double p : equal_fixed_points) {
        const std::vector<double> prices{p, p, p};
        const std::vector<double> next = play_round(prices, c.network, c.market, config);
        if (next != prices)
            continue;
        const ClearingState s = clearing_fixed_point(c.network, prices, c.market);
        g_audit.add(c.network, s.dispatch);
        const auto& S = s.dispatch.supplies;
        if (spread(S, 3) <= 0.1) {
            found = true;
            witness = fmt("p* = %s, supplies %s", format_number(p).c_str(), vec(S).c_str());
            break;
        }
    }
    report("criterion 4 fallback: an equal-price fixed point with equal supplies", found,
           found ? witness : "no equal-price fixed point with equal supplies");
}

// ---------------------------------------------------------------- criterion 5

void criterion_named_points()
{
    const CaseFile& c = testing::case9();
    GameConfig config = c.game;
    config.mode = PlayMode::best_response;
    const std::vector<std::vector<double>> starts{{3.11, 3.45, 4.88}, {3.15, 2.8, 3.15}};
    const std::vector<double> targets{3.11, 3.13};
    const std::vector<GameResult> runs = run_all(c, starts, {}, config, nullptr);
    bool pass = true, all_end = true;
    std::string detail;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Classification& k = runs[i].classification;
        const auto& last = runs[i].trajectory.rounds.back().prices;
        bool ok = false;
        if (is_fixed(runs[i])) {
            const auto& p = k.fixed_point_prices;
            ok = within(spread(p, 3), 0.0, 0.02) && within(p[0], targets[i], 0.02) && within(p[1], targets[i], 0.02) &&
                 within(p[2], targets[i], 0.02);
        }
        pass = pass && ok;
        all_end = all_end && k.label != Label::non_terminated;
        detail += (i ? "; " : "") + vec(starts[i]) + " -> " + to_string(k.label);
        if (k.label == Label::limit_cycle) {
            detail += " period " + std::to_string(k.cycle_period) + " through";
            for (const auto& p : k.cycle_points)
                detail += " " + vec(p);
        } else {
            detail += " at " + vec(last);
        }
        detail += fmt(" after %d rounds (target %.2f)", k.rounds_used, targets[i]);
    }
    report("criterion 5 (contingent): named limit points", pass, detail);
    report("criterion 5 fallback: both runs terminate (fixed point or cycle)", all_end,
           all_end ? "neither run hit the round limit" : "a run did not terminate");
}

// ---------------------------------------------------------------- criterion 6, 7

std::vector<std::vector<double>> duopoly_starts()
{
    std::vector<std::vector<double>> starts;
    for (double a : axis(0.5, 5.0, 10))
        for (double b : axis(0.5, 5.0, 10))
            starts.push_back({a, b, 5.0});
    return starts;
}

double g_best_response_amplitude = 0.0;

void criterion_duopoly()
{
    const auto t0 = Clock::now();
    const CaseFile& c = testing::case9();
    GameConfig config = c.game;
    config.mode = PlayMode::best_response;
    const auto starts = duopoly_starts();
    RoundCache cache;
    const std::vector<GameResult> runs = run_all(c, starts, {false, false, true}, config, &cache);
    const double secs = seconds_since(t0);

    int convergent = 0, at_target = 0, period2 = 0;
    std::vector<std::vector<double>> terminals;
    std::map<std::string, int> counts;
    for (const GameResult& r : runs) {
        if (r.classification.label == Label::limit_cycle && r.classification.cycle_period == 2)
            ++period2;
        g_best_response_amplitude =
            std::max(g_best_response_amplitude,
                     swings(r, 0, static_cast<std::size_t>(config.cycle_detect_window)).oscillation);
        if (!is_fixed(r))
            continue;
        ++convergent;
        const auto& p = r.classification.fixed_point_prices;
        terminals.push_back(p);
        counts[vec({p[0], p[1]})]++;
        if (within(p[0], p[1], 0.02) && within(p[0], 3.34, 0.02) && within(p[1], 3.34, 0.02))
            ++at_target;
    }
    std::string summary;
    for (const auto& [k, v] : counts)
        summary += (summary.empty() ? "" : ", ") + k + " x" + std::to_string(v);
    report("criterion 6 (contingent): duopoly equilibrium at (3.34, 3.34)", convergent > 0 && at_target == convergent,
           fmt("%d/%d convergent runs within 0.02 of (3.34, 3.34); terminal points: %s; %.0f s", at_target,
               convergent, summary.c_str(), secs));

    bool single = convergent > 0;
    for (const auto& p : terminals)
        single = single && within(p[0], terminals.front()[0], 0.02) && within(p[1], terminals.front()[1], 0.02);
    report("criterion 6 fallback: convergent duopoly runs share one terminal point", single,
           fmt("%zu distinct terminal points among %d convergent runs", counts.size(), convergent));

    std::string example;
    for (const GameResult& r : runs) {
        if (r.classification.label == Label::limit_cycle && r.classification.cycle_period == 2) {
            example = vec(r.classification.cycle_points[0]) + " <-> " + vec(r.classification.cycle_points[1]);
            break;
        }
    }
    if (g_three_player.empty())
        return;  // criterion 4 was filtered out; 7 needs both sweeps
    int three_not_fixed = 0;
    for (const GameResult& r : g_three_player)
        three_not_fixed += is_fixed(r) ? 0 : 1;
    report("criterion 7: oscillations exist", period2 >= 1 && three_not_fixed >= 1,
           fmt("duopoly best response: %d period-2 cycles (e.g. %s); three players: %d/%zu runs not at a fixed point",
               period2, example.c_str(), three_not_fixed, g_three_player.size()));
}

// ---------------------------------------------------------------- criterion 8, 9

std::vector<GameResult> g_better;

void criterion_better_response()
{
    const auto t0 = Clock::now();
    const CaseFile& c = testing::case9();
    GameConfig config = c.game;
    config.mode = PlayMode::better_response;
    // A start at 0.5 climbs by half a percent per round and needs about 400
    // rounds to reach the interior region.
    config.max_rounds = 1000;
    const auto starts = duopoly_starts();
    g_better = run_all(c, starts, {false, false, true}, config, nullptr);
    const double secs = seconds_since(t0);

    const std::size_t window = 50;
    int interior = 0, boundary = 0, unsettled = 0, near_target = 0, failed = 0;
    double amplitude = 0.0, excursion = 0.0, widest_interior = 0.0;
    std::string odd;
    for (std::size_t i = 0; i < g_better.size(); ++i) {
        const GameResult& r = g_better[i];
        // Oscillation: reversals within the cycle-detection horizon. Slower
        // turns (one player drifting off the cap and back) are reported as
        // excursions.
        const Swings sw = swings(r, 50, static_cast<std::size_t>(config.cycle_detect_window));
        amplitude = std::max(amplitude, sw.oscillation);
        excursion = std::max(excursion, sw.excursion);
        if (!r.classification.cause.empty()) {
            ++failed;
            if (odd.empty())
                odd = vec(starts[i]) + ": " + r.classification.cause;
            continue;
        }
        const auto& last = r.trajectory.rounds.back().prices;
        const double diam = is_fixed(r) ? 0.0 : tail_diameter(r, window, 2);
        const bool at_bound = std::max(last[0], last[1]) >= config.price_upper - 0.05;
        if (diam >= 0.05) {
            ++unsettled;
            if (odd.empty())
                odd = vec(starts[i]) + " still moving at " + vec(last);
            continue;
        }
        if (at_bound) {
            ++boundary;
        } else {
            ++interior;
            widest_interior = std::max(widest_interior, diam);
            if (within(last[0], 3.05, 0.15) && within(last[1], 3.05, 0.15))
                ++near_target;
        }
    }
    const bool shape = failed == 0 && unsettled == 0 && amplitude <= 0.05;
    report("criterion 8: better-response runs settle", shape && secs < 600.0,
           fmt("%d interior (widest tail %.3f), %d at p = 5, %d unsettled, %d failed%s%s; after round 50 largest "
               "oscillation %.4f (best response: %.3f), largest slow excursion %.3f; %.0f s (limit 600 s)",
               interior, widest_interior, boundary, unsettled, failed, odd.empty() ? "" : "; first: ", odd.c_str(),
               amplitude, g_best_response_amplitude, excursion, secs));
    report("criterion 8 (contingent): interior runs near (3.05, 3.05)", interior > 0 && near_target == interior,
           fmt("%d/%d interior runs within 0.15 of (3.05, 3.05)", near_target, interior));
}

void criterion_monotone()
{
    const CaseFile& c = testing::case9();
    long steps = 0, moves = 0, decreases = 0;
    double worst = 0.0;
    for (const GameResult& r : g_better) {
        const auto& rounds = r.trajectory.rounds;
        std::vector<long> local_steps(rounds.size(), 0), local_moves(rounds.size(), 0), local_dec(rounds.size(), 0);
        std::vector<double> local_worst(rounds.size(), 0.0);
        const long n = static_cast<long>(rounds.size());
#pragma omp parallel for schedule(dynamic)
        for (long t = 1; t < n; ++t) {
            const auto& before = rounds[static_cast<std::size_t>(t - 1)].prices;
            const auto& after = rounds[static_cast<std::size_t>(t)].prices;
            for (std::size_t g = 0; g < 2; ++g) {
                ++local_steps[static_cast<std::size_t>(t)];
                if (after[g] == before[g])
                    continue;
                ++local_moves[static_cast<std::size_t>(t)];
                const double u0 = frozen_utility(g, before[g], before, c.network, c.market);
                const double u1 = frozen_utility(g, after[g], before, c.network, c.market);
                if (u1 < u0) {
                    ++local_dec[static_cast<std::size_t>(t)];
                    local_worst[static_cast<std::size_t>(t)] =
                        std::max(local_worst[static_cast<std::size_t>(t)], u0 - u1);
                }
            }
        }
        for (std::size_t t = 0; t < rounds.size(); ++t) {
            steps += local_steps[t];
            moves += local_moves[t];
            decreases += local_dec[t];
            worst = std::max(worst, local_worst[t]);
        }
    }
    report("criterion 9: better response never lowers the mover's utility", decreases == 0 && steps > 0,
           fmt("%ld player steps (%ld moves) re-evaluated, %ld decreases (largest %.3g)", steps, moves, decreases,
               worst));
}

// ---------------------------------------------------------------- criterion 10

void criterion_identities()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double p = 0.01 + 4.99 * unit(rng);
        const double a = 0.001 + 0.049 * unit(rng);
        const double u_min = unit(rng) * p * p / (4.0 * a);
        const auto [lo, hi] = soft_bounds(p, a, u_min);
        worst = std::max({worst, std::abs(utility(p, lo, a) - u_min), std::abs(utility(p, hi, a) - u_min)});
    }
    const MarketParams& m = testing::case9().market;
    double worst_fd = 0.0;
    const double h = 1e-3;
    for (int i = 0; i < 100; ++i) {
        const double d = m.d_min + h + (m.d_max - m.d_min - 2 * h) * unit(rng);
        const double fd = (consumer_utility(d + h, m) - consumer_utility(d - h, m)) / (2 * h);
        // The price at which the demand curve asks for d.
        const double p = m.p_max * (1.0 - (d - m.d_min) / (m.d_max - m.d_min));
        worst_fd = std::max(worst_fd, std::abs(fd - p));
    }
    report("criterion 10: soft-bound and consumer-utility identities", worst <= 1e-9 && worst_fd <= 1e-4,
           fmt("soft bounds: max |u - u_min| %.2e over 1000 triples; dV/dD vs demand price: max |diff| %.2e over "
               "100 demands",
               worst, worst_fd));
}

// ---------------------------------------------------------------- criterion 2

void criterion_conservation()
{
    report("criterion 2: conservation and limits",
           g_audit.solves > 0 && g_audit.worst_balance < 1e-6 && g_audit.worst_limit < 1e-9,
           fmt("%ld dispatches audited; max |sum S - sum D| %.2e MW, max limit violation %.2e", g_audit.solves,
               g_audit.worst_balance, g_audit.worst_limit));
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i)
        only.insert(argv[i]);
    auto wanted = [&](const std::string& k) { return only.empty() || only.count(k) > 0; };

    const auto t0 = Clock::now();
    const std::vector<std::pair<std::string, std::function<void()>>> steps{
        {"1", criterion_lp_oracle},      {"3", criterion_clearing},        {"4", criterion_segment},
        {"5", criterion_named_points},   {"6", criterion_duopoly},         {"8", criterion_better_response},
        {"9", criterion_monotone},       {"10", criterion_identities},     {"2", criterion_conservation},
    };
    for (const auto& [key, fn] : steps) {
        if (!wanted(key))
            continue;
        std::fprintf(stderr, "running criterion %s ...\n", key.c_str());
        fn();
    }

    // Print in criterion order.
    auto number = [](const std::string& id) { return std::stoi(id.substr(id.find(' ') + 1)); };
    std::stable_sort(g_lines.begin(), g_lines.end(),
                     [&](const Line& a, const Line& b) { return number(a.id) < number(b.id); });
    int failed = 0;
    std::printf("\nacceptance results\n");
    for (const Line& l : g_lines) {
        std::printf("%s  %s\n      %s\n", l.pass ? "PASS" : "FAIL", l.id.c_str(), l.detail.c_str());
        failed += l.pass ? 0 : 1;
    }
    std::printf("%zu lines, %d failed, %.0f s\n", g_lines.size(), failed, seconds_since(t0));
    return failed == 0 ? 0 : 1;
}
