#include "bidgame/experiments.hpp"

#include <stdexcept>

namespace bidgame {

std::vector<double> GridAxis::points() const
{
    return axis_points(lo, hi, step);
}

GridAxis parse_axis(const std::string& text)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw std::invalid_argument("bad number '" + s + "' in grid '" + text + "'");
        return v;
    };
    const auto first = text.find(':');
    if (first == std::string::npos) {
        const double v = number(text);
        return {v, v, 1.0};
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
        throw std::invalid_argument("grid '" + text + "' must be lo:hi:step or a single value");
    GridAxis a{number(text.substr(0, first)), number(text.substr(first + 1, second - first - 1)),
               number(text.substr(second + 1))};
    if (!(a.step > 0.0) || !(a.hi >= a.lo))
        throw std::invalid_argument("grid '" + text + "' needs step > 0 and hi >= lo");
    return a;
}

void validate_sweep(const SweepSpec& spec, std::size_t players, const GameConfig& config)
{
    if (spec.axes.size() != players)
        throw std::invalid_argument("sweep needs one axis per player, got " + std::to_string(spec.axes.size()) +
                                    " for " + std::to_string(players));
    if (spec.max_rounds && *spec.max_rounds < 1)
        throw std::invalid_argument("max rounds must be positive");
    if (spec.frozen.size() > players)
        throw std::invalid_argument("more frozen prices than players");
    auto inside = [&](double p) { return p >= config.price_lower - 1e-12 && p <= config.price_upper + 1e-12; };
    for (std::size_t g = 0; g < players; ++g) {
        if (g < spec.frozen.size() && spec.frozen[g]) {
            if (!inside(*spec.frozen[g]))
                throw std::invalid_argument("frozen price of player " + std::to_string(g + 1) +
                                            " outside [price_lower, price_upper]");
            continue;
        }
        const GridAxis& a = spec.axes[g];
        if (!(a.step > 0.0) || !(a.hi >= a.lo))
            throw std::invalid_argument("axis of player " + std::to_string(g + 1) + " needs step > 0 and hi >= lo");
        if (!inside(a.lo) || !inside(a.hi))
            throw std::invalid_argument("axis of player " + std::to_string(g + 1) +
                                        " outside [price_lower, price_upper]");
    }
}

std::vector<std::vector<double>> sweep_starts(const SweepSpec& spec)
{
    const std::size_t n = spec.axes.size();
    std::vector<std::vector<double>> values(n);
    for (std::size_t g = 0; g < n; ++g) {
        if (g < spec.frozen.size() && spec.frozen[g])
            values[g] = {*spec.frozen[g]};
        else
            values[g] = spec.axes[g].points();
    }
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
        std::vector<double> start(n);
        for (std::size_t g = 0; g < n; ++g)
            start[g] = values[g][idx[g]];
        out.push_back(std::move(start));
        std::size_t g = n;
        for (;;) {
            if (g == 0)
                return out;
            --g;
            if (++idx[g] < values[g].size())
                break;
            idx[g] = 0;
        }
    }
}

namespace {

struct SweepPlan {
    std::vector<std::vector<double>> starts;
    std::vector<bool> frozen;
    GameConfig config;
};

SweepPlan plan(const CaseFile& c, const SweepSpec& spec)
{
    validate_sweep(spec, c.network.num_generators(), c.game);
    SweepPlan p;
    p.starts = sweep_starts(spec);
    p.frozen.assign(c.network.num_generators(), false);
    for (std::size_t g = 0; g < spec.frozen.size(); ++g)
        p.frozen[g] = spec.frozen[g].has_value();
    p.config = c.game;
    p.config.mode = spec.mode;
    if (spec.max_rounds)
        p.config.max_rounds = *spec.max_rounds;
    return p;
}

SweepCell run_cell(const CaseFile& c, const SweepPlan& p, std::size_t i, RoundCache& cache)
{
    SweepCell cell;
    cell.start = p.starts[i];
    try {
        GameResult r = run_game(cell.start, c.network, c.market, p.config, p.frozen, Backend::serial, &cache);
        cell.classification = std::move(r.classification);
        if (!r.trajectory.rounds.empty())
            cell.terminal = r.trajectory.rounds.back().prices;
    } catch (const std::exception& e) {
        cell.classification.label = Label::non_terminated;
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

std::vector<SweepCell> sweep_serial(const CaseFile& c, const SweepSpec& spec)
{
    const SweepPlan p = plan(c, spec);
    RoundCache cache;
    std::vector<SweepCell> out(p.starts.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = run_cell(c, p, i, cache);
    return out;
}

std::vector<SweepCell> sweep_omp(const CaseFile& c, const SweepSpec& spec)
{
    const SweepPlan p = plan(c, spec);
    RoundCache cache;
    std::vector<SweepCell> out(p.starts.size());
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = run_cell(c, p, static_cast<std::size_t>(i), cache);
    return out;
}

std::vector<SweepCell> sweep(const CaseFile& c, const SweepSpec& spec, Backend backend)
{
    return backend == Backend::serial ? sweep_serial(c, spec) : sweep_omp(c, spec);
}

}  // namespace bidgame
