#include "bidgame/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace bidgame {

namespace {

using nlohmann::json;

// Rounded to what the text output shows, so JSON and CSV agree.
double shown(double v)
{
    if (!std::isfinite(v))
        return v;
    return std::stod(format_number(v));
}

json shown_array(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(shown(x));
    return a;
}

void csv_row(std::ostream& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0)
            out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + "\"";
}

std::string join_prices(const std::vector<double>& v, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0)
            s += sep;
        s += format_number(v[i]);
    }
    return s;
}

}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

OpfReport cmd_opf(const CaseFile& c, std::span<const double> prices, std::optional<double> demand)
{
    if (prices.size() != c.network.num_generators())
        throw std::invalid_argument("expected " + std::to_string(c.network.num_generators()) + " prices, got " +
                                    std::to_string(prices.size()));
    OpfReport r;
    r.prices.assign(prices.begin(), prices.end());
    if (demand) {
        if (!(*demand >= 0.0) || !std::isfinite(*demand))
            throw std::invalid_argument("demand must be finite and nonnegative");
        const std::vector<double> loads = split_demand(*demand, c.network.loads);
        r.dispatch = solve_opf(OpfRequest{c.network, prices, loads});
        r.total_demand = *demand;
        r.demand_overridden = true;
        r.clearing_price = clearing_price(r.dispatch.supplies, prices);
        return r;
    }
    ClearingState st = clearing_fixed_point(c.network, prices, c.market);
    if (!st.converged)
        throw EvaluationFailure("clearing price did not settle within " +
                                std::to_string(c.market.clearing_max_iters) + " iterations");
    r.clearing_price = st.clearing_price;
    r.total_demand = st.total_demand;
    r.clearing_iterations = st.iterations_used;
    r.dispatch = std::move(st.dispatch);
    return r;
}

GameResult cmd_run(const CaseFile& c, const RunRequest& req, Backend backend)
{
    const std::size_t n = c.network.num_generators();
    if (req.start.size() != n)
        throw std::invalid_argument("expected " + std::to_string(n) + " starting prices, got " +
                                    std::to_string(req.start.size()));
    if (req.freeze.size() > n)
        throw std::invalid_argument("more frozen prices than players");
    GameConfig config = c.game;
    config.mode = req.mode;
    if (req.max_rounds) {
        if (*req.max_rounds < 1)
            throw std::invalid_argument("max rounds must be positive");
        config.max_rounds = *req.max_rounds;
    }
    std::vector<double> start = req.start;
    std::vector<bool> frozen(n, false);
    for (std::size_t g = 0; g < req.freeze.size(); ++g) {
        if (req.freeze[g]) {
            start[g] = *req.freeze[g];
            frozen[g] = true;
        }
    }
    return run_game(start, c.network, c.market, config, frozen, backend);
}

void write_opf_text(std::ostream& out, const CaseFile& c, const OpfReport& r)
{
    const PowerNetwork& net = c.network;
    out << "case " << c.name << "\n";
    out << "clearing price " << format_number(r.clearing_price);
    if (r.demand_overridden)
        out << " (demand overridden)";
    else
        out << " after " << r.clearing_iterations << " iteration(s)";
    out << "\n";
    out << "total demand " << format_number(r.total_demand) << " MW, total supply "
        << format_number(r.dispatch.total_supply()) << " MW, dispatch cost " << format_number(r.dispatch.dispatch_cost)
        << "\n";
    out << "generators\n";
    for (std::size_t g = 0; g < net.num_generators(); ++g)
        out << "  " << g + 1 << " bus " << net.generators[g].bus << " price " << format_number(r.prices[g])
            << " supply " << format_number(r.dispatch.supplies[g]) << " MW\n";
    out << "loads\n";
    for (std::size_t l = 0; l < net.num_loads(); ++l)
        out << "  " << l + 1 << " bus " << net.loads[l].bus << " demand " << format_number(r.dispatch.demands[l])
            << " MW\n";
    out << "branches, P(from,to) = (theta_to - theta_from) / x\n";
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& br = net.branches[k];
        out << "  " << br.from_bus << "-" << br.to_bus << " flow " << format_number(r.dispatch.branch_flows[k])
            << " MW, capacity "
            << (std::isfinite(br.capacity) ? format_number(br.capacity) + " MW" : std::string("unbounded")) << "\n";
    }
    out << "angles\n";
    for (std::size_t b = 0; b < r.dispatch.angles.size(); ++b)
        out << "  " << b << " " << format_number(r.dispatch.angles[b]) << "\n";
}

void write_opf_json(std::ostream& out, const CaseFile& c, const OpfReport& r)
{
    json doc;
    doc["case"] = c.name;
    doc["prices"] = shown_array(r.prices);
    doc["clearing_price"] = shown(r.clearing_price);
    doc["total_demand"] = shown(r.total_demand);
    doc["demand_overridden"] = r.demand_overridden;
    doc["clearing_iterations"] = r.clearing_iterations;
    doc["supplies"] = shown_array(r.dispatch.supplies);
    doc["demands"] = shown_array(r.dispatch.demands);
    doc["angles"] = shown_array(r.dispatch.angles);
    json flows = json::array();
    for (std::size_t k = 0; k < c.network.branches.size(); ++k)
        flows.push_back({{"from", c.network.branches[k].from_bus},
                         {"to", c.network.branches[k].to_bus},
                         {"flow", shown(r.dispatch.branch_flows[k])}});
    doc["branch_flows"] = flows;
    doc["dispatch_cost"] = shown(r.dispatch.dispatch_cost);
    out << doc.dump(2) << "\n";
}

void write_trajectory_csv(std::ostream& out, const GameResult& result)
{
    const auto& rounds = result.trajectory.rounds;
    const std::size_t n = rounds.empty() ? result.trajectory.frozen.size() : rounds.front().prices.size();
    std::vector<std::string> header{"round"};
    for (const char* prefix : {"p_", "S_"})
        for (std::size_t g = 0; g < n; ++g)
            header.push_back(prefix + std::to_string(g + 1));
    header.push_back("P");
    header.push_back("D");
    for (std::size_t g = 0; g < n; ++g)
        header.push_back("u_" + std::to_string(g + 1));
    csv_row(out, header);

    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const RoundRecord& rec = rounds[r];
        std::vector<std::string> row{std::to_string(r)};
        for (double p : rec.prices)
            row.push_back(format_number(p));
        for (double s : rec.clearing.dispatch.supplies)
            row.push_back(format_number(s));
        row.push_back(format_number(rec.clearing.clearing_price));
        row.push_back(format_number(rec.clearing.total_demand));
        for (double u : rec.utilities)
            row.push_back(format_number(u));
        csv_row(out, row);
    }
}

void write_summary_json(std::ostream& out, const GameResult& result, const GameConfig& config)
{
    const Classification& c = result.classification;
    json doc;
    doc["label"] = to_string(c.label);
    doc["rounds_used"] = c.rounds_used;
    doc["mode"] = to_string(config.mode);
    doc["update_order"] = to_string(config.update_order);
    json frozen = json::array();
    for (bool f : result.trajectory.frozen)
        frozen.push_back(f);
    doc["frozen"] = frozen;
    if (!result.trajectory.rounds.empty()) {
        doc["initial_prices"] = shown_array(result.trajectory.rounds.front().prices);
        doc["final_prices"] = shown_array(result.trajectory.rounds.back().prices);
    }
    if (!c.fixed_point_prices.empty())
        doc["fixed_point_prices"] = shown_array(c.fixed_point_prices);
    if (c.label == Label::limit_cycle) {
        doc["cycle_period"] = c.cycle_period;
        json pts = json::array();
        for (const auto& p : c.cycle_points)
            pts.push_back(shown_array(p));
        doc["cycle_points"] = pts;
    }
    if (!c.cause.empty())
        doc["cause"] = c.cause;
    out << doc.dump(2) << "\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells)
{
    const std::size_t n = cells.empty() ? 0 : cells.front().start.size();
    std::vector<std::string> header;
    for (std::size_t g = 0; g < n; ++g)
        header.push_back("start_" + std::to_string(g + 1));
    header.insert(header.end(), {"label", "rounds_used", "cycle_period"});
    for (std::size_t g = 0; g < n; ++g)
        header.push_back("end_" + std::to_string(g + 1));
    header.insert(header.end(), {"cycle", "error"});
    csv_row(out, header);

    for (const SweepCell& cell : cells) {
        const Classification& c = cell.classification;
        std::vector<std::string> row;
        for (double p : cell.start)
            row.push_back(format_number(p));
        row.push_back(to_string(c.label));
        row.push_back(std::to_string(c.rounds_used));
        row.push_back(c.label == Label::limit_cycle ? std::to_string(c.cycle_period) : "");
        for (std::size_t g = 0; g < n; ++g)
            row.push_back(g < cell.terminal.size() ? format_number(cell.terminal[g]) : "");
        std::string cycle;
        for (std::size_t i = 0; i < c.cycle_points.size(); ++i) {
            if (i > 0)
                cycle += '/';
            cycle += join_prices(c.cycle_points[i], ' ');
        }
        row.push_back(cycle);
        row.push_back(csv_text(!cell.error.empty() ? cell.error : c.cause));
        csv_row(out, row);
    }
}

void write_quiver_csv(std::ostream& out, const std::vector<QuiverNode>& nodes)
{
    csv_row(out, {"p1", "p2", "dp1", "dp2"});
    for (const QuiverNode& q : nodes) {
        const double nan = std::nan("");
        csv_row(out, {format_number(q.p1), format_number(q.p2), format_number(q.ok ? q.dp1 : nan),
                      format_number(q.ok ? q.dp2 : nan)});
    }
}

}  // namespace bidgame
