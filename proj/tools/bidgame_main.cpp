// Command-line driver: validate, opf, run, sweep, quiver.
//
// Exit codes: 0 success, 1 validation or parse error, 2 infeasible or
// degenerate market, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "bidgame/case_file.hpp"
#include "bidgame/experiments.hpp"

using namespace bidgame;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kMarketError = 2;
constexpr int kInternalError = 3;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        out.push_back(item);
    return out;
}

double to_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw UsageError("bad number '" + s + "' in " + what);
    return v;
}

std::vector<double> number_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        out.push_back(to_number(item, what));
    return out;
}

// "i=v,..." with 1-based player indices.
std::vector<std::optional<double>> assignments(const std::string& s, std::size_t players, const std::string& what)
{
    std::vector<std::optional<double>> out(players);
    if (s.empty())
        return out;
    for (const auto& item : split(s, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError(what + " entries must look like i=price, got '" + item + "'");
        const double idx = to_number(item.substr(0, eq), what);
        if (idx < 1 || idx > static_cast<double>(players) || idx != static_cast<double>(static_cast<long>(idx)))
            throw UsageError(what + ": player index must be 1.." + std::to_string(players));
        out[static_cast<std::size_t>(idx) - 1] = to_number(item.substr(eq + 1), what);
    }
    return out;
}

PlayMode mode_of(const std::string& s)
{
    if (s == "best" || s == "best_response")
        return PlayMode::best_response;
    if (s == "better" || s == "better_response")
        return PlayMode::better_response;
    throw UsageError("--mode must be best or better");
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void apply_order(CaseFile& c, const std::string& order)
{
    if (order.empty())
        return;
    if (order == "simultaneous")
        c.game.update_order = UpdateOrder::simultaneous;
    else if (order == "sequential")
        c.game.update_order = UpdateOrder::sequential;
    else
        throw UsageError("--order must be simultaneous or sequential");
}

struct Options {
    std::string case_path;
    std::string prices;
    std::optional<double> demand;
    bool json = false;
    std::string start;
    std::string mode = "best";
    std::string freeze;
    std::optional<int> max_rounds;
    std::string out;
    std::string grid;
    std::string order;
    int jobs = 0;
    std::string free;
    std::string frozen;
};

int cmd_validate(const Options& o)
{
    const CaseFile c = load_case(o.case_path);
    std::cout << c.name << ": ok (" << c.network.num_buses() << " buses, " << c.network.branches.size()
              << " branches, " << c.network.num_generators() << " generators, " << c.network.num_loads()
              << " loads; total effective capacity " << format_number(total_effective_capacity(c.network))
              << " MW)\n";
    return kOk;
}

int cmd_opf_main(const Options& o)
{
    const CaseFile c = load_case(o.case_path);
    const std::vector<double> prices = number_list(o.prices, "--prices");
    const OpfReport r = cmd_opf(c, prices, o.demand);
    if (o.json)
        write_opf_json(std::cout, c, r);
    else
        write_opf_text(std::cout, c, r);
    return kOk;
}

int cmd_run_main(const Options& o)
{
    CaseFile c = load_case(o.case_path);
    apply_order(c, o.order);
    RunRequest req;
    req.start = number_list(o.start, "--start");
    req.mode = mode_of(o.mode);
    req.freeze = assignments(o.freeze, c.network.num_generators(), "--freeze");
    req.max_rounds = o.max_rounds;
    GameConfig config = c.game;
    config.mode = req.mode;

    const GameResult result = cmd_run(c, req, o.jobs == 1 ? Backend::serial : Backend::openmp);
    const std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
    std::filesystem::create_directories(dir);
    {
        std::ofstream f = open_output(dir / "trajectory.csv");
        write_trajectory_csv(f, result);
    }
    {
        std::ofstream f = open_output(dir / "summary.json");
        write_summary_json(f, result, config);
    }
    write_summary_json(std::cout, result, config);
    return result.classification.cause.empty() ? kOk : kMarketError;
}

int cmd_sweep_main(const Options& o)
{
    CaseFile c = load_case(o.case_path);
    apply_order(c, o.order);
    const std::size_t n = c.network.num_generators();
    SweepSpec spec;
    spec.mode = mode_of(o.mode);
    spec.frozen = assignments(o.freeze, n, "--freeze");
    spec.max_rounds = o.max_rounds;
    const std::vector<std::string> parts = split(o.grid, ',');
    if (parts.size() == 1) {
        spec.axes.assign(n, parse_axis(parts[0]));
    } else if (parts.size() == n) {
        for (const auto& p : parts)
            spec.axes.push_back(parse_axis(p));
    } else {
        throw UsageError("--grid needs one lo:hi:step for all players or one per player");
    }
    const std::vector<SweepCell> cells = sweep(c, spec, o.jobs == 1 ? Backend::serial : Backend::openmp);
    if (o.out.empty()) {
        write_sweep_csv(std::cout, cells);
    } else {
        std::ofstream f = open_output(o.out);
        write_sweep_csv(f, cells);
    }
    return kOk;
}

int cmd_quiver_main(const Options& o)
{
    CaseFile c = load_case(o.case_path);
    const std::size_t n = c.network.num_generators();
    const std::vector<double> free = number_list(o.free, "--free");
    if (free.size() != 2)
        throw UsageError("--free needs exactly two player indices");
    std::size_t idx[2];
    for (int i = 0; i < 2; ++i) {
        if (free[i] < 1 || free[i] > static_cast<double>(n) || free[i] != static_cast<double>(static_cast<long>(free[i])))
            throw UsageError("--free: player index must be 1.." + std::to_string(n));
        idx[i] = static_cast<std::size_t>(free[i]) - 1;
    }
    const std::vector<std::optional<double>> frozen = assignments(o.frozen, n, "--frozen");
    std::vector<double> base(n, 0.0);
    for (std::size_t g = 0; g < n; ++g) {
        if (g == idx[0] || g == idx[1])
            continue;
        if (!frozen[g])
            throw UsageError("--frozen must give a price for player " + std::to_string(g + 1));
        base[g] = *frozen[g];
    }
    const std::vector<std::string> parts = split(o.grid, ',');
    if (parts.empty() || parts.size() > 2)
        throw UsageError("--grid needs lo:hi:step, optionally twice");
    const GridAxis a1 = parse_axis(parts[0]);
    const GridAxis a2 = parse_axis(parts.size() == 2 ? parts[1] : parts[0]);
    const QuiverGrid grid{a1.lo, a1.hi, a1.step, a2.lo, a2.hi, a2.step};
    const std::vector<QuiverNode> nodes = quiver_field(grid, base, idx[0], idx[1], c.network, c.market, c.game,
                                                         o.jobs == 1 ? Backend::serial : Backend::openmp);
    std::size_t gaps = 0;
    for (const auto& q : nodes)
        gaps += q.ok ? 0 : 1;
    if (o.out.empty()) {
        write_quiver_csv(std::cout, nodes);
    } else {
        std::ofstream f = open_output(o.out);
        write_quiver_csv(f, nodes);
    }
    if (gaps > 0)
        std::cerr << gaps << " of " << nodes.size() << " nodes could not be evaluated\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generator bidding game on a DC power network"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--jobs", o.jobs, "OpenMP threads (1 runs the serial kernels)")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Load and validate a case file");
    validate->add_option("case", o.case_path, "Case file")->required();

    auto* opf = app.add_subcommand("opf", "Dispatch at fixed prices");
    opf->add_option("case", o.case_path, "Case file")->required();
    opf->add_option("--prices", o.prices, "Comma-separated price per generator")->required();
    opf->add_option("--demand", o.demand, "Total demand in MW instead of the clearing fixed point");
    opf->add_flag("--json", o.json, "Machine-readable output");

    auto* run = app.add_subcommand("run", "Play the game from one starting point");
    run->add_option("case", o.case_path, "Case file")->required();
    run->add_option("--start", o.start, "Comma-separated starting prices")->required();
    run->add_option("--mode", o.mode, "best or better");
    run->add_option("--freeze", o.freeze, "Frozen players as i=price,... (1-based)");
    run->add_option("--max-rounds", o.max_rounds, "Round limit");
    run->add_option("--order", o.order, "simultaneous or sequential");
    run->add_option("--out", o.out, "Output directory for trajectory.csv and summary.json");

    auto* sweep_cmd = app.add_subcommand("sweep", "Play the game from every point of a start grid");
    sweep_cmd->add_option("case", o.case_path, "Case file")->required();
    sweep_cmd->add_option("--grid", o.grid, "lo:hi:step for all players, or one per player")->required();
    sweep_cmd->add_option("--mode", o.mode, "best or better");
    sweep_cmd->add_option("--freeze", o.freeze, "Frozen players as i=price,... (1-based)");
    sweep_cmd->add_option("--max-rounds", o.max_rounds, "Round limit per run");
    sweep_cmd->add_option("--order", o.order, "simultaneous or sequential");
    sweep_cmd->add_option("--jobs", o.jobs, "OpenMP threads (1 runs the serial kernels)")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", o.out, "Output CSV (default stdout)");

    auto* quiver = app.add_subcommand("quiver", "Better-response displacement field over two players");
    quiver->add_option("case", o.case_path, "Case file")->required();
    quiver->add_option("--free", o.free, "The two moving players, i,j (1-based)")->required();
    quiver->add_option("--frozen", o.frozen, "Prices of the other players as k=price,...");
    quiver->add_option("--grid", o.grid, "lo:hi:step, or one per free player")->required();
    quiver->add_option("--out", o.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }
    if (o.jobs > 0)
        omp_set_num_threads(o.jobs);

    try {
        if (*validate)
            return cmd_validate(o);
        if (*opf)
            return cmd_opf_main(o);
        if (*run)
            return cmd_run_main(o);
        if (*sweep_cmd)
            return cmd_sweep_main(o);
        if (*quiver)
            return cmd_quiver_main(o);
    } catch (const CaseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const InfeasibleDispatch& e) {
        std::cerr << "infeasible: total demand " << format_number(e.total_demand())
                  << " MW exceeds what the network can deliver; total effective capacity "
                  << format_number(e.total_capacity()) << " MW\n";
        return kMarketError;
    } catch (const DegenerateMarket& e) {
        std::cerr << "degenerate market: " << e.what() << "\n";
        return kMarketError;
    } catch (const EvaluationFailure& e) {
        std::cerr << "market did not settle: " << e.what() << "\n";
        return kMarketError;
    } catch (const NoProfitableAllocation& e) {
        std::cerr << "market error: " << e.what() << "\n";
        return kMarketError;
    } catch (const MarketDomainError& e) {
        std::cerr << "market error: " << e.what() << "\n";
        return kMarketError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}
