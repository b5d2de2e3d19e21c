#include "bidgame/case_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bidgame {

namespace {

using nlohmann::json;

// Walks a JSON object while remembering where it is, so every error names
// the exact field.
class Reader {
public:
    Reader(const json& node, std::string path, const std::string& source)
        : node_(node), path_(std::move(path)), source_(source)
    {
        if (!node_.is_object())
            fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw CaseError(source_ + ": " + (path_.empty() ? "<root>" : path_) + ": " + what);
    }

    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& at(const std::string& key)
    {
        seen_.insert(key);
        if (!node_.contains(key))
            throw CaseError(source_ + ": " + child_path(key) + ": missing required field");
        return node_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_number())
            throw CaseError(source_ + ": " + child_path(key) + ": expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_number_integer())
            throw CaseError(source_ + ": " + child_path(key) + ": expected an integer");
        return v.get<int>();
    }

    int integer_or(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    std::string text(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_string())
            throw CaseError(source_ + ": " + child_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    // Capacity: a positive number or the string "unbounded".
    double capacity(const std::string& key)
    {
        if (!has(key)) {
            seen_.insert(key);
            return kUnbounded;
        }
        const json& v = at(key);
        if (v.is_string() && v.get<std::string>() == "unbounded")
            return kUnbounded;
        if (!v.is_number())
            throw CaseError(source_ + ": " + child_path(key) + ": expected a number or \"unbounded\"");
        return v.get<double>();
    }

    const json& array(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_array())
            throw CaseError(source_ + ": " + child_path(key) + ": expected an array");
        return v;
    }

    Reader object(const std::string& key) { return Reader(at(key), child_path(key), source_); }

    void finish() const
    {
        for (const auto& item : node_.items())
            if (!seen_.count(item.key()))
                throw CaseError(source_ + ": " + child_path(item.key()) + ": unknown key");
    }

private:
    const json& node_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> seen_;
};

BusKind parse_kind(const std::string& s, const Reader& r)
{
    if (s == "generator")
        return BusKind::generator;
    if (s == "load")
        return BusKind::load;
    if (s == "junction")
        return BusKind::junction;
    r.fail("bus kind must be generator, load or junction");
}

PlayMode parse_mode(const std::string& s, const Reader& r)
{
    if (s == "best_response" || s == "best")
        return PlayMode::best_response;
    if (s == "better_response" || s == "better")
        return PlayMode::better_response;
    r.fail("mode must be best_response or better_response");
}

UpdateOrder parse_order(const std::string& s, const Reader& r)
{
    if (s == "simultaneous")
        return UpdateOrder::simultaneous;
    if (s == "sequential")
        return UpdateOrder::sequential;
    r.fail("update_order must be simultaneous or sequential");
}

std::size_t line_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

json capacity_json(double c)
{
    if (std::isinf(c))
        return "unbounded";
    return c;
}

}  // namespace

CaseFile parse_case(std::string_view text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw CaseError(source + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }

    CaseFile c;
    Reader root(doc, "", source);
    c.name = root.text("name");
    if (root.has("provenance")) {
        const json& prov = root.array("provenance");
        for (std::size_t i = 0; i < prov.size(); ++i) {
            if (!prov[i].is_string())
                throw CaseError(source + ": provenance[" + std::to_string(i) + "]: expected a string");
            c.provenance.push_back(prov[i].get<std::string>());
        }
    }

    {
        Reader net = root.object("network");
        const json& buses = net.array("buses");
        for (std::size_t i = 0; i < buses.size(); ++i) {
            Reader b(buses[i], "network.buses[" + std::to_string(i) + "]", source);
            Bus bus;
            bus.id = b.integer("id");
            bus.kind = parse_kind(b.text("kind"), b);
            b.finish();
            c.network.buses.push_back(bus);
        }
        const json& branches = net.array("branches");
        for (std::size_t i = 0; i < branches.size(); ++i) {
            Reader b(branches[i], "network.branches[" + std::to_string(i) + "]", source);
            Branch br;
            br.from_bus = b.integer("from");
            br.to_bus = b.integer("to");
            br.reactance = b.number("reactance");
            br.capacity = b.capacity("capacity");
            b.finish();
            c.network.branches.push_back(br);
        }
        const json& gens = net.array("generators");
        for (std::size_t i = 0; i < gens.size(); ++i) {
            Reader g(gens[i], "network.generators[" + std::to_string(i) + "]", source);
            Generator gen;
            gen.bus = g.integer("bus");
            gen.s_min = g.number("s_min");
            gen.s_max = g.number("s_max");
            gen.cost_coeff = g.number("cost_coeff");
            g.finish();
            c.network.generators.push_back(gen);
        }
        const json& loads = net.array("loads");
        for (std::size_t i = 0; i < loads.size(); ++i) {
            Reader l(loads[i], "network.loads[" + std::to_string(i) + "]", source);
            Load ld;
            ld.bus = l.integer("bus");
            ld.share = l.number("share");
            l.finish();
            c.network.loads.push_back(ld);
        }
        net.finish();
    }

    {
        Reader m = root.object("market");
        c.market.d_max = m.number("d_max");
        c.market.d_min = m.number("d_min");
        c.market.p_max = m.number("p_max");
        c.market.clearing_tol = m.number_or("clearing_tol", c.market.clearing_tol);
        c.market.clearing_max_iters = m.integer_or("clearing_max_iters", c.market.clearing_max_iters);
        m.finish();
    }

    if (root.has("game")) {
        Reader g = root.object("game");
        GameConfig& cfg = c.game;
        if (g.has("mode"))
            cfg.mode = parse_mode(g.text("mode"), g);
        cfg.price_lower = g.number_or("price_lower", cfg.price_lower);
        cfg.price_upper = g.number_or("price_upper", cfg.price_upper);
        cfg.br_grid_step = g.number_or("br_grid_step", cfg.br_grid_step);
        cfg.deriv_eps = g.number_or("deriv_eps", cfg.deriv_eps);
        cfg.zeta_fraction = g.number_or("zeta_fraction", cfg.zeta_fraction);
        cfg.zeta_min = g.number_or("zeta_min", 1e-5 * cfg.price_upper);
        cfg.max_rounds = g.integer_or("max_rounds", cfg.max_rounds);
        cfg.convergence_tol = g.number_or("convergence_tol", cfg.convergence_tol);
        cfg.cycle_detect_window = g.integer_or("cycle_detect_window", cfg.cycle_detect_window);
        if (g.has("update_order"))
            cfg.update_order = parse_order(g.text("update_order"), g);
        g.finish();
    }
    root.finish();

    std::vector<std::string> problems = validate(c.network);
    for (auto& p : validate(c.market))
        problems.push_back(std::move(p));
    for (auto& p : validate(c.game))
        problems.push_back(std::move(p));
    if (!problems.empty()) {
        std::string msg = source + ": case failed validation:";
        for (const auto& p : problems)
            msg += "\n  - " + p;
        throw CaseError(msg);
    }
    return c;
}

CaseFile load_case(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CaseError(path.string() + ": cannot open case file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str(), path.string());
}

std::string dump_case(const CaseFile& c)
{
    json doc;
    doc["name"] = c.name;
    doc["provenance"] = c.provenance;

    json buses = json::array();
    for (const Bus& b : c.network.buses)
        buses.push_back({{"id", b.id}, {"kind", to_string(b.kind)}});
    json branches = json::array();
    for (const Branch& br : c.network.branches)
        branches.push_back({{"from", br.from_bus},
                            {"to", br.to_bus},
                            {"reactance", br.reactance},
                            {"capacity", capacity_json(br.capacity)}});
    json gens = json::array();
    for (const Generator& g : c.network.generators)
        gens.push_back({{"bus", g.bus}, {"s_min", g.s_min}, {"s_max", g.s_max}, {"cost_coeff", g.cost_coeff}});
    json loads = json::array();
    for (const Load& l : c.network.loads)
        loads.push_back({{"bus", l.bus}, {"share", l.share}});
    doc["network"] = {{"buses", buses}, {"branches", branches}, {"generators", gens}, {"loads", loads}};

    doc["market"] = {{"d_max", c.market.d_max},
                     {"d_min", c.market.d_min},
                     {"p_max", c.market.p_max},
                     {"clearing_tol", c.market.clearing_tol},
                     {"clearing_max_iters", c.market.clearing_max_iters}};

    const GameConfig& g = c.game;
    doc["game"] = {{"mode", to_string(g.mode)},
                   {"price_lower", g.price_lower},
                   {"price_upper", g.price_upper},
                   {"br_grid_step", g.br_grid_step},
                   {"deriv_eps", g.deriv_eps},
                   {"zeta_fraction", g.zeta_fraction},
                   {"zeta_min", g.zeta_min},
                   {"max_rounds", g.max_rounds},
                   {"convergence_tol", g.convergence_tol},
                   {"cycle_detect_window", g.cycle_detect_window},
                   {"update_order", to_string(g.update_order)}};
    return doc.dump(2) + "\n";
}

}  // namespace bidgame
