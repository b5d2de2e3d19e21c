#include "bidgame/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <utility>

namespace bidgame {

const char* to_string(BusKind k) noexcept
{
    switch (k) {
    case BusKind::generator: return "generator";
    case BusKind::load: return "load";
    case BusKind::junction: return "junction";
    }
    return "unknown";
}

std::vector<std::string> validate(const PowerNetwork& net)
{
    std::vector<std::string> out;
    const int nb = static_cast<int>(net.buses.size());
    auto bus_ok = [nb](int id) { return id >= 0 && id < nb; };

    if (net.buses.empty())
        out.emplace_back("network has no buses");
    for (int i = 0; i < nb; ++i)
        if (net.buses[static_cast<std::size_t>(i)].id != i)
            out.push_back("bus at position " + std::to_string(i) + " has id " +
                          std::to_string(net.buses[static_cast<std::size_t>(i)].id) +
                          "; ids must be unique and contiguous from 0");

    std::set<std::pair<int, int>> pairs;
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& br = net.branches[k];
        const std::string name = "branch " + std::to_string(k);
        if (!bus_ok(br.from_bus) || !bus_ok(br.to_bus)) {
            out.push_back(name + " references a missing bus");
            continue;
        }
        if (br.from_bus == br.to_bus)
            out.push_back(name + " connects bus " + std::to_string(br.from_bus) + " to itself");
        if (!(br.reactance > 0.0) || !std::isfinite(br.reactance))
            out.push_back(name + " reactance must be positive and finite");
        if (!(br.capacity > 0.0))
            out.push_back(name + " capacity must be positive or unbounded");
        const auto key = std::minmax(br.from_bus, br.to_bus);
        if (!pairs.insert({key.first, key.second}).second)
            out.push_back(name + " duplicates the bus pair (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ")");
    }

    std::vector<int> gens_at(static_cast<std::size_t>(std::max(nb, 0)), 0);
    std::vector<int> loads_at(gens_at.size(), 0);
    if (net.generators.empty())
        out.emplace_back("network has no generators");
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
        const Generator& gen = net.generators[g];
        const std::string name = "generator " + std::to_string(g);
        if (!bus_ok(gen.bus)) {
            out.push_back(name + " references a missing bus");
        } else {
            if (net.buses[static_cast<std::size_t>(gen.bus)].kind != BusKind::generator)
                out.push_back(name + " sits on bus " + std::to_string(gen.bus) + " which is not a generator bus");
            if (++gens_at[static_cast<std::size_t>(gen.bus)] > 1)
                out.push_back(name + " shares bus " + std::to_string(gen.bus) + " with another generator");
        }
        if (!(gen.s_min >= 0.0) || !(gen.s_min <= gen.s_max) || !std::isfinite(gen.s_max))
            out.push_back(name + " limits must satisfy 0 <= s_min <= s_max < inf");
        if (!(gen.cost_coeff > 0.0) || !std::isfinite(gen.cost_coeff))
            out.push_back(name + " cost_coeff must be positive");
    }

    if (net.loads.empty())
        out.emplace_back("network has no loads");
    double share_sum = 0.0;
    for (std::size_t l = 0; l < net.loads.size(); ++l) {
        const Load& ld = net.loads[l];
        const std::string name = "load " + std::to_string(l);
        if (!bus_ok(ld.bus)) {
            out.push_back(name + " references a missing bus");
        } else {
            if (net.buses[static_cast<std::size_t>(ld.bus)].kind != BusKind::load)
                out.push_back(name + " sits on bus " + std::to_string(ld.bus) + " which is not a load bus");
            if (++loads_at[static_cast<std::size_t>(ld.bus)] > 1)
                out.push_back(name + " shares bus " + std::to_string(ld.bus) + " with another load");
        }
        if (!(ld.share > 0.0 && ld.share <= 1.0))
            out.push_back(name + " share must lie in (0, 1]");
        share_sum += ld.share;
    }
    if (!net.loads.empty() && std::abs(share_sum - 1.0) > 1e-12)
        out.push_back("load shares sum to " + std::to_string(share_sum) + ", expected 1");

    for (int b = 0; b < nb; ++b) {
        const auto kind = net.buses[static_cast<std::size_t>(b)].kind;
        if (kind == BusKind::generator && gens_at[static_cast<std::size_t>(b)] == 0)
            out.push_back("bus " + std::to_string(b) + " is a generator bus without a generator");
        if (kind == BusKind::load && loads_at[static_cast<std::size_t>(b)] == 0)
            out.push_back("bus " + std::to_string(b) + " is a load bus without a load");
    }

    if (nb > 0) {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(nb));
        for (const Branch& br : net.branches)
            if (bus_ok(br.from_bus) && bus_ok(br.to_bus)) {
                adj[static_cast<std::size_t>(br.from_bus)].push_back(br.to_bus);
                adj[static_cast<std::size_t>(br.to_bus)].push_back(br.from_bus);
            }
        std::vector<char> seen(static_cast<std::size_t>(nb), 0);
        std::queue<int> todo;
        todo.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!todo.empty()) {
            const int b = todo.front();
            todo.pop();
            for (int nbh : adj[static_cast<std::size_t>(b)])
                if (!seen[static_cast<std::size_t>(nbh)]) {
                    seen[static_cast<std::size_t>(nbh)] = 1;
                    ++reached;
                    todo.push(nbh);
                }
        }
        if (reached != nb) {
            std::string missing;
            for (int b = 0; b < nb; ++b)
                if (!seen[static_cast<std::size_t>(b)])
                    missing += (missing.empty() ? "" : ",") + std::to_string(b);
            out.push_back("network is not connected; unreachable from bus 0: " + missing);
        }
    }
    return out;
}

void require_valid(const PowerNetwork& network)
{
    const auto problems = validate(network);
    if (problems.empty())
        return;
    std::string msg = "invalid network:";
    for (const auto& p : problems)
        msg += "\n  - " + p;
    throw NetworkError(msg);
}

double effective_capacity(const PowerNetwork& network, std::size_t g)
{
    if (g >= network.generators.size())
        throw std::out_of_range("generator index " + std::to_string(g) + " out of range");
    const Generator& gen = network.generators[g];
    double incident = 0.0;
    for (const Branch& br : network.branches)
        if (br.from_bus == gen.bus || br.to_bus == gen.bus)
            incident += br.capacity;
    return std::min(gen.s_max, incident);
}

double total_effective_capacity(const PowerNetwork& network)
{
    double sum = 0.0;
    for (std::size_t g = 0; g < network.generators.size(); ++g)
        sum += effective_capacity(network, g);
    return sum;
}

}  // namespace bidgame
