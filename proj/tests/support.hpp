#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "bidgame/case_file.hpp"
#include "bidgame/dcopf.hpp"
#include "bidgame/lp.hpp"
#include "bidgame/network.hpp"

namespace testing {

inline std::filesystem::path case9_path()
{
    return std::filesystem::path(BIDGAME_DATA_DIR) / "case9.json";
}

inline const bidgame::CaseFile& case9()
{
    static const bidgame::CaseFile c = bidgame::load_case(case9_path());
    return c;
}

/// Random feasible LP: rows are built around a point inside the box, so the
/// program always has a vertex and a finite optimum.
inline bidgame::lp::LinearProgram random_lp(std::mt19937_64& rng, std::size_t vars, std::size_t rows)
{
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> small(-3, 3);
    bidgame::lp::LinearProgram lp;
    std::vector<double> inside(vars);
    for (std::size_t j = 0; j < vars; ++j) {
        const double lo = std::floor(coef(rng));
        const double hi = lo + 1.0 + std::floor(4.0 * unit(rng));
        // Integer costs make cost ties common, which exercises degeneracy.
        lp.add_var(unit(rng) < 0.5 ? small(rng) : coef(rng), lo, hi);
        inside[j] = lo + (hi - lo) * unit(rng);
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t row = lp.add_row(0.0);
        double rhs = 0.0;
        for (std::size_t j = 0; j < vars; ++j) {
            const double a = unit(rng) < 0.3 ? 0.0 : static_cast<double>(small(rng));
            lp.constraint_matrix(row, j) = a;
            rhs += a * inside[j];
        }
        lp.constraint_rhs[row] = rhs;
    }
    return lp;
}

/// Two buses, generator at 0, load at 1.
inline bidgame::PowerNetwork two_bus(double capacity = bidgame::kUnbounded)
{
    using namespace bidgame;
    PowerNetwork n;
    n.buses = {{0, BusKind::generator}, {1, BusKind::load}};
    n.branches = {{0, 1, 0.1, capacity}};
    n.generators = {{0, 0.0, 1000.0, 0.01}};
    n.loads = {{1, 1.0}};
    return n;
}

/// Triangle: generators at buses 0 and 1, load at bus 2.
inline bidgame::PowerNetwork triangle(double s_max_a = 100.0, double s_max_b = 100.0,
                                      double capacity = bidgame::kUnbounded)
{
    using namespace bidgame;
    PowerNetwork n;
    n.buses = {{0, BusKind::generator}, {1, BusKind::generator}, {2, BusKind::load}};
    n.branches = {{0, 1, 0.1, capacity}, {1, 2, 0.1, capacity}, {0, 2, 0.1, capacity}};
    n.generators = {{0, 0.0, s_max_a, 0.01}, {1, 0.0, s_max_b, 0.01}};
    n.loads = {{2, 1.0}};
    return n;
}

/// Random connected network: a spanning path plus extra chords. Every bus
/// carries a generator or a load (at least one of each).
inline bidgame::PowerNetwork random_network(std::mt19937_64& rng, std::size_t buses, bool limited)
{
    using namespace bidgame;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PowerNetwork n;
    std::vector<std::size_t> order(buses);
    for (std::size_t b = 0; b < buses; ++b)
        order[b] = b;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < buses; ++b)
        n.buses.push_back({static_cast<int>(b), BusKind::junction});
    auto add_branch = [&](std::size_t i, std::size_t j) {
        for (const Branch& br : n.branches)
            if ((br.from_bus == static_cast<int>(i) && br.to_bus == static_cast<int>(j)) ||
                (br.from_bus == static_cast<int>(j) && br.to_bus == static_cast<int>(i)))
                return;
        const double cap = limited && unit(rng) < 0.5 ? 20.0 + 80.0 * unit(rng) : kUnbounded;
        n.branches.push_back({static_cast<int>(i), static_cast<int>(j), 0.05 + 0.2 * unit(rng), cap});
    };
    for (std::size_t b = 1; b < buses; ++b)
        add_branch(order[b - 1], order[b]);
    for (std::size_t extra = 0; extra < buses / 2; ++extra) {
        const std::size_t i = rng() % buses, j = rng() % buses;
        if (i != j)
            add_branch(i, j);
    }
    for (std::size_t b = 0; b < buses; ++b) {
        const bool gen = b == 0 || (b != 1 && unit(rng) < 0.5);
        n.buses[b].kind = gen ? BusKind::generator : BusKind::load;
        if (gen)
            n.generators.push_back({static_cast<int>(b), 5.0 * unit(rng), 50.0 + 100.0 * unit(rng), 0.01});
        else
            n.loads.push_back({static_cast<int>(b), 0.0});
    }
    double total = 0.0;
    std::vector<double> w(n.loads.size());
    for (double& x : w)
        total += (x = 0.2 + unit(rng));
    double used = 0.0;
    for (std::size_t l = 0; l + 1 < n.loads.size(); ++l)
        used += (n.loads[l].share = w[l] / total);
    n.loads.back().share = 1.0 - used;
    return n;
}

/// Largest |generation - load - net outflow| over buses.
inline double nodal_residual(const bidgame::PowerNetwork& net, const bidgame::DispatchSolution& s)
{
    std::vector<double> balance(net.num_buses(), 0.0);
    for (std::size_t g = 0; g < net.num_generators(); ++g)
        balance[net.generators[g].bus] += s.supplies[g];
    for (std::size_t l = 0; l < net.num_loads(); ++l)
        balance[net.loads[l].bus] -= s.demands[l];
    // P(from,to) is the power flowing from `to` into `from`.
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        balance[net.branches[k].from_bus] += s.branch_flows[k];
        balance[net.branches[k].to_bus] -= s.branch_flows[k];
    }
    double worst = 0.0;
    for (double b : balance)
        worst = std::max(worst, std::abs(b));
    return worst;
}

/// Largest supplier-limit or branch-limit violation, 0 when within limits.
inline double limit_violation(const bidgame::PowerNetwork& net, const bidgame::DispatchSolution& s)
{
    double worst = 0.0;
    for (std::size_t g = 0; g < net.num_generators(); ++g) {
        worst = std::max(worst, net.generators[g].s_min - s.supplies[g]);
        worst = std::max(worst, s.supplies[g] - net.generators[g].s_max);
    }
    for (std::size_t k = 0; k < net.branches.size(); ++k)
        worst = std::max(worst, std::abs(s.branch_flows[k]) - net.branches[k].capacity);
    return worst;
}

}  // namespace testing
