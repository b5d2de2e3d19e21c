#include "bidgame/dcopf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bidgame {

namespace {

void check_request(const OpfRequest& req)
{
    const PowerNetwork& net = req.network;
    if (req.prices.size() != net.num_generators())
        throw std::invalid_argument("expected " + std::to_string(net.num_generators()) + " prices, got " +
                                    std::to_string(req.prices.size()));
    if (req.demands.size() != net.num_loads())
        throw std::invalid_argument("expected " + std::to_string(net.num_loads()) + " demands, got " +
                                    std::to_string(req.demands.size()));
    for (double p : req.prices)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("prices must be finite and nonnegative");
    for (double d : req.demands)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw std::invalid_argument("demands must be finite and nonnegative");
}

double face_slack(double value)
{
    return 1e-9 * std::max(1.0, std::abs(value));
}

// Programs over the cost-optimal face of a stage-1 dispatch program. The
// face is the stage-1 program with every nonbasic column whose reduced cost
// is not zero fixed at its bound. Only the generators that can still move
// ("free") take part: stage 2 minimizes the L1 deviation of their supplies
// from `target`; level k then minimizes the sum of the k largest deviations
// with every earlier optimum held fixed, which lexicographically minimizes
// the sorted deviations. Fixed generators only add constants to either.
//
// Columns only ever grow so that each program's basis seeds the next:
//   [stage 1 | d+ (F) | d- (F) | l1 slack | level 1 | level 2 ...]
// with level block j = [t, u (F), s (F), sigma], where u_i >= dev_i - t.
// Columns that have no row yet are fixed at zero.
struct FaceProgram {
    lp::LinearProgram face;
    std::vector<std::size_t> free;  // generator (= supply column) indices
    double target = 0.0;
    double l1_value = 0.0;
    std::vector<double> level_values;  // fixed top-k sums, k = 1, 2, ...

    FaceProgram(const lp::LinearProgram& stage1, const lp::LpSolution& opt, std::size_t ng, double target_)
        : face(stage1), target(target_)
    {
        const double dtol = lp::dual_tolerance(stage1);
        for (std::size_t j = 0; j < stage1.num_vars(); ++j) {
            if (std::abs(opt.reduced_costs[j]) > dtol) {
                face.var_lower[j] = opt.values[j];
                face.var_upper[j] = opt.values[j];
            } else if (j < ng) {
                free.push_back(j);
            }
        }
        face.objective_coeffs.assign(stage1.num_vars(), 0.0);
    }

    std::size_t n() const { return face.num_vars(); }
    std::size_t nf() const { return free.size(); }
    std::size_t d_plus(std::size_t i) const { return n() + i; }
    std::size_t d_minus(std::size_t i) const { return n() + nf() + i; }
    std::size_t l1_slack() const { return n() + 2 * nf(); }
    std::size_t level0(std::size_t j) const { return n() + 2 * nf() + 1 + j * (2 * nf() + 2); }
    std::size_t t(std::size_t j) const { return level0(j); }
    std::size_t u(std::size_t j, std::size_t i) const { return level0(j) + 1 + i; }
    std::size_t s(std::size_t j, std::size_t i) const { return level0(j) + 1 + nf() + i; }
    std::size_t sigma(std::size_t j) const { return level0(j) + 1 + 2 * nf(); }

    // levels == 0: the L1 program. Otherwise level `levels` is the objective
    // and levels 1 .. levels-1 are fixed.
    lp::LinearProgram build(std::size_t levels) const
    {
        lp::LinearProgram lp;
        const std::size_t cols = level0(levels);
        const std::size_t m = face.num_rows();
        std::size_t rows = m + nf();
        if (levels > 0)
            rows += 1 + levels * nf() + (levels - 1);
        lp.objective_coeffs.assign(cols, 0.0);
        lp.var_lower.assign(cols, 0.0);
        lp.var_upper.assign(cols, lp::kInf);
        lp.constraint_matrix = lp::Matrix(rows, cols);
        lp.constraint_rhs.assign(rows, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n(); ++j)
                lp.constraint_matrix(i, j) = face.constraint_matrix(i, j);
        std::copy(face.constraint_rhs.begin(), face.constraint_rhs.end(), lp.constraint_rhs.begin());
        std::copy(face.var_lower.begin(), face.var_lower.end(), lp.var_lower.begin());
        std::copy(face.var_upper.begin(), face.var_upper.end(), lp.var_upper.begin());

        std::size_t row = m;
        for (std::size_t i = 0; i < nf(); ++i, ++row) {
            lp.constraint_matrix(row, free[i]) = 1.0;
            lp.constraint_matrix(row, d_plus(i)) = -1.0;
            lp.constraint_matrix(row, d_minus(i)) = 1.0;
            lp.constraint_rhs[row] = target;
        }

        if (levels == 0) {
            lp.var_upper[l1_slack()] = 0.0;
            for (std::size_t i = 0; i < nf(); ++i) {
                lp.objective_coeffs[d_plus(i)] = 1.0;
                lp.objective_coeffs[d_minus(i)] = 1.0;
            }
            return lp;
        }

        for (std::size_t i = 0; i < nf(); ++i) {
            lp.constraint_matrix(row, d_plus(i)) = 1.0;
            lp.constraint_matrix(row, d_minus(i)) = 1.0;
        }
        lp.constraint_matrix(row, l1_slack()) = 1.0;
        lp.constraint_rhs[row++] = l1_value + face_slack(l1_value);

        for (std::size_t j = 0; j < levels; ++j) {
            const double k = static_cast<double>(j + 1);
            for (std::size_t i = 0; i < nf(); ++i, ++row) {
                lp.constraint_matrix(row, u(j, i)) = 1.0;
                lp.constraint_matrix(row, d_plus(i)) = -1.0;
                lp.constraint_matrix(row, d_minus(i)) = -1.0;
                lp.constraint_matrix(row, t(j)) = 1.0;
                lp.constraint_matrix(row, s(j, i)) = -1.0;
            }
            if (j + 1 < levels) {
                lp.constraint_matrix(row, t(j)) = k;
                for (std::size_t i = 0; i < nf(); ++i)
                    lp.constraint_matrix(row, u(j, i)) = 1.0;
                lp.constraint_matrix(row, sigma(j)) = 1.0;
                lp.constraint_rhs[row++] = level_values[j] + face_slack(level_values[j]);
            } else {
                lp.var_upper[sigma(j)] = 0.0;
                lp.objective_coeffs[t(j)] = k;
                for (std::size_t i = 0; i < nf(); ++i)
                    lp.objective_coeffs[u(j, i)] = 1.0;
            }
        }
        return lp;
    }

    // Basis of the previous program extended by one basic column per new row.
    lp::Basis seed(std::size_t levels, const lp::LpSolution& prev) const
    {
        lp::Basis b = prev.basis;
        if (b.empty())
            return b;
        if (levels == 0) {
            for (std::size_t i = 0; i < nf(); ++i)
                b.columns.push_back(prev.values[free[i]] >= target ? d_plus(i) : d_minus(i));
        } else {
            b.columns.push_back(levels == 1 ? l1_slack() : sigma(levels - 2));
            for (std::size_t i = 0; i < nf(); ++i)
                b.columns.push_back(u(levels - 1, i));
        }
        std::sort(b.columns.begin(), b.columns.end());
        return b;
    }

    double deviation(const lp::LpSolution& sol) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nf(); ++i)
            sum += sol.values[d_plus(i)] + sol.values[d_minus(i)];
        return sum;
    }
};

// Largest and smallest sum coef'S over lo <= S <= hi with sum S = total.
std::pair<double, double> knapsack_range(const std::vector<double>& coef, const PowerNetwork& net, double total)
{
    const std::size_t ng = coef.size();
    std::vector<std::size_t> order(ng);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coef[a] > coef[b]; });
    double base = 0.0;
    double room = total;
    for (std::size_t g = 0; g < ng; ++g) {
        base += coef[g] * net.generators[g].s_min;
        room -= net.generators[g].s_min;
    }
    auto fill = [&](auto first, auto last) {
        double v = base;
        double left = room;
        for (auto it = first; it != last && left > 0.0; ++it) {
            const Generator& gen = net.generators[*it];
            const double add = std::min(left, gen.s_max - gen.s_min);
            v += coef[*it] * add;
            left -= add;
        }
        return v;
    };
    return {fill(order.begin(), order.end()), fill(order.rbegin(), order.rend())};
}

}  // namespace

InfeasibleDispatch::InfeasibleDispatch(double total_demand, double total_capacity)
    : std::runtime_error("dispatch infeasible: total demand " + std::to_string(total_demand) +
                         " MW against total effective capacity " + std::to_string(total_capacity) + " MW"),
      total_demand_(total_demand),
      total_capacity_(total_capacity)
{
}

double DispatchSolution::flow(const PowerNetwork& network, int i, int j) const
{
    for (std::size_t k = 0; k < network.branches.size(); ++k) {
        const Branch& br = network.branches[k];
        if (br.from_bus == i && br.to_bus == j)
            return branch_flows[k];
        if (br.from_bus == j && br.to_bus == i)
            return -branch_flows[k];
    }
    throw std::out_of_range("no branch between buses " + std::to_string(i) + " and " + std::to_string(j));
}

double DispatchSolution::total_supply() const
{
    return std::accumulate(supplies.begin(), supplies.end(), 0.0);
}

double DispatchSolution::total_demand() const
{
    return std::accumulate(demands.begin(), demands.end(), 0.0);
}

OpfLayout opf_layout(const PowerNetwork& network)
{
    OpfLayout lay;
    lay.supply0 = 0;
    lay.angle0 = network.num_generators();
    lay.flow0 = lay.angle0 + network.num_buses();
    lay.columns = lay.flow0 + network.branches.size();
    return lay;
}

lp::LinearProgram build_opf(const OpfRequest& req)
{
    check_request(req);
    const PowerNetwork& net = req.network;
    const OpfLayout lay = opf_layout(net);
    const std::size_t nb = net.num_buses();
    const std::size_t nk = net.branches.size();

    lp::LinearProgram lp;
    lp.objective_coeffs.assign(lay.columns, 0.0);
    lp.var_lower.assign(lay.columns, -lp::kInf);
    lp.var_upper.assign(lay.columns, lp::kInf);
    lp.constraint_matrix = lp::Matrix(nb + nk, lay.columns);
    lp.constraint_rhs.assign(nb + nk, 0.0);

    for (std::size_t g = 0; g < net.num_generators(); ++g) {
        const Generator& gen = net.generators[g];
        const std::size_t col = lay.supply0 + g;
        lp.objective_coeffs[col] = req.prices[g];
        lp.var_lower[col] = gen.s_min;
        lp.var_upper[col] = gen.s_max;
        lp.constraint_matrix(static_cast<std::size_t>(gen.bus), col) = 1.0;
    }
    lp.var_lower[lay.angle0] = 0.0;
    lp.var_upper[lay.angle0] = 0.0;

    // nodal balance: generation - load = net outflow
    //              = sum_{to == b} P_k - sum_{from == b} P_k
    for (std::size_t l = 0; l < net.num_loads(); ++l)
        lp.constraint_rhs[static_cast<std::size_t>(net.loads[l].bus)] += req.demands[l];
    for (std::size_t k = 0; k < nk; ++k) {
        const Branch& br = net.branches[k];
        const std::size_t col = lay.flow0 + k;
        lp.constraint_matrix(static_cast<std::size_t>(br.to_bus), col) -= 1.0;
        lp.constraint_matrix(static_cast<std::size_t>(br.from_bus), col) += 1.0;
        if (std::isfinite(br.capacity)) {
            lp.var_lower[col] = -br.capacity;
            lp.var_upper[col] = br.capacity;
        }
        // x * P_k - (theta_to - theta_from) = 0
        const std::size_t row = nb + k;
        lp.constraint_matrix(row, col) = br.reactance;
        lp.constraint_matrix(row, lay.angle0 + static_cast<std::size_t>(br.to_bus)) = -1.0;
        lp.constraint_matrix(row, lay.angle0 + static_cast<std::size_t>(br.from_bus)) = 1.0;
    }
    return lp;
}

ShiftFactors shift_factors(const PowerNetwork& network)
{
    const std::size_t nb = network.num_buses();
    const std::size_t nk = network.branches.size();
    ShiftFactors f{lp::Matrix(nb, nb), lp::Matrix(nk, nb)};
    if (nb < 2)
        return f;

    // Reduced susceptance matrix without the reference bus, then invert it
    // column by column (Gauss-Jordan on [B | I]).
    const std::size_t r = nb - 1;
    lp::Matrix aug(r, 2 * r);
    for (const Branch& br : network.branches) {
        const double y = 1.0 / br.reactance;
        const auto i = static_cast<std::size_t>(br.from_bus);
        const auto j = static_cast<std::size_t>(br.to_bus);
        if (i > 0)
            aug(i - 1, i - 1) += y;
        if (j > 0)
            aug(j - 1, j - 1) += y;
        if (i > 0 && j > 0) {
            aug(i - 1, j - 1) -= y;
            aug(j - 1, i - 1) -= y;
        }
    }
    for (std::size_t i = 0; i < r; ++i)
        aug(i, r + i) = 1.0;
    for (std::size_t c = 0; c < r; ++c) {
        std::size_t piv = c;
        for (std::size_t k = c + 1; k < r; ++k)
            if (std::abs(aug(k, c)) > std::abs(aug(piv, c)))
                piv = k;
        if (std::abs(aug(piv, c)) < 1e-12)
            throw NetworkError("susceptance matrix is singular; is the network connected?");
        if (piv != c)
            for (std::size_t k = 0; k < 2 * r; ++k)
                std::swap(aug(c, k), aug(piv, k));
        const double inv = 1.0 / aug(c, c);
        for (std::size_t k = 0; k < 2 * r; ++k)
            aug(c, k) *= inv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == c || aug(i, c) == 0.0)
                continue;
            const double m = aug(i, c);
            for (std::size_t k = 0; k < 2 * r; ++k)
                aug(i, k) -= m * aug(c, k);
        }
    }
    for (std::size_t b = 1; b < nb; ++b)
        for (std::size_t i = 1; i < nb; ++i)
            f.angle_of(b, i) = aug(b - 1, r + i - 1);
    for (std::size_t k = 0; k < nk; ++k) {
        const Branch& br = network.branches[k];
        const auto from = static_cast<std::size_t>(br.from_bus);
        const auto to = static_cast<std::size_t>(br.to_bus);
        for (std::size_t i = 0; i < nb; ++i)
            f.flow_of(k, i) = (f.angle_of(to, i) - f.angle_of(from, i)) / br.reactance;
    }
    return f;
}

ReducedOpf build_opf_reduced(const OpfRequest& req, const ShiftFactors& factors)
{
    check_request(req);
    const PowerNetwork& net = req.network;
    const std::size_t ng = net.num_generators();
    const std::size_t nk = net.branches.size();

    double total = 0.0;
    for (double d : req.demands)
        total += d;
    double lo_total = 0.0;
    double hi_total = 0.0;
    for (const Generator& g : net.generators) {
        lo_total += g.s_min;
        hi_total += g.s_max;
    }
    const bool balance_possible = total >= lo_total && total <= hi_total;

    ReducedOpf out;
    std::vector<double> offset(nk, 0.0);
    std::vector<double> coef(ng);
    for (std::size_t k = 0; k < nk; ++k) {
        const Branch& br = net.branches[k];
        if (!std::isfinite(br.capacity))
            continue;
        for (std::size_t l = 0; l < net.num_loads(); ++l)
            offset[k] -= factors.flow_of(k, static_cast<std::size_t>(net.loads[l].bus)) * req.demands[l];
        if (balance_possible) {
            for (std::size_t g = 0; g < ng; ++g)
                coef[g] = factors.flow_of(k, static_cast<std::size_t>(net.generators[g].bus));
            const auto [hi, lo] = knapsack_range(coef, net, total);
            const double reach = br.capacity * (1.0 - 1e-9);
            if (offset[k] + hi < reach && offset[k] + lo > -reach)
                continue;
        }
        out.branches.push_back(k);
    }

    const std::size_t nf = out.branches.size();
    const std::size_t cols = ng + nf;
    lp::LinearProgram& lp = out.program;
    lp.objective_coeffs.assign(cols, 0.0);
    lp.var_lower.assign(cols, -lp::kInf);
    lp.var_upper.assign(cols, lp::kInf);
    lp.constraint_matrix = lp::Matrix(1 + nf, cols);
    lp.constraint_rhs.assign(1 + nf, 0.0);

    lp.constraint_rhs[0] = total;
    for (std::size_t g = 0; g < ng; ++g) {
        const Generator& gen = net.generators[g];
        lp.objective_coeffs[g] = req.prices[g];
        lp.var_lower[g] = gen.s_min;
        lp.var_upper[g] = gen.s_max;
        lp.constraint_matrix(0, g) = 1.0;
    }
    for (std::size_t f = 0; f < nf; ++f) {
        const std::size_t k = out.branches[f];
        const std::size_t row = 1 + f;
        const std::size_t col = ng + f;
        lp.var_lower[col] = -net.branches[k].capacity;
        lp.var_upper[col] = net.branches[k].capacity;
        // P_k - sum_g H(k, bus_g) S_g = - sum_l H(k, bus_l) D_l
        lp.constraint_matrix(row, col) = 1.0;
        for (std::size_t g = 0; g < ng; ++g)
            lp.constraint_matrix(row, g) = -factors.flow_of(k, static_cast<std::size_t>(net.generators[g].bus));
        lp.constraint_rhs[row] = offset[k];
    }
    return out;
}

DispatchSolution solve_opf(const OpfRequest& req)
{
    return solve_opf(req, shift_factors(req.network));
}

DispatchSolution solve_opf(const OpfRequest& req, const ShiftFactors& factors, const lp::Basis* warm)
{
    const ReducedOpf reduced = build_opf_reduced(req, factors);
    const lp::LinearProgram& stage1 = reduced.program;
    const PowerNetwork& net = req.network;
    const std::size_t ng = net.num_generators();
    const std::size_t nk = net.branches.size();
    const std::size_t nb = net.num_buses();

    double total_demand = 0.0;
    for (double d : req.demands)
        total_demand += d;

    DispatchSolution out;
    lp::LpSolution sol = lp::solve_lp(stage1, warm != nullptr && !warm->empty() ? warm : nullptr);
    out.lp_solves = 1;
    if (sol.status == lp::LpStatus::infeasible)
        throw InfeasibleDispatch(total_demand, total_effective_capacity(net));
    if (sol.status == lp::LpStatus::unbounded)
        throw std::logic_error("dispatch program unbounded despite finite supply limits");
    out.basis = sol.basis;

    std::vector<double> chosen(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(stage1.num_vars()));
    if (!sol.unique && ng > 1) {
        FaceProgram face(stage1, sol, ng, total_demand / static_cast<double>(ng));
        // With at most one free generator the balance row pins its supply.
        if (face.nf() > 1) {
            const lp::Basis seed = face.seed(0, sol);
            lp::LpSolution cur = lp::solve_lp(face.build(0), seed.empty() ? nullptr : &seed);
            ++out.lp_solves;
            if (cur.optimal()) {
                chosen.assign(cur.values.begin(), cur.values.begin() + static_cast<std::ptrdiff_t>(face.n()));
                face.l1_value = face.deviation(cur);
                // A zero deviation pins every free supply to the target.
                const bool pinned = face.l1_value <= face_slack(total_demand);
                for (std::size_t level = 1; !pinned && !cur.unique && level < face.nf(); ++level) {
                    const lp::Basis next_seed = face.seed(level, cur);
                    lp::LpSolution next = lp::solve_lp(face.build(level), next_seed.empty() ? nullptr : &next_seed);
                    ++out.lp_solves;
                    if (!next.optimal())
                        break;
                    chosen.assign(next.values.begin(), next.values.begin() + static_cast<std::ptrdiff_t>(face.n()));
                    face.level_values.push_back(next.objective_value);
                    cur = std::move(next);
                }
            }
        }
    }

    out.supplies.assign(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(ng));
    std::vector<double> injection(nb, 0.0);
    for (std::size_t g = 0; g < ng; ++g)
        injection[static_cast<std::size_t>(net.generators[g].bus)] += out.supplies[g];
    for (std::size_t l = 0; l < net.num_loads(); ++l)
        injection[static_cast<std::size_t>(net.loads[l].bus)] -= req.demands[l];
    out.angles.assign(nb, 0.0);
    for (std::size_t b = 1; b < nb; ++b) {
        double th = 0.0;
        for (std::size_t i = 0; i < nb; ++i)
            th += factors.angle_of(b, i) * injection[i];
        out.angles[b] = th;
    }
    // Flows that were program columns keep their solved values; the rest
    // follow from the injections.
    out.branch_flows.assign(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
        double flow = 0.0;
        for (std::size_t i = 0; i < nb; ++i)
            flow += factors.flow_of(k, i) * injection[i];
        out.branch_flows[k] = flow;
    }
    for (std::size_t f = 0; f < reduced.branches.size(); ++f)
        out.branch_flows[reduced.branches[f]] = chosen[ng + f];

    out.demands.assign(req.demands.begin(), req.demands.end());
    double cost = 0.0;
    for (std::size_t g = 0; g < ng; ++g)
        cost += req.prices[g] * out.supplies[g];
    out.dispatch_cost = cost;
    return out;
}

}  // namespace bidgame
