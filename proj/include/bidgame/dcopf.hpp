#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidgame/lp.hpp"
#include "bidgame/network.hpp"

namespace bidgame {

/// Economic-dispatch input: fixed prices per generator, fixed demand per load.
struct OpfRequest {
    const PowerNetwork& network;
    std::span<const double> prices;   // per generator
    std::span<const double> demands;  // MW per load
};

/// Result of the DC economic dispatch.
///
/// Branch flows are stored once per branch in the branch's (from, to)
/// orientation as P(from,to) = (theta_to - theta_from) / x, the power flowing
/// from `to` into `from`. flow(j, i) is derived as -flow(i, j).
struct DispatchSolution {
    std::vector<double> supplies;      // MW per generator
    std::vector<double> angles;        // per bus, bus 0 is the reference
    std::vector<double> branch_flows;  // MW per branch, (from, to) orientation
    std::vector<double> demands;       // MW per load, as requested
    double dispatch_cost = 0.0;        // sum of price * supply
    int lp_solves = 0;
    lp::Basis basis;  // final basis of the cost-minimizing stage

    /// P(i, j) for an existing branch between i and j.
    double flow(const PowerNetwork& network, int i, int j) const;

    double total_supply() const;
    double total_demand() const;
};

/// Demand cannot be served within supplier and branch limits.
class InfeasibleDispatch : public std::runtime_error {
public:
    InfeasibleDispatch(double total_demand, double total_capacity);

    double total_demand() const noexcept { return total_demand_; }
    double total_capacity() const noexcept { return total_capacity_; }

private:
    double total_demand_;
    double total_capacity_;
};

/// Column layout of the program built by build_opf.
struct OpfLayout {
    std::size_t supply0 = 0;  // one column per generator
    std::size_t angle0 = 0;   // one column per bus
    std::size_t flow0 = 0;    // one column per branch
    std::size_t columns = 0;
};

OpfLayout opf_layout(const PowerNetwork& network);

/// Cost-minimizing dispatch program. Columns follow opf_layout; rows are one
/// nodal balance per bus followed by one flow definition per branch. Branch
/// limits are the bounds on the flow columns.
lp::LinearProgram build_opf(const OpfRequest& req);

/// Injection-to-flow sensitivities with bus 0 as the angle reference.
/// angle_of(b, i) is d theta_b / d injection_i; flow_of(k, i) is
/// d P_k / d injection_i in the branch's (from, to) orientation.
struct ShiftFactors {
    lp::Matrix angle_of;  // buses x buses
    lp::Matrix flow_of;   // branches x buses
};

ShiftFactors shift_factors(const PowerNetwork& network);

/// The same dispatch problem with the angles eliminated.
struct ReducedOpf {
    /// Columns: the supplies, then one flow per entry of `branches`. Rows: the
    /// system balance, then flow = shift factors times injections for each of
    /// those branches.
    lp::LinearProgram program;
    /// Branches whose limit some balanced dispatch within the supplier limits
    /// could reach. The others cannot bind and are left out.
    std::vector<std::size_t> branches;
};

/// Equivalent to build_opf on a connected network.
ReducedOpf build_opf_reduced(const OpfRequest& req, const ShiftFactors& factors);

/// Solves the reduced program, then breaks cost ties: among cost-optimal
/// dispatches pick the one with least L1 deviation from the equal split
/// D/|G|, and among those the one whose deviations, sorted in decreasing
/// order, are lexicographically smallest. Angles and the remaining flows are
/// recovered from the injections. Throws InfeasibleDispatch.
///
/// `warm` may be the basis of an earlier solve on the same network and
/// prices; the reduced program then starts from it when still feasible.
DispatchSolution solve_opf(const OpfRequest& req);
DispatchSolution solve_opf(const OpfRequest& req, const ShiftFactors& factors, const lp::Basis* warm = nullptr);

}  // namespace bidgame
