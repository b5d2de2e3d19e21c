#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidgame {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class BusKind { generator, load, junction };

const char* to_string(BusKind k) noexcept;

struct Bus {
    int id = 0;
    BusKind kind = BusKind::junction;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;        // per unit
    double capacity = kUnbounded;  // MW

    bool operator==(const Branch&) const = default;
};

struct Generator {
    int bus = 0;
    double s_min = 0.0;  // MW
    double s_max = 0.0;  // MW
    double cost_coeff = 0.0;  // a in a * S^2

    bool operator==(const Generator&) const = default;
};

struct Load {
    int bus = 0;
    double share = 0.0;  // fraction of total demand

    bool operator==(const Load&) const = default;
};

struct PowerNetwork {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<Load> loads;

    std::size_t num_buses() const noexcept { return buses.size(); }
    std::size_t num_generators() const noexcept { return generators.size(); }
    std::size_t num_loads() const noexcept { return loads.size(); }

    bool operator==(const PowerNetwork&) const = default;
};

/// One human-readable line per broken invariant; empty means valid.
std::vector<std::string> validate(const PowerNetwork& network);

class NetworkError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws NetworkError listing every violation.
void require_valid(const PowerNetwork& network);

/// Deliverable-supply bound for generator g: min(s_max, sum of incident branch
/// capacities). This is the incident-cut bound, not a full max-flow; it is
/// exact when the generator bus has a single binding branch.
double effective_capacity(const PowerNetwork& network, std::size_t g);

/// Sum of effective_capacity over all generators.
double total_effective_capacity(const PowerNetwork& network);

}  // namespace bidgame
