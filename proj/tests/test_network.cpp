#include "doctest.h"
#include "support.hpp"

using namespace bidgame;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& word)
{
    for (const auto& s : v)
        if (s.find(word) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST_CASE("bundled case9 is valid")
{
    const PowerNetwork& n = testing::case9().network;
    CHECK(validate(n).empty());
    CHECK_NOTHROW(require_valid(n));
}

TEST_CASE("validate is idempotent")
{
    PowerNetwork n = testing::case9().network;
    n.loads[0].share = 0.2;
    const auto a = validate(n);
    const auto b = validate(n);
    CHECK(a == b);
    CHECK(n.loads[0].share == 0.2);
}

TEST_CASE("load shares that do not sum to one")
{
    PowerNetwork n = testing::case9().network;
    n.loads[0].share = 0.3333333333333333 - 0.1;
    const auto v = validate(n);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "load shares"));
    CHECK_THROWS_AS(require_valid(n), NetworkError);
}

TEST_CASE("disconnected bus")
{
    PowerNetwork n = testing::two_bus();
    n.buses.push_back({2, BusKind::junction});
    const auto v = validate(n);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "connected"));
}

TEST_CASE("branch invariants")
{
    PowerNetwork n = testing::triangle();
    n.branches[0].reactance = 0.0;
    CHECK(mentions(validate(n), "reactance"));

    n = testing::triangle();
    n.branches[1] = {1, 1, 0.1, kUnbounded};
    CHECK(mentions(validate(n), "itself"));

    n = testing::triangle();
    n.branches.push_back({1, 0, 0.2, 10.0});
    CHECK(mentions(validate(n), "duplicates"));

    n = testing::triangle();
    n.branches[2].capacity = 0.0;
    CHECK(mentions(validate(n), "capacity"));
}

TEST_CASE("generator and load placement")
{
    PowerNetwork n = testing::triangle();
    n.generators[1].bus = 2;
    CHECK(mentions(validate(n), "not a generator bus"));

    n = testing::triangle();
    n.generators[0].s_min = 200.0;
    CHECK(mentions(validate(n), "s_min"));

    n = testing::triangle();
    n.generators[0].cost_coeff = 0.0;
    CHECK(mentions(validate(n), "cost_coeff"));

    n = testing::triangle();
    n.buses[2].kind = BusKind::junction;
    CHECK(mentions(validate(n), "not a load bus"));
}

TEST_CASE("junction buses are allowed")
{
    PowerNetwork n = testing::two_bus();
    n.buses.push_back({2, BusKind::junction});
    n.branches.push_back({1, 2, 0.1, kUnbounded});
    CHECK(validate(n).empty());
}

TEST_CASE("effective capacity of the case9 generators")
{
    const PowerNetwork& n = testing::case9().network;
    CHECK(effective_capacity(n, 0) == 250.0);
    CHECK(effective_capacity(n, 1) == 250.0);  // s_max 300, one 250 MW branch
    CHECK(effective_capacity(n, 2) == 270.0);
    CHECK(total_effective_capacity(n) == 770.0);
    CHECK_THROWS_AS(effective_capacity(n, 3), std::out_of_range);
}

TEST_CASE("effective capacity with unbounded and parallel incident branches")
{
    PowerNetwork n = testing::triangle(300.0, 300.0);
    CHECK(effective_capacity(n, 0) == 300.0);
    n.branches[0].capacity = 100.0;
    n.branches[2].capacity = 100.0;
    CHECK(effective_capacity(n, 0) == 200.0);
    CHECK(effective_capacity(n, 1) == 300.0);
}

TEST_CASE("effective capacity never exceeds s_max")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const PowerNetwork n = testing::random_network(rng, 6, true);
        REQUIRE(validate(n).empty());
        for (std::size_t g = 0; g < n.num_generators(); ++g)
            CHECK(effective_capacity(n, g) <= n.generators[g].s_max);
    }
}
