#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bidgame/game.hpp"
#include "bidgame/market.hpp"
#include "bidgame/network.hpp"

namespace bidgame {

/// Everything needed to run the game on one grid: network, demand curve,
/// game defaults and free-form provenance notes.
struct CaseFile {
    std::string name;
    std::vector<std::string> provenance;
    PowerNetwork network;
    MarketParams market;
    GameConfig game;

    bool operator==(const CaseFile&) const = default;
};

/// Parse or validation failure. what() carries the file name and either a
/// line number or the offending field path.
class CaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strict JSON reader: unknown keys, missing required fields and invalid
/// values are errors.
CaseFile parse_case(std::string_view text, const std::string& source = "<memory>");
CaseFile load_case(const std::filesystem::path& path);

/// Serializes a case so that parse_case(dump_case(c)) == c.
std::string dump_case(const CaseFile& c);

}  // namespace bidgame
