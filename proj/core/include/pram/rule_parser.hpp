#pragma once

#include <string_view>
#include <vector>

#include "pram/rule.hpp"

namespace pram {

// Parses exactly one rule block. Static checks beyond syntax: duplicate or
// self-contradictory clause conditions, constant probabilities outside [0,1],
// and constant-only clauses whose probabilities cannot sum to 1 under the
// given normalization mode. Throws ParseError with 1-based line/col.
Rule parse_rule(std::string_view text, NormalizationMode mode = NormalizationMode::strict);

// Parses consecutive rule blocks until end of input.
std::vector<Rule> parse_rules(std::string_view text,
                              NormalizationMode mode = NormalizationMode::strict);

}  // namespace pram
