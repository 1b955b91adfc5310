#pragma once

#include <string_view>

#include "mvd/lang/ast.hpp"
#include "mvd/lang/lexer.hpp"

namespace mvd::lang {

// Parses MVDLite source into a Stage::Parsed ruleset.  Grammar errors
// throw ParseError with position and an expected/got message.
RuleSet parse_ruleset(std::string_view source);

}  // namespace mvd::lang
