#pragma once

// Canonical text rendering of rulesets and chains.  format() output parses
// back to an equal AST, and the formatted resolved chain prefix doubles as
// the evaluator's cache key, so the rendering is fully deterministic.

#include <string>

#include "mvd/lang/ast.hpp"

namespace mvd::lang {

std::string format(const Literal& lit);
std::string format(const Segment& seg);
std::string format(const std::vector<Segment>& segments);
std::string format(const Chain& chain);
std::string format(const LogicExpr& expr);
std::string format(const RuleSet& ruleset);

}  // namespace mvd::lang
