#pragma once

// Comparison between a model value and a rule literal.  This is the one
// piece of semantics shared by the fast evaluator and the brute-force
// reference checker, so it lives apart from both and gets its own tests.

#include "mvd/ifc/value.hpp"
#include "mvd/lang/ast.hpp"

namespace mvd::engine {

enum class Ordering : std::uint8_t {
    Less,
    Equal,
    Greater,
    Distinct,   // same domain, unequal, no order (booleans, enum tokens)
    Unordered,  // different domains, or unset/derived/unknown values
};

// Unwraps typed values, then compares by domain: numbers numerically
// (|a-b| <= epsilon counts as equal), strings byte-wise with lexicographic
// order, booleans and enumeration tokens for (in)equality only.  Name
// literals compare case-insensitively, matching enumeration conventions.
// Unordered never satisfies any comparator, including !=.
Ordering compare_value(const ifc::Value& value, const lang::Literal& lit, double epsilon = 0.0);

bool satisfies(lang::Cmp cmp, Ordering o);

}  // namespace mvd::engine
