#pragma once

// mvdXML Rule Grammar statements: the constraint expressions carried in
// TemplateRule Parameters attributes.  A statement is a logical tree whose
// leaves reference template RuleIDs, optionally with a metric, comparator
// and literal; a bare RuleID asserts that the template path exists.
// Operator precedence, tightest first: NOT, AND, XOR, OR.

#include <stdexcept>
#include <string>
#include <vector>

#include "mvd/lang/ast.hpp"

namespace mvd::xml {

class StatementError : public std::runtime_error {
  public:
    explicit StatementError(const std::string& what) : std::runtime_error(what) {}
};

struct Statement {
    enum class Kind : std::uint8_t { Leaf, Group };
    Kind kind = Kind::Leaf;

    // Leaf: RuleID plus an optional metric/comparator/value constraint.
    std::string rule_id;
    bool has_constraint = false;
    lang::MetricKind metric = lang::MetricKind::Value;
    lang::Cmp cmp = lang::Cmp::Eq;
    lang::Literal value;

    // Group: connective over children (NOT has exactly one child).
    lang::Connective op = lang::Connective::And;
    std::vector<Statement> children;

    static Statement leaf(std::string rule_id);
    static Statement leaf(std::string rule_id, lang::MetricKind m, lang::Cmp cmp,
                          lang::Literal value);
    static Statement group(lang::Connective op, std::vector<Statement> children);

    friend bool operator==(const Statement& a, const Statement& b);
};

Statement parse_statement(const std::string& text);

// Canonical rendering; parse_statement(format_statement(s)) == s.
std::string format_statement(const Statement& s);

// All RuleIDs referenced by the statement, in first-appearance order.
std::vector<std::string> statement_rule_ids(const Statement& s);

}  // namespace mvd::xml
