#pragma once

// AST pipeline: desugar removes the three sugared forms, expansion splices
// abbreviation bodies, completion fills omitted type constraints from the
// schema and rejects statically impossible chains.

#include <stdexcept>

#include "mvd/ifc/schema.hpp"
#include "mvd/lang/ast.hpp"

namespace mvd::lang {

class PassError : public std::runtime_error {
public:
    explicit PassError(const std::string& what) : std::runtime_error(what) {}
};

// Parsed|Desugared -> Desugared.  Rewrites: bare comparators to [Value],
// ('X') name filters to (->Name[Value]='X') compounds, and v1|v2
// alternatives to ([Value]=v1 OR [Value]=v2).
RuleSet desugar(RuleSet in);

// Desugared|Expanded -> Expanded.  Splices abbreviation references
// (prefixing the abbreviation's (Type) hint as a type filter), detects
// unknown references and reference cycles.  Leading identifiers that are
// not abbreviations become global type anchors, validated by completion.
RuleSet expand_abbreviations(RuleSet in);

// Expanded|Completed -> Completed.  Static walk over every chain against
// the schema: fills omitted constraints with declared attribute types,
// validates explicit constraints, metric placement and literal kinds, and
// resolves each concept's root entity type (ConceptDef::resolved metadata
// consumed by the engine).
RuleSet complete_types(RuleSet in, const ifc::SchemaTable& schema);

// The whole pipeline.
RuleSet compile(RuleSet in, const ifc::SchemaTable& schema);

}  // namespace mvd::lang
