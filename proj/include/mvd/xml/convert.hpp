#pragma once

// Verdict-preserving conversion between resolved MVDLite rulesets and
// mvdXML documents.
//
// Exporting walks each rule chain once: attribute hops become template
// nodes, metrics become statement leaves on the node's RuleID, filter
// compounds become statement groups, and OR mapping compounds distribute
// their continuation over the branches.  What the statement grammar cannot
// say (root-level metrics, non-OR mapping compounds, global fragments,
// narrowing lead anchors) is carried as a marker comment holding the rule's
// MVDLite source — or rejected in strict mode.
//
// Importing reverses this: every RuleID names a root-to-node template
// path, statement groups become compound segments placed at the lowest
// common ancestor of their leaf paths, and markers are parsed back as
// MVDLite rules.

#include <stdexcept>
#include <string>

#include "mvd/ifc/schema.hpp"
#include "mvd/lang/ast.hpp"
#include "mvd/xml/mvdxml.hpp"

namespace mvd::xml {

class ConvertError : public std::runtime_error {
  public:
    explicit ConvertError(const std::string& what) : std::runtime_error(what) {}
};

struct ConvertOptions {
    bool strict = false;  // error out instead of writing marker comments
    std::string view_name = "MVDLite export";
};

// Requires a fully resolved (compiled) ruleset; deterministic output.
MvdXmlDoc to_mvdxml(const lang::RuleSet& resolved, const ifc::SchemaTable& schema,
                    const ConvertOptions& options = {});

// Produces a parsed-stage ruleset; run lang::compile before evaluating.
lang::RuleSet from_mvdxml(const MvdXmlDoc& doc, const ifc::SchemaTable& schema);

}  // namespace mvd::xml
