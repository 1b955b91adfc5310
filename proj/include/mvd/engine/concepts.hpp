#pragma once

// Binding concepts to a model: who is applicable, and which constraint
// rules (own and inherited) each root population has to satisfy.

#include <vector>

#include "mvd/engine/evaluator.hpp"
#include "mvd/lang/ast.hpp"

namespace mvd::engine {

struct BoundRule {
    const lang::Rule* rule;
    const lang::ConceptDef* owner;  // concept that declared the rule
    bool inherited = false;
};

struct BoundConcept {
    const lang::ConceptDef* def;
    std::string root_entity;             // empty when all rules are global
    RootList roots;                      // applicable instances, sorted
    std::vector<BoundRule> constraints;  // ancestors' rules first
};

// Constraint rules a concept answers for: every ancestor's (outermost
// first), then its own.  Pure AST walk, no model involved.
std::vector<BoundRule> effective_constraints(const lang::RuleSet& ruleset,
                                             const lang::ConceptDef& def);

// Binds every concept of a completed ruleset against the evaluator's
// model.  Applicability starts from the root entity's instances, is
// narrowed to the parent's applicable set for `extends`, and then
// filtered by the definition rules.
std::vector<BoundConcept> bind_concepts(Evaluator& ev, const lang::RuleSet& ruleset);

}  // namespace mvd::engine
