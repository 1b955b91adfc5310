#pragma once

// Validation entry point and the report it produces, with JSON / CSV /
// text serializations for the CLI.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvd/engine/concepts.hpp"

namespace mvd::engine {

struct RuleResult {
    std::string chain;   // formatted constraint chain
    std::string code;    // tag "code", if any
    std::string owner;   // declaring concept, when inherited
    bool global = false;
    bool global_passed = true;  // meaningful when global
    RootList failed;            // failing roots; all applicable roots for
                                // a failed global rule
    double millis = 0.0;
};

struct ConceptResult {
    std::string name;
    std::string uuid;  // tag "uuid", if any
    std::string root_entity;
    std::size_t applicable = 0;
    std::vector<RuleResult> rules;
    RootList failed_roots;  // distinct roots failing at least one rule
};

struct ValidationReport {
    std::string schema;
    std::string model_name;
    std::size_t instance_count = 0;
    EvalOptions options;
    std::vector<ConceptResult> concepts;
    EvalStats stats;
    double millis = 0.0;

    std::size_t roots_checked() const;   // sum of applicable counts
    std::size_t total_failures() const;  // failing (rule, root) pairs;
                                         // a rootless global failure counts once
    bool passed() const { return total_failures() == 0; }

    nlohmann::json to_json() const;
    std::string to_csv(const ifc::Model* model = nullptr) const;
    std::string to_text() const;
};

// Runs every concept of a completed ruleset over the evaluator's model.
// When caching is enabled, a cache plan is installed first so only
// prefixes shared by at least two rules of a scope are kept.
ValidationReport validate(Evaluator& ev, const lang::RuleSet& ruleset,
                          const std::string& model_name);

}  // namespace mvd::engine
