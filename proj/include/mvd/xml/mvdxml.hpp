#pragma once

// In-memory model of an mvdXML V1.1 document: ConceptTemplates (attribute
// trees with RuleIDs) plus ModelViews holding ConceptRoots, their
// Applicability and Concepts with Rule Grammar statements.
//
// Constructs MVDLite can state but mvdXML cannot (root-level metrics,
// non-OR mapping compounds, ...) survive conversion as marker comments
// whose payload is MVDLite source; they are first-class entries here so
// that parse_mvdxml(write_mvdxml(doc)) == doc.

#include <stdexcept>
#include <string>
#include <vector>

#include "mvd/xml/statement.hpp"

namespace mvd::xml {

class XmlError : public std::runtime_error {
  public:
    explicit XmlError(const std::string& what) : std::runtime_error(what) {}
};

struct TemplateEntity;

// AttributeRule: a named attribute hop, optionally carrying a RuleID.
struct TemplateAttribute {
    std::string attribute;
    std::string rule_id;                   // empty when unreferenced
    std::vector<TemplateEntity> entities;  // EntityRule alternatives
    friend bool operator==(const TemplateAttribute&, const TemplateAttribute&);
};

// EntityRule: type constraint below an attribute.  Carries its own RuleID
// only when sibling entity alternatives would make the attribute-level
// RuleID ambiguous.
struct TemplateEntity {
    std::string entity;
    std::string rule_id;
    std::vector<TemplateAttribute> attributes;
    friend bool operator==(const TemplateEntity& a, const TemplateEntity& b) {
        return a.entity == b.entity && a.rule_id == b.rule_id && a.attributes == b.attributes;
    }
};

inline bool operator==(const TemplateAttribute& a, const TemplateAttribute& b) {
    return a.attribute == b.attribute && a.rule_id == b.rule_id && a.entities == b.entities;
}

struct ConceptTemplate {
    std::string uuid;
    std::string name;
    std::string code;
    std::string applicable_schema;
    std::string applicable_entity;
    std::vector<TemplateAttribute> rules;
    friend bool operator==(const ConceptTemplate&, const ConceptTemplate&) = default;
};

// One ordered entry of a TemplateRules block: either a TemplateRule
// statement or a marker comment holding MVDLite source for a rule the
// statement grammar cannot express.
struct RuleEntry {
    bool is_marker = false;
    Statement statement;      // when !is_marker
    std::string description;  // TemplateRule Description attribute (tag JSON)
    std::string marker;       // when is_marker: MVDLite payload
    friend bool operator==(const RuleEntry& a, const RuleEntry& b) {
        if (a.is_marker != b.is_marker) return false;
        if (a.is_marker) return a.marker == b.marker;
        return a.statement == b.statement && a.description == b.description;
    }
};

struct TemplateRuleBlock {
    lang::Connective op = lang::Connective::And;
    std::vector<RuleEntry> entries;
    friend bool operator==(const TemplateRuleBlock&, const TemplateRuleBlock&) = default;
};

struct MvdConcept {
    std::string uuid;
    std::string name;
    std::string code;
    std::string description;      // residual tag JSON
    std::string template_ref;     // ConceptTemplate uuid
    std::string requirement_ref;  // ExchangeRequirement uuid ("" = none)
    std::string severity = "mandatory";
    TemplateRuleBlock rules;
    friend bool operator==(const MvdConcept&, const MvdConcept&) = default;
};

struct ConceptRoot {
    std::string uuid;
    std::string name;
    std::string code;
    std::string description;
    std::string applicable_root_entity;
    bool has_applicability = false;
    std::string applicability_template_ref;
    TemplateRuleBlock applicability;
    std::vector<MvdConcept> concepts;
    friend bool operator==(const ConceptRoot&, const ConceptRoot&) = default;
};

struct ExchangeRequirement {
    std::string uuid;
    std::string name;
    std::string applicability = "export";
    friend bool operator==(const ExchangeRequirement&, const ExchangeRequirement&) = default;
};

struct ModelView {
    std::string uuid;
    std::string name;
    std::string applicable_schema;
    std::vector<ExchangeRequirement> requirements;
    // MVDLite concepts with no root entity (all-global constraints), kept
    // verbatim as marker comments under <Roots>.
    std::vector<std::string> global_markers;
    std::vector<ConceptRoot> roots;
    friend bool operator==(const ModelView&, const ModelView&) = default;
};

struct MvdXmlDoc {
    std::string uuid;
    std::string name;
    std::vector<ConceptTemplate> templates;
    std::vector<ModelView> views;

    const ConceptTemplate* find_template(const std::string& uuid) const;
    friend bool operator==(const MvdXmlDoc&, const MvdXmlDoc&) = default;
};

// Reads an mvdXML V1.1 document.  Throws XmlError on malformed XML, on
// shape violations and on dangling UUID references.
MvdXmlDoc parse_mvdxml(const std::string& xml_text);

// Deterministic writer; identical documents produce identical bytes.
std::string write_mvdxml(const MvdXmlDoc& doc);

// Structural diagnostics beyond what parse enforces; empty means clean.
std::vector<std::string> validate(const MvdXmlDoc& doc);

// Name-based uuid (FNV-1a over the canonical string, uuid-shaped hex).
std::string derived_uuid(const std::string& canonical);

}  // namespace mvd::xml
