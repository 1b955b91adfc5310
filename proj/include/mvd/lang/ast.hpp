#pragma once

// AST for the MVDLite rule language.  A ruleset is a list of abbreviations
// and concepts; concepts carry definition (applicability) and constraint
// rule chains.  The AST moves through four stages --- parsed, desugared,
// expanded, completed --- and every pass records the stage it produced so
// consumers can assert their inputs.
//
// Equality compares semantic content: source positions and the
// "constraint was written explicitly" flag are ignored, which makes
// parse(format(x)) == x hold for canonically formatted input.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mvd::lang {

struct SourcePos {
    std::uint32_t line = 0;
    std::uint32_t column = 0;
};

enum class Stage : std::uint8_t { Parsed, Desugared, Expanded, Completed };
const char* to_string(Stage s);

enum class MetricKind : std::uint8_t { Bare, Type, Value, Size, Exists, Unique };
enum class Cmp : std::uint8_t { Eq, Ne, Gt, Lt, Ge, Le };
enum class Connective : std::uint8_t { And, Or, Xor, Not };
const char* to_string(MetricKind m);  // "[Value]" spelling without brackets
const char* to_string(Cmp c);
const char* to_string(Connective c);

struct Literal {
    enum class Kind : std::uint8_t { String, Int, Real, Bool, Name };
    Kind kind = Kind::String;
    std::string text;        // String and Name spelling
    std::int64_t ival = 0;   // Int
    double rval = 0.0;       // Real
    bool bval = false;       // Bool

    static Literal string(std::string s);
    static Literal integer(std::int64_t v);
    static Literal real(double v);
    static Literal boolean(bool v);
    static Literal name(std::string s);

    friend bool operator==(const Literal& a, const Literal& b);
};

struct Segment;

// One chain fragment inside a compound: a non-empty segment sequence.
struct Fragment {
    std::vector<Segment> segments;
    friend bool operator==(const Fragment&, const Fragment&);
};

// Connective tree over fragments.  NOT nodes have exactly one child.
struct LogicExpr {
    bool is_leaf = false;
    Connective op = Connective::And;
    Fragment leaf;                   // when is_leaf
    std::vector<LogicExpr> children; // when !is_leaf
    static LogicExpr make_leaf(Fragment f);
    static LogicExpr make_op(Connective op, std::vector<LogicExpr> children);
    friend bool operator==(const LogicExpr&, const LogicExpr&);
};

// "(IfcWall)" at the start of a chain: asserts/filters the input set.
struct InputAnchorSegment {
    std::string type_name;
    friend bool operator==(const InputAnchorSegment&, const InputAnchorSegment&) = default;
};

// "->Attr", "->Attr:Type", "->Attr:Type('name')"
struct AttributeSegment {
    std::string attribute;
    std::string type_constraint;          // empty until written or completed
    bool constraint_explicit = false;     // ignored by operator==
    std::optional<std::string> name_filter;  // ('X') sugar; removed by desugar
    friend bool operator==(const AttributeSegment& a, const AttributeSegment& b) {
        return a.attribute == b.attribute && a.type_constraint == b.type_constraint &&
               a.name_filter == b.name_filter;
    }
};

// "[Value]>=2", "[Exists]=TRUE", bare "='x'" (Bare desugars to Value).
struct MetricSegment {
    MetricKind metric = MetricKind::Bare;
    Cmp cmp = Cmp::Eq;
    std::vector<Literal> values;  // >1 entries = "|" alternatives (pre-desugar)
    friend bool operator==(const MetricSegment&, const MetricSegment&) = default;
};

struct CompoundSegment {
    LogicExpr expr;
    friend bool operator==(const CompoundSegment&, const CompoundSegment&) = default;
};

// Leading identifier: abbreviation reference (spliced by expansion) or an
// entity type anchoring a global-existence chain.
struct NameRefSegment {
    std::string name;
    std::optional<std::string> name_filter;
    bool is_global_type = false;  // set by expansion when it names an entity
    friend bool operator==(const NameRefSegment& a, const NameRefSegment& b) {
        return a.name == b.name && a.name_filter == b.name_filter;
    }
};

struct Segment
    : std::variant<InputAnchorSegment, AttributeSegment, MetricSegment, CompoundSegment,
                   NameRefSegment> {
    using variant::variant;
    const variant& as_variant() const { return *this; }
    variant& as_variant() { return *this; }
};

struct Chain {
    std::vector<Segment> segments;
    friend bool operator==(const Chain&, const Chain&) = default;
};

// Parsed JSON object from a "// {...}" comment attached to the construct.
struct TagInfo {
    bool present = false;
    nlohmann::json data = nlohmann::json::object();

    std::string get_string(const std::string& key) const {
        auto it = data.find(key);
        return it != data.end() && it->is_string() ? it->get<std::string>() : std::string();
    }
    friend bool operator==(const TagInfo&, const TagInfo&) = default;
};

struct Rule {
    Chain chain;
    TagInfo tag;
    SourcePos pos;
    friend bool operator==(const Rule& a, const Rule& b) {
        return a.chain == b.chain && a.tag == b.tag;
    }
};

struct ConceptDef {
    std::string name;
    std::optional<std::string> extends;  // parent concept or entity type
    std::vector<Rule> definition_rules;
    std::vector<Rule> constraint_rules;
    TagInfo tag;
    SourcePos pos;
    // Filled by complete_types; empty for concepts whose constraints are
    // all global.  Not part of equality.
    std::string root_entity;
    bool extends_concept = false;  // extends names another concept (vs a type)
    friend bool operator==(const ConceptDef& a, const ConceptDef& b) {
        return a.name == b.name && a.extends == b.extends &&
               a.definition_rules == b.definition_rules &&
               a.constraint_rules == b.constraint_rules && a.tag == b.tag;
    }
};

struct Abbreviation {
    std::string name;
    std::optional<std::string> root_type;  // "(IfcObject)" hint before the body
    std::vector<Segment> body;
    TagInfo tag;
    SourcePos pos;
    friend bool operator==(const Abbreviation& a, const Abbreviation& b) {
        return a.name == b.name && a.root_type == b.root_type && a.body == b.body && a.tag == b.tag;
    }
};

struct CommentInfo {
    SourcePos pos;
    std::string text;  // without the // or /* */ delimiters
};

struct RuleSet {
    std::optional<std::string> schema_id;
    std::vector<Abbreviation> abbreviations;
    std::vector<ConceptDef> concepts;
    std::vector<CommentInfo> comments;  // all comments, in source order
    Stage stage = Stage::Parsed;

    const ConceptDef* find_concept(std::string_view name) const;
    friend bool operator==(const RuleSet& a, const RuleSet& b) {
        return a.schema_id == b.schema_id && a.abbreviations == b.abbreviations &&
               a.concepts == b.concepts;
    }
};

// Convenience predicates used across passes.
bool is_metric_ended(const Fragment& fragment);
bool chain_is_global(const Chain& chain);  // starts with a global type ref

}  // namespace mvd::lang
