#pragma once

// Nodes are the elements rule chains walk over: either a model instance
// or an attribute value reached from one.  Value nodes are identified by
// their owner instance plus the attribute/list index path to the value,
// so node sets stay well-defined even for equal literals.

#include <cstdint>
#include <string>
#include <vector>

#include "mvd/ifc/model.hpp"

namespace mvd::ifc {

class SchemaTable;

struct Node {
    std::uint32_t inst = 0;               // instance id (the owner for value nodes)
    const Value* value = nullptr;         // null => instance node
    const std::string* value_type = nullptr;  // interned dynamic type name of a value node
    std::basic_string<char16_t> path;     // [attribute index, list indices...]

    bool is_instance() const { return value == nullptr; }

    friend bool operator==(const Node& a, const Node& b) {
        return a.inst == b.inst && a.path == b.path;
    }
    friend bool operator<(const Node& a, const Node& b) {
        if (a.inst != b.inst) return a.inst < b.inst;
        return a.path < b.path;
    }
};

using NodeList = std::vector<Node>;

Node make_instance_node(std::uint32_t id);

// Dynamic type name: entity name for instances, wrapper/declared/primitive
// name for values.  Always points at storage owned by the schema table or
// a static pool, never at the model.
std::string_view node_type_name(const Model& model, const Node& node);

// Expand `node` along attribute `attr` (forward or inverse).  Nodes whose
// type does not declare the attribute contribute nothing.  If `constraint`
// is non-empty the result is filtered by entity closure / select
// membership / type-name match.  Appends to `out`.
void attribute_targets(const Model& model, const Node& node, std::string_view attr,
                       std::string_view constraint, NodeList& out);

// Constraint test shared by navigation and the brute-force checker.
bool node_matches_type(const Model& model, const Node& node, std::string_view constraint);

// Render "#12" or "#12.Name[2]" for reports and traces.
std::string describe_node(const Model& model, const Node& node);

void sort_unique(NodeList& nodes);

}  // namespace mvd::ifc
