#include "mvd/ifc/node.hpp"

#include <algorithm>

#include "mvd/ifc/schema.hpp"

namespace mvd::ifc {

namespace {

const std::string kIntegerName = "integer";
const std::string kRealName = "real";
const std::string kTextName = "string";
const std::string kBooleanName = "boolean";
const std::string kLogicalName = "logical";
const std::string kEnumName = "enum";
const std::string kBinaryName = "binary";
const std::string kOpaqueName = "value";

const std::string* primitive_name(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Integer: return &kIntegerName;
        case ValueKind::Real: return &kRealName;
        case ValueKind::Text: return &kTextName;
        case ValueKind::Boolean: return &kBooleanName;
        case ValueKind::Logical: return &kLogicalName;
        case ValueKind::Enum: return &kEnumName;
        case ValueKind::Binary: return &kBinaryName;
        default: return &kOpaqueName;
    }
}

// Interned dynamic type of a value as stored: explicit wrapper name wins,
// then the declared attribute type (when concrete), then the primitive kind.
const std::string* value_type_name(const SchemaTable& schema, const Value& v,
                                   const std::string& declared) {
    if (v.is(ValueKind::Typed)) {
        if (const DefinedTypeDef* def = schema.find_defined_type(v.as_typed().type_name))
            return &def->name;
        return primitive_name(v.as_typed().inner);
    }
    if (const DefinedTypeDef* def = schema.find_defined_type(declared);
        def && def->kind != PrimitiveKind::Select)
        return &def->name;
    return primitive_name(v);
}

}  // namespace

Node make_instance_node(std::uint32_t id) { return Node{id, nullptr, nullptr, {}}; }

std::string_view node_type_name(const Model& model, const Node& node) {
    if (node.is_instance()) return model.schema().entity(model.at(node.inst).entity).name;
    return *node.value_type;
}

bool node_matches_type(const Model& model, const Node& node, std::string_view constraint) {
    if (constraint.empty()) return true;
    return model.schema().matches_constraint(node_type_name(model, node), constraint);
}

namespace {

void emit_value_node(const Model& model, std::uint32_t owner, const Value& v,
                     std::basic_string<char16_t> path, const std::string& declared,
                     std::string_view constraint, NodeList& out) {
    switch (v.kind()) {
        case ValueKind::Unset:
        case ValueKind::Derived:
            return;
        case ValueKind::Reference: {
            Node node = make_instance_node(v.as_reference().id);
            if (node_matches_type(model, node, constraint)) out.push_back(std::move(node));
            return;
        }
        case ValueKind::List: {
            const Value::List& items = v.as_list();
            for (std::size_t i = 0; i < items.size(); ++i) {
                std::basic_string<char16_t> sub = path;
                sub.push_back(static_cast<char16_t>(i));
                emit_value_node(model, owner, items[i], std::move(sub), declared, constraint, out);
            }
            return;
        }
        default: {
            Node node{owner, &v, value_type_name(model.schema(), v, declared), std::move(path)};
            if (node_matches_type(model, node, constraint)) out.push_back(std::move(node));
            return;
        }
    }
}

}  // namespace

void attribute_targets(const Model& model, const Node& node, std::string_view attr,
                       std::string_view constraint, NodeList& out) {
    if (!node.is_instance()) return;  // values have no attributes
    const Instance& inst = model.at(node.inst);
    const SchemaTable& schema = model.schema();
    const EntityDef& ent = schema.entity(inst.entity);

    if (const AttributeDef* fwd = schema.find_attribute(ent, attr)) {
        std::uint32_t idx = ent.attribute_index.at(fwd->name);
        if (idx < inst.attributes.size()) {
            std::basic_string<char16_t> path;
            path.push_back(static_cast<char16_t>(idx + 1));
            emit_value_node(model, inst.id, inst.attributes[idx], std::move(path), fwd->type_name,
                            constraint, out);
        }
        return;
    }
    if (const InverseDef* inv = schema.find_inverse(ent, attr)) {
        for (const ReverseEntry& e : model.referencing(inst.id)) {
            const Instance& src = model.at(e.source);
            const EntityDef& src_ent = schema.entity(src.entity);
            if (!schema.is_subtype(src_ent.name, inv->source_entity)) continue;
            if (e.attribute >= src_ent.effective_attributes.size()) continue;
            if (src_ent.effective_attributes[e.attribute].name != inv->forward_attribute) continue;
            Node hit = make_instance_node(src.id);
            if (node_matches_type(model, hit, constraint)) out.push_back(std::move(hit));
        }
        return;
    }
    // Attribute undeclared for this node's type: contributes nothing.
}

std::string describe_node(const Model& model, const Node& node) {
    std::string out = "#" + std::to_string(node.inst);
    if (node.is_instance()) return out;
    const Instance& inst = model.at(node.inst);
    const EntityDef& ent = model.schema().entity(inst.entity);
    std::uint32_t attr = static_cast<std::uint32_t>(node.path[0]) - 1;
    out.push_back('.');
    out += attr < ent.effective_attributes.size() ? ent.effective_attributes[attr].name : "?";
    for (std::size_t i = 1; i < node.path.size(); ++i)
        out += "[" + std::to_string(static_cast<std::uint32_t>(node.path[i])) + "]";
    return out;
}

void sort_unique(NodeList& nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
}

}  // namespace mvd::ifc
