#pragma once

// Schema tables describe one IFC schema version: the entity hierarchy,
// typed forward/inverse attributes, defined types, enumerations and
// selects.  Tables are loaded from the versioned text format shipped
// under data/schemas (see docs/schema_table.md) instead of parsing
// EXPRESS at runtime.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mvd::ifc {

// Primitive kind of a defined type or literal value position.
enum class PrimitiveKind : std::uint8_t {
    Integer,
    Real,
    Text,
    Boolean,
    Logical,
    Binary,
    Enumeration,
    Select,
};

const char* to_string(PrimitiveKind kind);

struct AttributeDef {
    std::string name;
    std::string type_name;   // entity, defined type or select name
    bool optional = false;
    bool aggregate = false;  // LIST/SET/ARRAY collapse to one flag
};

struct InverseDef {
    std::string name;
    std::string source_entity;      // entity holding the forward attribute
    std::string forward_attribute;  // attribute on source_entity
};

struct EntityDef {
    std::string name;
    std::optional<std::string> supertype;
    bool is_abstract = false;
    std::vector<AttributeDef> own_attributes;
    std::vector<InverseDef> inverse_attributes;

    // Filled in by SchemaTable::finalize(): inherited + own, declaration order.
    std::vector<AttributeDef> effective_attributes;
    std::vector<InverseDef> effective_inverses;
    std::unordered_map<std::string, std::uint32_t> attribute_index;
};

struct DefinedTypeDef {
    std::string name;
    PrimitiveKind kind = PrimitiveKind::Text;
    std::vector<std::string> members;  // enum tokens, or select members
};

class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

class SchemaTable {
public:
    static SchemaTable load_file(const std::string& path);
    static SchemaTable load_text(std::string_view text, const std::string& origin = "<memory>");

    const std::string& schema_id() const { return schema_id_; }

    bool has_entity(std::string_view name) const { return find_entity(name) != nullptr; }
    const EntityDef* find_entity(std::string_view name) const;  // case-insensitive
    const EntityDef& entity(std::string_view name) const;
    const EntityDef& entity(std::uint32_t index) const { return entities_[index]; }
    std::optional<std::uint32_t> entity_index(std::string_view name) const;
    std::uint32_t entity_count() const { return static_cast<std::uint32_t>(entities_.size()); }

    const DefinedTypeDef* find_defined_type(std::string_view name) const;
    bool has_type_name(std::string_view name) const;  // entity, defined type or select

    // true iff a == b or a transitively inherits b; names must be known.
    bool is_subtype(std::string_view a, std::string_view b) const;
    bool is_subtype(std::uint32_t a, std::uint32_t b) const;

    // a entity/defined-type name matches a constraint name: equal, entity
    // subtype, or membership of a select (transitively).
    bool matches_constraint(std::string_view type_name, std::string_view constraint) const;

    // All concrete and abstract entity indices in the subtype closure of
    // `name` (including itself), sorted.
    const std::vector<std::uint32_t>& subtype_closure(std::uint32_t index) const;
    std::vector<std::string> select_entity_members(std::string_view select_name) const;

    // Forward attribute lookup over the effective attribute list.
    const AttributeDef* find_attribute(const EntityDef& ent, std::string_view name) const;
    const InverseDef* find_inverse(const EntityDef& ent, std::string_view name) const;

    // Attribute lookup for static type inference: searches an entity's
    // effective list, or every entity member of a select.  Returns the
    // declared attribute (forward or inverse normalised to an
    // AttributeDef-like view).
    struct ResolvedAttribute {
        std::string declared_type;  // target entity/type name
        bool is_inverse = false;
        bool aggregate = false;
    };
    std::optional<ResolvedAttribute> resolve_attribute(std::string_view static_type,
                                                       std::string_view attr_name) const;

    // Candidate attribute names for diagnostics.
    std::vector<std::string> attribute_names(std::string_view static_type) const;

private:
    void finalize(const std::string& origin);

    std::string schema_id_;
    std::vector<EntityDef> entities_;
    std::unordered_map<std::string, std::uint32_t> entity_by_lower_;
    std::map<std::string, DefinedTypeDef> defined_types_;  // includes enums and selects
    std::unordered_map<std::string, std::string> type_by_lower_;
    std::vector<std::vector<std::uint32_t>> closures_;
    std::vector<std::uint32_t> depth_;  // root depth per entity, for fast is_subtype
};

// Directory of schema tables, looked up by schema id (FILE_SCHEMA value).
class SchemaRepository {
public:
    explicit SchemaRepository(std::vector<std::string> search_dirs = {});
    void add_search_dir(const std::string& dir);
    void register_table(SchemaTable table);

    // Loads (and caches) the table for `schema_id`; throws SchemaError for
    // an unknown id.
    const SchemaTable& get(const std::string& schema_id);

private:
    std::vector<std::string> dirs_;
    std::map<std::string, SchemaTable> cache_;
};

std::string to_lower_ascii(std::string_view s);

}  // namespace mvd::ifc
