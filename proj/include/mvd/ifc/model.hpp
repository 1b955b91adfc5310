#pragma once

// In-memory representation of one ISO 10303-21 (SPF) file plus the two
// indexes rule evaluation depends on: instances-by-type and the reverse
// reference index used for inverse attributes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvd/ifc/value.hpp"

namespace mvd::ifc {

class SchemaTable;

struct Instance {
    std::uint32_t id = 0;         // STEP #id
    std::uint32_t entity = 0;     // index into SchemaTable entities
    std::vector<Value> attributes;
};

struct FileHeader {
    std::vector<std::string> description;
    std::string implementation_level = "2;1";
    std::string name;
    std::string timestamp;
    std::vector<std::string> author;
    std::vector<std::string> organization;
    std::string preprocessor_version;
    std::string originating_system;
    std::string authorization;
    std::vector<std::string> schema_identifiers;
};

// (target, source, top-level forward attribute position on source)
struct ReverseEntry {
    std::uint32_t target = 0;
    std::uint32_t source = 0;
    std::uint32_t attribute = 0;
};

class ModelError : public std::runtime_error {
public:
    ModelError(std::string what, std::size_t line = 0)
        : std::runtime_error(std::move(what)), line(line) {}
    std::size_t line;
};

class Model {
public:
    FileHeader header;

    const SchemaTable& schema() const { return *schema_; }
    std::size_t size() const { return instances_.size(); }
    const std::vector<Instance>& instances() const { return instances_; }

    const Instance* find(std::uint32_t id) const;
    const Instance& at(std::uint32_t id) const;
    std::uint32_t max_id() const { return max_id_; }

    // Sorted instance ids whose entity is exactly `entity_index`.
    const std::vector<std::uint32_t>& direct_instances(std::uint32_t entity_index) const;
    // Sorted ids over the subtype closure of the entity.
    std::vector<std::uint32_t> instances_of(std::string_view entity_name) const;
    std::vector<std::uint32_t> instances_of_index(std::uint32_t entity_index) const;

    // Reverse index range for `target`, sorted by (target, source, attribute).
    struct ReverseRange {
        const ReverseEntry* begin_ = nullptr;
        const ReverseEntry* end_ = nullptr;
        const ReverseEntry* begin() const { return begin_; }
        const ReverseEntry* end() const { return end_; }
        bool empty() const { return begin_ == end_; }
    };
    ReverseRange referencing(std::uint32_t target) const;

    // Construction interface used by the reader, generators and the writer
    // round-trips.  add_instance keeps ids unique; finalize() builds both
    // indexes and verifies every reference resolves.
    Model(const SchemaTable& schema) : schema_(&schema) {}
    void reserve(std::size_t n) { instances_.reserve(n); }
    Instance& add_instance(std::uint32_t id, std::uint32_t entity_index);
    void finalize();

private:
    const SchemaTable* schema_;
    std::vector<Instance> instances_;
    std::vector<std::int32_t> slot_of_;     // id -> index into instances_, -1 when absent
    std::uint32_t max_id_ = 0;
    std::vector<std::vector<std::uint32_t>> by_entity_;
    std::vector<ReverseEntry> reverse_;
    std::vector<std::uint32_t> reverse_start_;  // per id, offset into reverse_
    bool finalized_ = false;
};

}  // namespace mvd::ifc
