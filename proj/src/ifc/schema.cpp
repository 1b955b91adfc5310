#include "mvd/ifc/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mvd::ifc {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const char* to_string(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::Integer: return "integer";
        case PrimitiveKind::Real: return "real";
        case PrimitiveKind::Text: return "string";
        case PrimitiveKind::Boolean: return "boolean";
        case PrimitiveKind::Logical: return "logical";
        case PrimitiveKind::Binary: return "binary";
        case PrimitiveKind::Enumeration: return "enum";
        case PrimitiveKind::Select: return "select";
    }
    return "?";
}

namespace {

PrimitiveKind parse_kind(const std::string& word, const std::string& origin, int line) {
    if (word == "integer") return PrimitiveKind::Integer;
    if (word == "real") return PrimitiveKind::Real;
    if (word == "string") return PrimitiveKind::Text;
    if (word == "boolean") return PrimitiveKind::Boolean;
    if (word == "logical") return PrimitiveKind::Logical;
    if (word == "binary") return PrimitiveKind::Binary;
    throw SchemaError(origin + ":" + std::to_string(line) + ": unknown type kind '" + word + "'");
}

std::vector<std::string> split_words(const std::string& line) {
    std::vector<std::string> words;
    std::istringstream in(line);
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

}  // namespace

SchemaTable SchemaTable::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open schema table: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_text(buf.str(), path);
}

SchemaTable SchemaTable::load_text(std::string_view text, const std::string& origin) {
    SchemaTable table;
    EntityDef* current = nullptr;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    bool saw_magic = false;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::vector<std::string> w = split_words(raw);
        if (w.empty()) continue;
        auto fail = [&](const std::string& msg) -> SchemaError {
            return SchemaError(origin + ":" + std::to_string(lineno) + ": " + msg);
        };

        if (!saw_magic) {
            if (w.size() != 2 || w[0] != "schema-table" || w[1] != "1")
                throw fail("expected header 'schema-table 1'");
            saw_magic = true;
            continue;
        }

        if (w[0] == "schema") {
            if (w.size() != 2) throw fail("schema line expects one identifier");
            table.schema_id_ = w[1];
        } else if (w[0] == "entity") {
            if (w.size() < 2) throw fail("entity line expects a name");
            EntityDef ent;
            ent.name = w[1];
            for (std::size_t i = 2; i < w.size(); ++i) {
                if (w[i] == "abstract") {
                    ent.is_abstract = true;
                } else if (w[i] == "supertype" && i + 1 < w.size()) {
                    ent.supertype = w[++i];
                } else {
                    throw fail("unexpected token '" + w[i] + "' on entity line");
                }
            }
            std::string lower = to_lower_ascii(ent.name);
            if (table.entity_by_lower_.count(lower)) throw fail("duplicate entity " + ent.name);
            table.entity_by_lower_[lower] = static_cast<std::uint32_t>(table.entities_.size());
            table.entities_.push_back(std::move(ent));
            current = &table.entities_.back();
        } else if (w[0] == "attr") {
            if (!current) throw fail("attr line outside entity block");
            if (w.size() < 4) throw fail("attr line expects: attr <name> <type> req|opt [list]");
            AttributeDef attr;
            attr.name = w[1];
            attr.type_name = w[2];
            if (w[3] == "opt")
                attr.optional = true;
            else if (w[3] != "req")
                throw fail("attr flag must be 'req' or 'opt'");
            if (w.size() > 4) {
                if (w[4] != "list") throw fail("trailing attr token must be 'list'");
                attr.aggregate = true;
            }
            current->own_attributes.push_back(std::move(attr));
        } else if (w[0] == "inverse") {
            if (!current) throw fail("inverse line outside entity block");
            if (w.size() != 4) throw fail("inverse line expects: inverse <name> <entity> <attr>");
            current->inverse_attributes.push_back({w[1], w[2], w[3]});
        } else if (w[0] == "type") {
            if (w.size() != 3) throw fail("type line expects: type <name> <kind>");
            DefinedTypeDef def;
            def.name = w[1];
            def.kind = parse_kind(w[2], origin, lineno);
            if (!table.defined_types_.emplace(def.name, def).second)
                throw fail("duplicate type " + def.name);
            current = nullptr;
        } else if (w[0] == "enum") {
            if (w.size() < 3) throw fail("enum line expects a name and at least one token");
            DefinedTypeDef def;
            def.name = w[1];
            def.kind = PrimitiveKind::Enumeration;
            def.members.assign(w.begin() + 2, w.end());
            if (!table.defined_types_.emplace(def.name, def).second)
                throw fail("duplicate type " + def.name);
            current = nullptr;
        } else if (w[0] == "select") {
            if (w.size() < 3) throw fail("select line expects a name and at least one member");
            DefinedTypeDef def;
            def.name = w[1];
            def.kind = PrimitiveKind::Select;
            def.members.assign(w.begin() + 2, w.end());
            if (!table.defined_types_.emplace(def.name, def).second)
                throw fail("duplicate type " + def.name);
            current = nullptr;
        } else {
            throw fail("unknown directive '" + w[0] + "'");
        }
    }
    if (!saw_magic) throw SchemaError(origin + ": empty schema table");
    if (table.schema_id_.empty()) throw SchemaError(origin + ": missing 'schema' line");
    table.finalize(origin);
    return table;
}

void SchemaTable::finalize(const std::string& origin) {
    for (const auto& [name, def] : defined_types_)
        type_by_lower_[to_lower_ascii(name)] = name;

    // Validate supertype links and compute depths (also catches cycles).
    depth_.assign(entities_.size(), UINT32_MAX);
    for (std::uint32_t i = 0; i < entities_.size(); ++i) {
        std::uint32_t steps = 0;
        std::uint32_t at = i;
        while (true) {
            const EntityDef& ent = entities_[at];
            if (!ent.supertype) break;
            auto it = entity_by_lower_.find(to_lower_ascii(*ent.supertype));
            if (it == entity_by_lower_.end())
                throw SchemaError(origin + ": entity " + ent.name + " names unknown supertype " +
                                  *ent.supertype);
            at = it->second;
            if (++steps > entities_.size())
                throw SchemaError(origin + ": supertype cycle involving " + entities_[i].name);
        }
        depth_[i] = steps;
    }

    // Effective attribute lists: supertype-first declaration order, as in
    // STEP instance records.
    for (std::uint32_t i = 0; i < entities_.size(); ++i) {
        std::vector<const EntityDef*> lineage;
        for (std::optional<std::string> up = entities_[i].name; up;) {
            const EntityDef& ent = entity(*up);
            lineage.push_back(&ent);
            up = ent.supertype;
        }
        std::reverse(lineage.begin(), lineage.end());
        EntityDef& target = entities_[i];
        for (const EntityDef* step : lineage) {
            for (const AttributeDef& a : step->own_attributes) {
                target.attribute_index[a.name] = static_cast<std::uint32_t>(target.effective_attributes.size());
                target.effective_attributes.push_back(a);
            }
            for (const InverseDef& inv : step->inverse_attributes)
                target.effective_inverses.push_back(inv);
        }
    }

    // Inverse declarations must point at a real forward attribute.
    for (const EntityDef& ent : entities_) {
        for (const InverseDef& inv : ent.inverse_attributes) {
            const EntityDef* src = find_entity(inv.source_entity);
            if (!src)
                throw SchemaError(origin + ": inverse " + ent.name + "." + inv.name +
                                  " names unknown entity " + inv.source_entity);
            if (!find_attribute(*src, inv.forward_attribute))
                throw SchemaError(origin + ": inverse " + ent.name + "." + inv.name + " names " +
                                  inv.source_entity + "." + inv.forward_attribute +
                                  " which does not exist");
        }
    }

    // Attribute and select target types must be known names.
    auto check_type = [&](const std::string& owner, const std::string& type_name) {
        if (!has_type_name(type_name))
            throw SchemaError(origin + ": " + owner + " references unknown type " + type_name);
    };
    for (const EntityDef& ent : entities_)
        for (const AttributeDef& a : ent.own_attributes) check_type(ent.name + "." + a.name, a.type_name);
    for (const auto& [name, def] : defined_types_)
        if (def.kind == PrimitiveKind::Select)
            for (const std::string& member : def.members) check_type("select " + name, member);

    closures_.assign(entities_.size(), {});
    for (std::uint32_t i = 0; i < entities_.size(); ++i)
        for (std::uint32_t j = 0; j < entities_.size(); ++j)
            if (is_subtype(j, i)) closures_[i].push_back(j);
}

const EntityDef* SchemaTable::find_entity(std::string_view name) const {
    auto it = entity_by_lower_.find(to_lower_ascii(name));
    return it == entity_by_lower_.end() ? nullptr : &entities_[it->second];
}

const EntityDef& SchemaTable::entity(std::string_view name) const {
    const EntityDef* ent = find_entity(name);
    if (!ent) throw SchemaError("unknown entity: " + std::string(name));
    return *ent;
}

std::optional<std::uint32_t> SchemaTable::entity_index(std::string_view name) const {
    auto it = entity_by_lower_.find(to_lower_ascii(name));
    if (it == entity_by_lower_.end()) return std::nullopt;
    return it->second;
}

const DefinedTypeDef* SchemaTable::find_defined_type(std::string_view name) const {
    auto it = type_by_lower_.find(to_lower_ascii(name));
    if (it == type_by_lower_.end()) return nullptr;
    return &defined_types_.at(it->second);
}

bool SchemaTable::has_type_name(std::string_view name) const {
    return find_entity(name) != nullptr || find_defined_type(name) != nullptr;
}

bool SchemaTable::is_subtype(std::uint32_t a, std::uint32_t b) const {
    while (true) {
        if (a == b) return true;
        const EntityDef& ent = entities_[a];
        if (!ent.supertype) return false;
        a = *entity_index(*ent.supertype);
    }
}

bool SchemaTable::is_subtype(std::string_view a, std::string_view b) const {
    auto ia = entity_index(a);
    auto ib = entity_index(b);
    if (!ia || !ib) throw SchemaError("is_subtype on unknown entity: " + std::string(!ia ? a : b));
    return is_subtype(*ia, *ib);
}

bool SchemaTable::matches_constraint(std::string_view type_name, std::string_view constraint) const {
    if (to_lower_ascii(type_name) == to_lower_ascii(constraint)) return true;
    auto ia = entity_index(type_name);
    auto ib = entity_index(constraint);
    if (ia && ib) return is_subtype(*ia, *ib);
    if (const DefinedTypeDef* sel = find_defined_type(constraint);
        sel && sel->kind == PrimitiveKind::Select) {
        for (const std::string& member : sel->members)
            if (matches_constraint(type_name, member)) return true;
    }
    return false;
}

const std::vector<std::uint32_t>& SchemaTable::subtype_closure(std::uint32_t index) const {
    return closures_[index];
}

std::vector<std::string> SchemaTable::select_entity_members(std::string_view select_name) const {
    std::vector<std::string> out;
    const DefinedTypeDef* sel = find_defined_type(select_name);
    if (!sel || sel->kind != PrimitiveKind::Select) return out;
    for (const std::string& member : sel->members) {
        if (find_entity(member)) {
            out.push_back(member);
        } else {
            for (std::string& nested : select_entity_members(member)) out.push_back(std::move(nested));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const AttributeDef* SchemaTable::find_attribute(const EntityDef& ent, std::string_view name) const {
    auto it = ent.attribute_index.find(std::string(name));
    return it == ent.attribute_index.end() ? nullptr : &ent.effective_attributes[it->second];
}

const InverseDef* SchemaTable::find_inverse(const EntityDef& ent, std::string_view name) const {
    for (const InverseDef& inv : ent.effective_inverses)
        if (inv.name == name) return &inv;
    return nullptr;
}

std::optional<SchemaTable::ResolvedAttribute> SchemaTable::resolve_attribute(
    std::string_view static_type, std::string_view attr_name) const {
    if (const EntityDef* ent = find_entity(static_type)) {
        if (const AttributeDef* a = find_attribute(*ent, attr_name))
            return ResolvedAttribute{a->type_name, false, a->aggregate};
        if (const InverseDef* inv = find_inverse(*ent, attr_name))
            return ResolvedAttribute{inv->source_entity, true, true};
        // Attributes declared only on subtypes still resolve: navigation
        // skips instances that lack them, so a chain may step through an
        // abstract supertype.  First declaring subtype wins.
        const std::uint32_t self = *entity_index(ent->name);
        for (std::uint32_t sub : subtype_closure(self)) {
            if (sub == self) continue;
            const EntityDef& se = entities_[sub];
            if (const AttributeDef* a = find_attribute(se, attr_name))
                return ResolvedAttribute{a->type_name, false, a->aggregate};
            if (const InverseDef* inv = find_inverse(se, attr_name))
                return ResolvedAttribute{inv->source_entity, true, true};
        }
        return std::nullopt;
    }
    // Selects: first entity member that declares the attribute wins; the
    // dynamic evaluation checks every node anyway.
    for (const std::string& member : select_entity_members(static_type))
        if (auto hit = resolve_attribute(member, attr_name)) return hit;
    return std::nullopt;
}

std::vector<std::string> SchemaTable::attribute_names(std::string_view static_type) const {
    std::vector<std::string> out;
    auto add_entity = [&](const EntityDef& ent) {
        for (const AttributeDef& a : ent.effective_attributes) out.push_back(a.name);
        for (const InverseDef& inv : ent.effective_inverses) out.push_back(inv.name);
    };
    if (const EntityDef* ent = find_entity(static_type)) {
        add_entity(*ent);
    } else {
        for (const std::string& member : select_entity_members(static_type))
            if (const EntityDef* ent = find_entity(member)) add_entity(*ent);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SchemaRepository::SchemaRepository(std::vector<std::string> search_dirs)
    : dirs_(std::move(search_dirs)) {}

void SchemaRepository::add_search_dir(const std::string& dir) { dirs_.push_back(dir); }

void SchemaRepository::register_table(SchemaTable table) {
    std::string id = table.schema_id();
    cache_.insert_or_assign(std::move(id), std::move(table));
}

const SchemaTable& SchemaRepository::get(const std::string& schema_id) {
    auto it = cache_.find(schema_id);
    if (it != cache_.end()) return it->second;
    for (const std::string& dir : dirs_) {
        std::string path = dir + "/" + schema_id + ".schema";
        std::ifstream probe(path);
        if (!probe) continue;
        probe.close();
        SchemaTable table = SchemaTable::load_file(path);
        if (to_lower_ascii(table.schema_id()) != to_lower_ascii(schema_id))
            throw SchemaError(path + ": table declares schema " + table.schema_id() +
                              " but file name promises " + schema_id);
        return cache_.emplace(schema_id, std::move(table)).first->second;
    }
    throw SchemaError("no schema table found for '" + schema_id +
                      "' (searched " + std::to_string(dirs_.size()) + " directories)");
}

}  // namespace mvd::ifc
