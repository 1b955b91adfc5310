#include "mvd/ifc/model.hpp"

#include <algorithm>

#include "mvd/ifc/schema.hpp"

namespace mvd::ifc {

Instance& Model::add_instance(std::uint32_t id, std::uint32_t entity_index) {
    if (id == 0) throw ModelError("instance id #0 is not allowed");
    if (id >= slot_of_.size()) slot_of_.resize(std::max<std::size_t>(id + 1, slot_of_.size() * 2), -1);
    if (slot_of_[id] >= 0) throw ModelError("duplicate instance id #" + std::to_string(id));
    slot_of_[id] = static_cast<std::int32_t>(instances_.size());
    max_id_ = std::max(max_id_, id);
    instances_.push_back(Instance{id, entity_index, {}});
    finalized_ = false;
    return instances_.back();
}

const Instance* Model::find(std::uint32_t id) const {
    if (id >= slot_of_.size() || slot_of_[id] < 0) return nullptr;
    return &instances_[static_cast<std::size_t>(slot_of_[id])];
}

const Instance& Model::at(std::uint32_t id) const {
    const Instance* inst = find(id);
    if (!inst) throw ModelError("no instance #" + std::to_string(id));
    return *inst;
}

namespace {

void collect_references(const Value& v, std::uint32_t source, std::uint32_t attribute,
                        std::vector<ReverseEntry>& out) {
    switch (v.kind()) {
        case ValueKind::Reference:
            out.push_back({v.as_reference().id, source, attribute});
            break;
        case ValueKind::List:
            for (const Value& item : v.as_list()) collect_references(item, source, attribute, out);
            break;
        case ValueKind::Typed:
            collect_references(v.as_typed().inner, source, attribute, out);
            break;
        default:
            break;
    }
}

}  // namespace

void Model::finalize() {
    by_entity_.assign(schema_->entity_count(), {});
    for (const Instance& inst : instances_) by_entity_[inst.entity].push_back(inst.id);
    for (auto& ids : by_entity_) std::sort(ids.begin(), ids.end());

    reverse_.clear();
    for (const Instance& inst : instances_)
        for (std::uint32_t a = 0; a < inst.attributes.size(); ++a)
            collect_references(inst.attributes[a], inst.id, a, reverse_);
    std::sort(reverse_.begin(), reverse_.end(), [](const ReverseEntry& a, const ReverseEntry& b) {
        if (a.target != b.target) return a.target < b.target;
        if (a.source != b.source) return a.source < b.source;
        return a.attribute < b.attribute;
    });

    for (const ReverseEntry& e : reverse_)
        if (!find(e.target))
            throw ModelError("instance #" + std::to_string(e.source) +
                             " references missing instance #" + std::to_string(e.target));

    reverse_start_.assign(static_cast<std::size_t>(max_id_) + 2, 0);
    for (const ReverseEntry& e : reverse_) ++reverse_start_[e.target + 1];
    for (std::size_t i = 1; i < reverse_start_.size(); ++i) reverse_start_[i] += reverse_start_[i - 1];
    finalized_ = true;
}

const std::vector<std::uint32_t>& Model::direct_instances(std::uint32_t entity_index) const {
    static const std::vector<std::uint32_t> empty;
    if (!finalized_ || entity_index >= by_entity_.size()) return empty;
    return by_entity_[entity_index];
}

std::vector<std::uint32_t> Model::instances_of_index(std::uint32_t entity_index) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t sub : schema_->subtype_closure(entity_index)) {
        const auto& ids = direct_instances(sub);
        out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> Model::instances_of(std::string_view entity_name) const {
    auto idx = schema_->entity_index(entity_name);
    if (!idx) return {};
    return instances_of_index(*idx);
}

Model::ReverseRange Model::referencing(std::uint32_t target) const {
    if (!finalized_ || target > max_id_) return {};
    const ReverseEntry* base = reverse_.data();
    return {base + reverse_start_[target], base + reverse_start_[target + 1]};
}

}  // namespace mvd::ifc
