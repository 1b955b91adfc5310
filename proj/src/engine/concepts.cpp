#include "mvd/engine/concepts.hpp"

#include <map>
#include <string_view>

#include "mvd/ifc/schema.hpp"

namespace mvd::engine {

std::vector<BoundRule> effective_constraints(const lang::RuleSet& ruleset,
                                             const lang::ConceptDef& def) {
    // Collect the ancestor chain, outermost ancestor first.  Cycles were
    // rejected during completion.
    std::vector<const lang::ConceptDef*> line;
    const lang::ConceptDef* cur = &def;
    while (true) {
        line.push_back(cur);
        if (!cur->extends_concept) break;
        cur = ruleset.find_concept(*cur->extends);
        if (!cur) break;
    }
    std::vector<BoundRule> out;
    for (auto it = line.rbegin(); it != line.rend(); ++it)
        for (const lang::Rule& r : (*it)->constraint_rules)
            out.push_back({&r, *it, *it != &def});
    return out;
}

std::vector<BoundConcept> bind_concepts(Evaluator& ev, const lang::RuleSet& ruleset) {
    const ifc::Model& model = ev.model();
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < ruleset.concepts.size(); ++i)
        index.emplace(ruleset.concepts[i].name, i);

    std::vector<BoundConcept> bound(ruleset.concepts.size());
    std::vector<bool> done(ruleset.concepts.size(), false);

    // Parents may be declared after children; bind on demand.
    auto bind = [&](auto&& self, std::size_t i) -> const BoundConcept& {
        if (done[i]) return bound[i];
        done[i] = true;  // completion already rejected cycles
        const lang::ConceptDef& def = ruleset.concepts[i];
        BoundConcept& bc = bound[i];
        bc.def = &def;
        bc.root_entity = def.root_entity;
        if (!def.root_entity.empty()) {
            bc.roots = model.instances_of(def.root_entity);
            if (def.extends_concept) {
                auto it = index.find(std::string_view(*def.extends));
                if (it != index.end()) {
                    const BoundConcept& parent = self(self, it->second);
                    // a global-only parent has no population to narrow by
                    if (!parent.root_entity.empty())
                        bc.roots = root_intersection(parent.roots, bc.roots);
                }
            }
            for (const lang::Rule& rule : def.definition_rules)
                bc.roots = ev.passing_roots(rule.chain, bc.roots, "D:" + def.name);
        }
        bc.constraints = effective_constraints(ruleset, def);
        return bc;
    };
    for (std::size_t i = 0; i < ruleset.concepts.size(); ++i) bind(bind, i);
    return bound;
}

}  // namespace mvd::engine
