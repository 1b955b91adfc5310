#include "mvd/engine/report.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "mvd/ifc/schema.hpp"
#include "mvd/lang/format.hpp"

namespace mvd::engine {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Prefix keys reachable by two or more rules of the same scope.  Keeping
// only these bounds cache memory: a one-off prefix would never be reused.
std::set<std::string> shared_prefix_keys(const Evaluator& ev, const lang::RuleSet& rs) {
    std::map<std::string, int> uses;
    auto add_chain = [&](const std::string& scope, const lang::Chain& chain) {
        if (lang::chain_is_global(chain)) return;
        for (std::size_t end = 1; end <= chain.segments.size(); ++end)
            uses[ev.cache_key(scope, chain, end)] += 1;
    };
    for (const lang::ConceptDef& def : rs.concepts) {
        for (const lang::Rule& r : def.definition_rules) add_chain("D:" + def.name, r.chain);
        for (const BoundRule& br : effective_constraints(rs, def))
            add_chain("C:" + def.name, br.rule->chain);
    }
    std::set<std::string> plan;
    for (const auto& [key, n] : uses)
        if (n >= 2) plan.insert(key);
    return plan;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::size_t ValidationReport::roots_checked() const {
    std::size_t n = 0;
    for (const ConceptResult& c : concepts) n += c.applicable;
    return n;
}

std::size_t ValidationReport::total_failures() const {
    std::size_t n = 0;
    for (const ConceptResult& c : concepts)
        for (const RuleResult& r : c.rules) {
            if (r.global && !r.global_passed && r.failed.empty())
                n += 1;  // rootless global failure
            else
                n += r.failed.size();
        }
    return n;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["schema"] = schema;
    j["model"] = model_name;
    j["instances"] = instance_count;
    j["options"] = {{"caching", options.caching},
                    {"pruning", options.pruning},
                    {"epsilon", options.epsilon},
                    {"threads", options.threads}};
    j["summary"] = {{"concepts", concepts.size()},
                    {"roots_checked", roots_checked()},
                    {"failures", total_failures()},
                    {"passed", passed()},
                    {"millis", millis}};
    auto arr = nlohmann::json::array();
    for (const ConceptResult& c : concepts) {
        nlohmann::json jc;
        jc["name"] = c.name;
        if (!c.uuid.empty()) jc["uuid"] = c.uuid;
        if (!c.root_entity.empty()) jc["root_entity"] = c.root_entity;
        jc["applicable"] = c.applicable;
        auto rules = nlohmann::json::array();
        for (const RuleResult& r : c.rules) {
            nlohmann::json jr;
            jr["chain"] = r.chain;
            if (!r.code.empty()) jr["code"] = r.code;
            if (!r.owner.empty()) jr["inherited_from"] = r.owner;
            if (r.global) jr["global"] = true;
            if (r.global) jr["passed"] = r.global_passed;
            jr["failed"] = r.failed;
            jr["millis"] = r.millis;
            rules.push_back(std::move(jr));
        }
        jc["rules"] = std::move(rules);
        jc["failed_roots"] = c.failed_roots;
        arr.push_back(std::move(jc));
    }
    j["concepts"] = std::move(arr);
    j["stats"] = {{"nodes_expanded", stats.nodes_expanded},
                  {"cache_hits", stats.cache_hits},
                  {"cache_misses", stats.cache_misses},
                  {"roots_failed_early", stats.roots_failed_early}};
    return j;
}

std::string ValidationReport::to_csv(const ifc::Model* model) const {
    std::string out = "concept,code,chain,instance,entity,global_id\n";
    auto row = [&](const ConceptResult& c, const RuleResult& r, std::uint32_t id) {
        std::string entity, gid;
        if (model && id != 0) {
            if (const ifc::Instance* inst = model->find(id)) {
                const ifc::EntityDef& ed = model->schema().entity(inst->entity);
                entity = ed.name;
                auto it = ed.attribute_index.find("GlobalId");
                if (it != ed.attribute_index.end() && it->second < inst->attributes.size()) {
                    const ifc::Value& v = inst->attributes[it->second];
                    if (v.is(ifc::ValueKind::Text)) gid = v.as_text();
                }
            }
        }
        out += csv_quote(c.name);
        out.push_back(',');
        out += csv_quote(r.code);
        out.push_back(',');
        out += csv_quote(r.chain);
        out.push_back(',');
        if (id != 0) out += std::to_string(id);
        out.push_back(',');
        out += csv_quote(entity);
        out.push_back(',');
        out += csv_quote(gid);
        out.push_back('\n');
    };
    for (const ConceptResult& c : concepts)
        for (const RuleResult& r : c.rules) {
            if (r.global && !r.global_passed && r.failed.empty()) {
                row(c, r, 0);
                continue;
            }
            for (std::uint32_t id : r.failed) row(c, r, id);
        }
    return out;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << "schema " << schema << ", model " << model_name << ", " << instance_count
        << " instances\n";
    out << (passed() ? "PASS" : "FAIL") << ": " << total_failures() << " failure(s) over "
        << roots_checked() << " root(s) in " << concepts.size() << " concept(s), " << millis
        << " ms\n";
    for (const ConceptResult& c : concepts) {
        out << "  " << c.name;
        if (!c.root_entity.empty())
            out << " (" << c.root_entity << "): " << (c.applicable - c.failed_roots.size()) << "/"
                << c.applicable << " passed";
        else
            out << " (global)";
        out << "\n";
        for (const RuleResult& r : c.rules) {
            bool rule_failed = r.global ? !r.global_passed : !r.failed.empty();
            if (!rule_failed) continue;
            out << "    FAIL";
            if (r.global) out << " (global)";
            if (!r.code.empty()) out << " [" << r.code << "]";
            out << " " << r.chain;
            if (!r.failed.empty()) {
                out << ":";
                std::size_t shown = std::min<std::size_t>(r.failed.size(), 8);
                for (std::size_t i = 0; i < shown; ++i) out << " #" << r.failed[i];
                if (r.failed.size() > shown)
                    out << " (+" << r.failed.size() - shown << " more)";
            }
            out << "\n";
        }
    }
    out << "  expanded " << stats.nodes_expanded << " node(s), cache " << stats.cache_hits
        << " hit(s) / " << stats.cache_misses << " miss(es), " << stats.roots_failed_early
        << " root(s) pruned early\n";
    return out.str();
}

ValidationReport validate(Evaluator& ev, const lang::RuleSet& ruleset,
                          const std::string& model_name) {
    auto t0 = Clock::now();
    ev.reset_stats();

    ValidationReport rep;
    rep.schema = ev.model().schema().schema_id();
    rep.model_name = model_name;
    rep.instance_count = ev.model().size();
    rep.options = ev.options();

    if (ev.options().caching) ev.set_cache_plan(shared_prefix_keys(ev, ruleset));

    std::vector<BoundConcept> bound = bind_concepts(ev, ruleset);
    std::vector<std::pair<std::size_t, std::size_t>> tasks;  // (concept, rule)
    for (std::size_t i = 0; i < bound.size(); ++i) {
        const BoundConcept& bc = bound[i];
        ConceptResult cr;
        cr.name = bc.def->name;
        cr.uuid = bc.def->tag.get_string("uuid");
        cr.root_entity = bc.root_entity;
        cr.applicable = bc.roots.size();
        cr.rules.resize(bc.constraints.size());
        for (std::size_t r = 0; r < bc.constraints.size(); ++r) tasks.emplace_back(i, r);
        rep.concepts.push_back(std::move(cr));
    }

    auto run_task = [&](std::size_t ci, std::size_t ri) {
        const BoundConcept& bc = bound[ci];
        const BoundRule& br = bc.constraints[ri];
        RuleResult& rr = rep.concepts[ci].rules[ri];
        rr.chain = lang::format(br.rule->chain);
        rr.code = br.rule->tag.get_string("code");
        if (br.inherited) rr.owner = br.owner->name;
        auto r0 = Clock::now();
        if (lang::chain_is_global(br.rule->chain)) {
            rr.global = true;
            rr.global_passed = ev.global_chain_passes(br.rule->chain);
            if (!rr.global_passed) rr.failed = bc.roots;
        } else {
            RootList pass = ev.passing_roots(br.rule->chain, bc.roots, "C:" + bc.def->name);
            rr.failed = root_difference(bc.roots, pass);
        }
        rr.millis = ms_since(r0);
    };

    const int workers = std::max(1, ev.options().threads);
    if (workers == 1 || tasks.size() < 2) {
        for (const auto& [ci, ri] : tasks) run_task(ci, ri);
    } else {
        std::atomic<std::size_t> next{0};
        auto drain = [&] {
            for (std::size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1))
                run_task(tasks[k].first, tasks[k].second);
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
        drain();
        for (std::thread& t : pool) t.join();
    }

    for (ConceptResult& cr : rep.concepts)
        for (const RuleResult& rr : cr.rules)
            cr.failed_roots = root_union(cr.failed_roots, rr.failed);

    rep.stats = ev.stats();
    rep.millis = ms_since(t0);
    return rep;
}

}  // namespace mvd::engine
