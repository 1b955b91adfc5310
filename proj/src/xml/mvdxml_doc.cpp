#include "mvd/xml/mvdxml.hpp"

#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace mvd::xml {

namespace {

namespace pt = boost::property_tree;

constexpr const char* kNamespace = "http://buildingsmart-tech.org/mvd/XML/1.1";
constexpr const char* kRuleMarker = "mvdlite:rule\n";
constexpr const char* kConceptMarker = "mvdlite:concept\n";

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

lang::Connective parse_operator(const std::string& value, const std::string& where) {
    std::string v = lower(value);
    if (v == "and" || v.empty()) return lang::Connective::And;
    if (v == "or") return lang::Connective::Or;
    if (v == "xor") return lang::Connective::Xor;
    if (v == "not") return lang::Connective::Not;
    throw XmlError(where + ": unknown TemplateRules operator '" + value + "'");
}

const char* operator_name(lang::Connective op) {
    switch (op) {
        case lang::Connective::And: return "and";
        case lang::Connective::Or: return "or";
        case lang::Connective::Xor: return "xor";
        case lang::Connective::Not: return "not";
    }
    return "and";
}

std::string attr(const pt::ptree& node, const char* name) {
    return node.get<std::string>(std::string("<xmlattr>.") + name, "");
}

// --- reading -------------------------------------------------------------

TemplateAttribute read_attribute_rule(const pt::ptree& node);

TemplateEntity read_entity_rule(const pt::ptree& node) {
    TemplateEntity ent;
    ent.entity = attr(node, "EntityName");
    ent.rule_id = attr(node, "RuleID");
    if (ent.entity.empty()) throw XmlError("EntityRule without EntityName");
    if (const auto rules = node.get_child_optional("AttributeRules"))
        for (const auto& [key, sub] : *rules)
            if (key == "AttributeRule") ent.attributes.push_back(read_attribute_rule(sub));
    return ent;
}

TemplateAttribute read_attribute_rule(const pt::ptree& node) {
    TemplateAttribute out;
    out.attribute = attr(node, "AttributeName");
    out.rule_id = attr(node, "RuleID");
    if (out.attribute.empty()) throw XmlError("AttributeRule without AttributeName");
    if (const auto rules = node.get_child_optional("EntityRules"))
        for (const auto& [key, sub] : *rules)
            if (key == "EntityRule") out.entities.push_back(read_entity_rule(sub));
    return out;
}

ConceptTemplate read_template(const pt::ptree& node) {
    ConceptTemplate tpl;
    tpl.uuid = attr(node, "uuid");
    tpl.name = attr(node, "name");
    tpl.code = attr(node, "code");
    tpl.applicable_schema = attr(node, "applicableSchema");
    tpl.applicable_entity = attr(node, "applicableEntity");
    if (tpl.uuid.empty()) throw XmlError("ConceptTemplate without uuid");
    if (const auto rules = node.get_child_optional("Rules"))
        for (const auto& [key, sub] : *rules)
            if (key == "AttributeRule") tpl.rules.push_back(read_attribute_rule(sub));
    return tpl;
}

TemplateRuleBlock read_template_rules(const pt::ptree& node, const std::string& where) {
    TemplateRuleBlock block;
    block.op = parse_operator(attr(node, "operator"), where);
    for (const auto& [key, sub] : node) {
        if (key == "TemplateRule") {
            RuleEntry entry;
            std::string params = attr(sub, "Parameters");
            if (params.empty()) throw XmlError(where + ": TemplateRule without Parameters");
            try {
                entry.statement = parse_statement(params);
            } catch (const StatementError& e) {
                throw XmlError(where + ": " + e.what());
            }
            entry.description = attr(sub, "Description");
            block.entries.push_back(std::move(entry));
        } else if (key == "<xmlcomment>") {
            const std::string& text = sub.data();
            if (text.rfind(kRuleMarker, 0) == 0) {
                RuleEntry entry;
                entry.is_marker = true;
                entry.marker = text.substr(std::string(kRuleMarker).size());
                block.entries.push_back(std::move(entry));
            }
        }
    }
    return block;
}

std::string read_template_ref(const pt::ptree& node) {
    if (const auto tpl = node.get_child_optional("Template")) return attr(*tpl, "ref");
    return {};
}

MvdConcept read_concept(const pt::ptree& node) {
    MvdConcept c;
    c.uuid = attr(node, "uuid");
    c.name = attr(node, "name");
    c.code = attr(node, "code");
    c.description = attr(node, "description");
    c.template_ref = read_template_ref(node);
    if (const auto reqs = node.get_child_optional("Requirements"))
        for (const auto& [key, sub] : *reqs)
            if (key == "Requirement") {
                c.requirement_ref = attr(sub, "exchangeRequirement");
                std::string severity = attr(sub, "requirement");
                if (!severity.empty()) c.severity = severity;
            }
    if (const auto rules = node.get_child_optional("TemplateRules"))
        c.rules = read_template_rules(*rules, "Concept '" + c.name + "'");
    return c;
}

ConceptRoot read_concept_root(const pt::ptree& node) {
    ConceptRoot root;
    root.uuid = attr(node, "uuid");
    root.name = attr(node, "name");
    root.code = attr(node, "code");
    root.description = attr(node, "description");
    root.applicable_root_entity = attr(node, "applicableRootEntity");
    if (root.applicable_root_entity.empty())
        throw XmlError("ConceptRoot '" + root.name + "' without applicableRootEntity");
    if (const auto app = node.get_child_optional("Applicability")) {
        root.has_applicability = true;
        root.applicability_template_ref = read_template_ref(*app);
        if (const auto rules = app->get_child_optional("TemplateRules"))
            root.applicability =
                read_template_rules(*rules, "Applicability of '" + root.name + "'");
    }
    if (const auto concepts = node.get_child_optional("Concepts"))
        for (const auto& [key, sub] : *concepts)
            if (key == "Concept") root.concepts.push_back(read_concept(sub));
    return root;
}

ModelView read_view(const pt::ptree& node) {
    ModelView view;
    view.uuid = attr(node, "uuid");
    view.name = attr(node, "name");
    view.applicable_schema = attr(node, "applicableSchema");
    if (const auto reqs = node.get_child_optional("ExchangeRequirements"))
        for (const auto& [key, sub] : *reqs)
            if (key == "ExchangeRequirement") {
                ExchangeRequirement er;
                er.uuid = attr(sub, "uuid");
                er.name = attr(sub, "name");
                std::string applicability = attr(sub, "applicability");
                if (!applicability.empty()) er.applicability = applicability;
                view.requirements.push_back(std::move(er));
            }
    if (const auto roots = node.get_child_optional("Roots"))
        for (const auto& [key, sub] : *roots) {
            if (key == "ConceptRoot") view.roots.push_back(read_concept_root(sub));
            else if (key == "<xmlcomment>") {
                const std::string& text = sub.data();
                if (text.rfind(kConceptMarker, 0) == 0)
                    view.global_markers.push_back(
                        text.substr(std::string(kConceptMarker).size()));
            }
        }
    return view;
}

// --- writing -------------------------------------------------------------

void put_attr(pt::ptree& node, const char* name, const std::string& value) {
    if (!value.empty()) node.put(std::string("<xmlattr>.") + name, value);
}

void check_comment_safe(const std::string& text) {
    if (text.find("--") != std::string::npos)
        throw XmlError("marker payload contains '--', which XML comments cannot hold");
}

void add_marker(pt::ptree& parent, const char* kind, const std::string& payload) {
    check_comment_safe(payload);
    pt::ptree comment;
    comment.put_value(std::string(kind) + payload);
    parent.add_child("<xmlcomment>", comment);
}

void write_attribute_rule(pt::ptree& parent, const TemplateAttribute& rule) {
    pt::ptree node;
    put_attr(node, "AttributeName", rule.attribute);
    put_attr(node, "RuleID", rule.rule_id);
    if (!rule.entities.empty()) {
        pt::ptree ents;
        for (const TemplateEntity& ent : rule.entities) {
            pt::ptree e;
            put_attr(e, "EntityName", ent.entity);
            put_attr(e, "RuleID", ent.rule_id);
            if (!ent.attributes.empty()) {
                pt::ptree attrs;
                for (const TemplateAttribute& sub : ent.attributes)
                    write_attribute_rule(attrs, sub);
                e.add_child("AttributeRules", attrs);
            }
            ents.add_child("EntityRule", e);
        }
        node.add_child("EntityRules", ents);
    }
    parent.add_child("AttributeRule", node);
}

void write_template_rules(pt::ptree& parent, const TemplateRuleBlock& block) {
    pt::ptree node;
    node.put("<xmlattr>.operator", operator_name(block.op));
    for (const RuleEntry& entry : block.entries) {
        if (entry.is_marker) {
            add_marker(node, kRuleMarker, entry.marker);
            continue;
        }
        pt::ptree rule;
        put_attr(rule, "Parameters", format_statement(entry.statement));
        put_attr(rule, "Description", entry.description);
        node.add_child("TemplateRule", rule);
    }
    parent.add_child("TemplateRules", node);
}

void write_template_ref(pt::ptree& parent, const std::string& uuid) {
    pt::ptree node;
    put_attr(node, "ref", uuid);
    parent.add_child("Template", node);
}

pt::ptree build_tree(const MvdXmlDoc& doc) {
    pt::ptree root;
    root.put("<xmlattr>.xmlns", kNamespace);
    put_attr(root, "uuid", doc.uuid);
    put_attr(root, "name", doc.name);

    pt::ptree templates;
    for (const ConceptTemplate& tpl : doc.templates) {
        pt::ptree node;
        put_attr(node, "uuid", tpl.uuid);
        put_attr(node, "name", tpl.name);
        put_attr(node, "code", tpl.code);
        put_attr(node, "applicableSchema", tpl.applicable_schema);
        put_attr(node, "applicableEntity", tpl.applicable_entity);
        pt::ptree rules;
        for (const TemplateAttribute& rule : tpl.rules) write_attribute_rule(rules, rule);
        node.add_child("Rules", rules);
        templates.add_child("ConceptTemplate", node);
    }
    root.add_child("Templates", templates);

    pt::ptree views;
    for (const ModelView& view : doc.views) {
        pt::ptree node;
        put_attr(node, "uuid", view.uuid);
        put_attr(node, "name", view.name);
        put_attr(node, "applicableSchema", view.applicable_schema);
        if (!view.requirements.empty()) {
            pt::ptree reqs;
            for (const ExchangeRequirement& er : view.requirements) {
                pt::ptree e;
                put_attr(e, "uuid", er.uuid);
                put_attr(e, "name", er.name);
                put_attr(e, "applicability", er.applicability);
                reqs.add_child("ExchangeRequirement", e);
            }
            node.add_child("ExchangeRequirements", reqs);
        }
        pt::ptree roots;
        for (const std::string& marker : view.global_markers)
            add_marker(roots, kConceptMarker, marker);
        for (const ConceptRoot& cr : view.roots) {
            pt::ptree r;
            put_attr(r, "uuid", cr.uuid);
            put_attr(r, "name", cr.name);
            put_attr(r, "code", cr.code);
            put_attr(r, "description", cr.description);
            put_attr(r, "applicableRootEntity", cr.applicable_root_entity);
            if (cr.has_applicability) {
                pt::ptree app;
                write_template_ref(app, cr.applicability_template_ref);
                write_template_rules(app, cr.applicability);
                r.add_child("Applicability", app);
            }
            if (!cr.concepts.empty()) {
                pt::ptree concepts;
                for (const MvdConcept& c : cr.concepts) {
                    pt::ptree cn;
                    put_attr(cn, "uuid", c.uuid);
                    put_attr(cn, "name", c.name);
                    put_attr(cn, "code", c.code);
                    put_attr(cn, "description", c.description);
                    write_template_ref(cn, c.template_ref);
                    if (!c.requirement_ref.empty()) {
                        pt::ptree reqs;
                        pt::ptree req;
                        put_attr(req, "applicability", "export");
                        put_attr(req, "requirement", c.severity);
                        put_attr(req, "exchangeRequirement", c.requirement_ref);
                        reqs.add_child("Requirement", req);
                        cn.add_child("Requirements", reqs);
                    }
                    write_template_rules(cn, c.rules);
                    concepts.add_child("Concept", cn);
                }
                r.add_child("Concepts", concepts);
            }
            roots.add_child("ConceptRoot", r);
        }
        node.add_child("Roots", roots);
        views.add_child("ModelView", node);
    }
    root.add_child("Views", views);

    pt::ptree doc_tree;
    doc_tree.add_child("mvdXML", root);
    return doc_tree;
}

// --- validation ----------------------------------------------------------

void collect_template_rule_ids(const std::vector<TemplateAttribute>& attrs,
                               std::vector<std::string>& out) {
    for (const TemplateAttribute& a : attrs) {
        if (!a.rule_id.empty()) out.push_back(a.rule_id);
        for (const TemplateEntity& e : a.entities) {
            if (!e.rule_id.empty()) out.push_back(e.rule_id);
            collect_template_rule_ids(e.attributes, out);
        }
    }
}

void check_duplicate_attributes(const std::vector<TemplateAttribute>& attrs,
                                const std::string& where, std::vector<std::string>& errors) {
    std::set<std::string> seen;
    for (const TemplateAttribute& a : attrs) {
        if (!seen.insert(a.attribute).second)
            errors.push_back(where + ": attribute '" + a.attribute +
                             "' appears twice in one AttributeRules scope");
        for (const TemplateEntity& e : a.entities)
            check_duplicate_attributes(e.attributes, where, errors);
    }
}

void check_block(const TemplateRuleBlock& block, const std::set<std::string>& rule_ids,
                 const std::string& where, std::vector<std::string>& errors) {
    for (const RuleEntry& entry : block.entries) {
        if (entry.is_marker) continue;
        for (const std::string& id : statement_rule_ids(entry.statement))
            if (!rule_ids.count(id))
                errors.push_back(where + ": statement references unknown RuleID '" + id + "'");
    }
}

}  // namespace

const ConceptTemplate* MvdXmlDoc::find_template(const std::string& uuid) const {
    for (const ConceptTemplate& tpl : templates)
        if (tpl.uuid == uuid) return &tpl;
    return nullptr;
}

MvdXmlDoc parse_mvdxml(const std::string& xml_text) {
    pt::ptree tree;
    try {
        std::istringstream in(xml_text);
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw XmlError(std::string("malformed XML: ") + e.what());
    }
    const auto root = tree.get_child_optional("mvdXML");
    if (!root) throw XmlError("document has no mvdXML root element");

    MvdXmlDoc doc;
    doc.uuid = attr(*root, "uuid");
    doc.name = attr(*root, "name");
    if (const auto templates = root->get_child_optional("Templates"))
        for (const auto& [key, sub] : *templates)
            if (key == "ConceptTemplate") doc.templates.push_back(read_template(sub));
    if (const auto views = root->get_child_optional("Views"))
        for (const auto& [key, sub] : *views)
            if (key == "ModelView") doc.views.push_back(read_view(sub));

    std::vector<std::string> errors = validate(doc);
    if (!errors.empty()) throw XmlError(errors.front());
    return doc;
}

std::string write_mvdxml(const MvdXmlDoc& doc) {
    pt::ptree tree = build_tree(doc);
    std::ostringstream out;
    pt::write_xml(out, tree, pt::xml_writer_settings<std::string>(' ', 2));
    return out.str();
}

std::vector<std::string> validate(const MvdXmlDoc& doc) {
    std::vector<std::string> errors;

    std::set<std::string> template_uuids;
    for (const ConceptTemplate& tpl : doc.templates) {
        std::string where = "template '" + tpl.name + "'";
        if (!template_uuids.insert(tpl.uuid).second)
            errors.push_back(where + ": duplicate template uuid " + tpl.uuid);
        std::vector<std::string> ids;
        collect_template_rule_ids(tpl.rules, ids);
        std::set<std::string> unique(ids.begin(), ids.end());
        if (unique.size() != ids.size())
            errors.push_back(where + ": duplicate RuleID");
        check_duplicate_attributes(tpl.rules, where, errors);
    }

    for (const ModelView& view : doc.views) {
        std::set<std::string> er_uuids;
        for (const ExchangeRequirement& er : view.requirements) er_uuids.insert(er.uuid);
        for (const ConceptRoot& cr : view.roots) {
            std::string where = "ConceptRoot '" + cr.name + "'";
            auto rule_ids_of = [&](const std::string& ref) {
                std::set<std::string> out;
                if (const ConceptTemplate* tpl = doc.find_template(ref)) {
                    std::vector<std::string> ids;
                    collect_template_rule_ids(tpl->rules, ids);
                    out.insert(ids.begin(), ids.end());
                }
                return out;
            };
            if (cr.has_applicability) {
                if (!doc.find_template(cr.applicability_template_ref))
                    errors.push_back(where + ": applicability references unknown template " +
                                     cr.applicability_template_ref);
                else
                    check_block(cr.applicability, rule_ids_of(cr.applicability_template_ref),
                                where + " applicability", errors);
            }
            for (const MvdConcept& c : cr.concepts) {
                std::string cwhere = where + " concept '" + c.name + "'";
                if (!doc.find_template(c.template_ref))
                    errors.push_back(cwhere + ": references unknown template " +
                                     c.template_ref);
                else
                    check_block(c.rules, rule_ids_of(c.template_ref), cwhere, errors);
                if (!c.requirement_ref.empty() && !er_uuids.count(c.requirement_ref))
                    errors.push_back(cwhere + ": references unknown ExchangeRequirement " +
                                     c.requirement_ref);
            }
        }
    }
    return errors;
}

std::string derived_uuid(const std::string& canonical) {
    auto fnv = [](const std::string& s, std::uint64_t h) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    };
    std::uint64_t a = fnv(canonical, 14695981039346656037ull);
    std::uint64_t b = fnv(canonical, a ^ 0x9e3779b97f4a7c15ull);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx",
                  static_cast<unsigned>(a >> 32), static_cast<unsigned>((a >> 16) & 0xffff),
                  static_cast<unsigned>(a & 0xffff), static_cast<unsigned>(b >> 48),
                  static_cast<unsigned long long>(b & 0xffffffffffffull));
    return buf;
}

}  // namespace mvd::xml
