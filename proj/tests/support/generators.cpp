#include "support/generators.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace mvd::test {

namespace {

// --- SPF emission helpers --------------------------------------------------

std::string spf_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += '.';
    return s;
}

// Rule text wants a digit on both sides of the decimal point.
std::string rule_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

// GlobalIds only need to be distinct strings of plausible width.
std::string gid(std::uint32_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "G%021u", id);
    return buf;
}

std::string refs(const std::vector<std::uint32_t>& ids) {
    std::string s = "(";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ',';
        s += '#';
        s += std::to_string(ids[i]);
    }
    s += ')';
    return s;
}

std::string spf_header(const std::string& schema, const std::string& file_name) {
    return "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION((''),'2;1');\nFILE_NAME('" + file_name +
           "','2026-02-11T08:00:00',('generator'),('mvdlite'),'mvdlite','mvdlite','');\n"
           "FILE_SCHEMA(('" +
           schema + "'));\nENDSEC;\nDATA;\n";
}

constexpr const char* kSpfFooter = "ENDSEC;\nEND-ISO-10303-21;\n";

// Writes "#id=NAME(a,b,...);\n" into out and returns id.
class RowWriter {
public:
    explicit RowWriter(std::string& out) : out_(out) {}

    std::uint32_t row(const char* entity, const std::string& args) {
        std::uint32_t id = next_++;
        out_ += '#';
        out_ += std::to_string(id);
        out_ += '=';
        out_ += entity;
        out_ += '(';
        out_ += args;
        out_ += ");\n";
        ++rows_;
        return id;
    }

    std::uint32_t peek_id() const { return next_; }
    std::size_t rows() const { return rows_; }

private:
    std::string& out_;
    std::uint32_t next_ = 1;
    std::size_t rows_ = 0;
};

std::string q(const std::string& s) { return "'" + s + "'"; }

// --- shared literal pools (kept in sync between models and rules) ----------

const std::vector<std::string>& wall_names() {
    static const std::vector<std::string> v = {"W1", "W2", "W3", "WallA", "WallB", "Wand"};
    return v;
}
const std::vector<std::string>& door_names() {
    static const std::vector<std::string> v = {"D1", "D2", "DoorA", "DoorB"};
    return v;
}
const std::vector<std::string>& space_names() {
    static const std::vector<std::string> v = {"Kitchen", "Office", "Hall", "Lobby"};
    return v;
}
const std::vector<std::string>& pset_names() {
    static const std::vector<std::string> v = {"Pset_WallCommon", "Pset_DoorCommon",
                                               "Pset_Custom1", "Pset_Custom2", "Pset_Custom3"};
    return v;
}
const std::vector<std::string>& prop_names() {
    static const std::vector<std::string> v = {"IsExternal", "FireRating", "LoadBearing",
                                               "Reference", "Height", "Acoustic"};
    return v;
}
const std::vector<std::string>& category_names() {
    static const std::vector<std::string> v = {"LOADBEARING", "FIRE", "SHELL", "CORE",
                                               "NOTDEFINED"};
    return v;
}
const std::vector<std::string>& wall_type_names() {
    static const std::vector<std::string> v = {"SOLID", "PARTITION", "MOVABLE", "NOTDEFINED"};
    return v;
}

}  // namespace

// ===========================================================================
// random IFCMINI models

std::string random_ifcmini_model(std::uint64_t seed, int scale) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x1234567ULL);
    if (scale < 2) scale = 2;

    std::string out = spf_header("IFCMINI", "random.ifc");
    RowWriter w(out);

    auto opt_q = [&](const std::vector<std::string>& pool, double p) {
        return rng.chance(p) ? q(rng.pick(pool)) : std::string("$");
    };

    // property pool; names recur so [Unique] on ->HasProperties->Name can
    // go either way, and some values stay unset
    std::vector<std::uint32_t> props;
    int n_props = std::max(4, scale);
    for (int i = 0; i < n_props; ++i) {
        const std::string& pn = rng.pick(prop_names());
        std::string value = "$";
        if (!rng.chance(0.15)) {
            if (pn == "IsExternal" || pn == "LoadBearing")
                value = rng.chance(0.5) ? "IFCBOOLEAN(.T.)" : "IFCBOOLEAN(.F.)";
            else if (pn == "FireRating")
                value = rng.chance(0.5) ? "IFCLABEL('F30')" : "IFCLABEL('F60')";
            else if (pn == "Reference")
                value = "IFCIDENTIFIER('R-" + std::to_string(rng.range(1, 40)) + "')";
            else if (pn == "Height")
                value = "IFCREAL(" + spf_real(rng.real(2.0, 3.5)) + ")";
            else
                value = "IFCINTEGER(" + std::to_string(rng.range(30, 60)) + ")";
        }
        std::string unit = rng.chance(0.2) ? "'mm'" : "$";
        props.push_back(w.row("IFCPROPERTYSINGLEVALUE", q(gid(w.peek_id())) + "," + q(pn) + ",$," +
                                                            value + "," + unit));
    }

    // property sets pick from the pool, so instances get shared
    std::vector<std::uint32_t> psets;
    int n_psets = std::max(2, scale / 2);
    for (int i = 0; i < n_psets; ++i) {
        std::vector<std::uint32_t> members;
        int k = rng.range(1, 4);
        for (int j = 0; j < k; ++j) {
            std::uint32_t p = props[static_cast<std::size_t>(rng.below(n_props))];
            if (std::find(members.begin(), members.end(), p) == members.end())
                members.push_back(p);
        }
        psets.push_back(w.row("IFCPROPERTYSET", q(gid(w.peek_id())) + "," +
                                                    q(rng.pick(pset_names())) + ",$," +
                                                    refs(members)));
    }

    auto scores_value = [&]() -> std::string {
        if (rng.chance(0.35)) return "$";
        int k = rng.below(5);
        if (k == 0) return "()";
        static const char* pool[] = {"0.5", "1.5", "2.5", "3.5"};
        std::string lst = "(";
        for (int j = 0; j < k; ++j) {
            if (j) lst += ',';
            lst += pool[rng.below(4)];  // repeats on purpose: [Unique] needs both outcomes
        }
        return lst + ")";
    };

    std::vector<std::uint32_t> elements;
    int n_walls = std::max(2, scale);
    for (int i = 0; i < n_walls; ++i) {
        std::string args = q(gid(w.peek_id()));
        args += "," + opt_q(wall_names(), 0.8);
        args += rng.chance(0.25) ? ",'generated wall'" : ",$";
        args += rng.chance(0.2) ? ",'Basic'" : ",$";
        args += rng.chance(0.55) ? ",'T-" + std::to_string(rng.range(100, 999)) + "'" : ",$";
        args += rng.chance(0.7) ? "," + spf_real(rng.real(0.0, 5.0)) : ",$";
        args += rng.chance(0.65) ? (rng.chance(0.5) ? ",.T." : ",.F.") : ",$";
        args += rng.chance(0.5) ? ",." + rng.pick(category_names()) + "." : ",$";
        args += "," + scores_value();
        args += rng.chance(0.5) ? ",." + rng.pick(wall_type_names()) + "." : ",$";
        elements.push_back(w.row("IFCWALL", args));
    }
    int n_doors = std::max(1, scale / 2);
    for (int i = 0; i < n_doors; ++i) {
        std::string args = q(gid(w.peek_id()));
        args += "," + opt_q(door_names(), 0.8);
        args += ",$,$";
        args += rng.chance(0.4) ? ",'TD-" + std::to_string(rng.range(10, 99)) + "'" : ",$";
        args += rng.chance(0.7) ? "," + spf_real(rng.real(0.0, 5.0)) : ",$";
        args += rng.chance(0.5) ? (rng.chance(0.5) ? ",.T." : ",.F.") : ",$";
        args += rng.chance(0.3) ? ",." + rng.pick(category_names()) + "." : ",$";
        args += "," + scores_value();
        args += rng.chance(0.8) ? "," + spf_real(rng.real(1.8, 2.4)) : ",$";
        args += rng.chance(0.8) ? "," + spf_real(rng.real(0.7, 1.3)) : ",$";
        elements.push_back(w.row("IFCDOOR", args));
    }

    // type objects and typing relations (walls only)
    std::vector<std::uint32_t> wtypes;
    int n_types = rng.range(1, 3);
    for (int i = 0; i < n_types; ++i) {
        std::string set = "$";
        if (rng.chance(0.6)) {
            std::vector<std::uint32_t> tp = {psets[static_cast<std::size_t>(rng.below(n_psets))]};
            set = refs(tp);
        }
        wtypes.push_back(w.row("IFCWALLTYPE", q(gid(w.peek_id())) + ",'WT" + std::to_string(i) +
                                                  "',$," + set + ",." +
                                                  rng.pick(wall_type_names()) + "."));
    }
    std::vector<std::vector<std::uint32_t>> by_type(static_cast<std::size_t>(n_types));
    for (int i = 0; i < n_walls; ++i)
        if (rng.chance(0.7))
            by_type[static_cast<std::size_t>(rng.below(n_types))].push_back(
                elements[static_cast<std::size_t>(i)]);
    for (int t = 0; t < n_types; ++t)
        if (!by_type[static_cast<std::size_t>(t)].empty())
            w.row("IFCRELDEFINESBYTYPE", q(gid(w.peek_id())) + ",$,$," +
                                             refs(by_type[static_cast<std::size_t>(t)]) + ",#" +
                                             std::to_string(wtypes[static_cast<std::size_t>(t)]));

    // occurrence property sets; occasionally one relation covers several
    // elements at once
    for (std::uint32_t el : elements) {
        if (!rng.chance(0.6)) continue;
        std::vector<std::uint32_t> related = {el};
        w.row("IFCRELDEFINESBYPROPERTIES",
              q(gid(w.peek_id())) + ",$,$," + refs(related) + ",#" +
                  std::to_string(psets[static_cast<std::size_t>(rng.below(n_psets))]));
    }
    int extra_rels = rng.range(0, 2);
    for (int i = 0; i < extra_rels && elements.size() >= 3; ++i) {
        std::vector<std::uint32_t> related;
        for (int j = 0; j < 3; ++j) {
            std::uint32_t el = elements[static_cast<std::size_t>(rng.below(
                static_cast<int>(elements.size())))];
            if (std::find(related.begin(), related.end(), el) == related.end())
                related.push_back(el);
        }
        w.row("IFCRELDEFINESBYPROPERTIES",
              q(gid(w.peek_id())) + ",$,$," + refs(related) + ",#" +
                  std::to_string(psets[static_cast<std::size_t>(rng.below(n_psets))]));
    }

    // spaces and containment: spread part of the elements over the spaces,
    // leave the rest uncontained
    int n_spaces = std::max(1, scale / 4);
    std::vector<std::uint32_t> spaces;
    for (int i = 0; i < n_spaces; ++i) {
        std::string args = q(gid(w.peek_id()));
        args += "," + opt_q(space_names(), 0.85);
        args += ",$,$";
        args += rng.chance(0.7) ? "," + spf_real(rng.real(0.0, 9.0)) : ",$";
        spaces.push_back(w.row("IFCSPACE", args));
    }
    std::vector<std::vector<std::uint32_t>> per_space(spaces.size());
    for (std::uint32_t el : elements) {
        int slot = rng.below(n_spaces + 2);  // two phantom slots stay uncontained
        if (slot < n_spaces) per_space[static_cast<std::size_t>(slot)].push_back(el);
    }
    for (std::size_t s = 0; s < spaces.size(); ++s)
        if (!per_space[s].empty())
            w.row("IFCRELCONTAINS", q(gid(w.peek_id())) + ",$,$,#" + std::to_string(spaces[s]) +
                                        "," + refs(per_space[s]));

    out += kSpfFooter;
    return out;
}

// ===========================================================================
// random IFCMINI rulesets

namespace {

struct TemplateInfo {
    const char* feature;
    const char* root;
};

// Every entry is one grammar/evaluation feature; random_ifcmini_rules
// drains the whole table so a single generated ruleset covers them all.
constexpr TemplateInfo kTemplates[] = {
    {"value_eq", "IfcWall"},
    {"alternatives", "IfcWall"},
    {"enum_ci", "IfcWall"},
    {"deep_pset_chain", "IfcWall"},
    {"type_object_chain", "IfcWall"},
    {"compound_and", "IfcWall"},
    {"compound_or", "IfcWall"},
    {"compound_xor", "IfcWall"},
    {"compound_not", "IfcWall"},
    {"global_fragment", "IfcWall"},
    {"bare_comparator", "IfcElement"},
    {"metric_size", "IfcElement"},
    {"metric_unique", "IfcElement"},
    {"scalar_then_count", "IfcElement"},
    {"compound_map", "IfcElement"},
    {"containment_back", "IfcElement"},
    {"door_dimensions", "IfcDoor"},
    {"metric_exists", "IfcDoor"},
    {"containment_fwd", "IfcSpace"},
    {"elevation_check", "IfcSpace"},
    {"filtered_count", "IfcPropertySet"},
    {"metric_type", "IfcPropertySet"},
    {"value_unique", "IfcPropertySet"},
    {"inverse_navigation", "IfcPropertySet"},
    {"pset_size", "IfcPropertySet"},
    {"type_enum_req", "IfcWallType"},
    {"type_usage", "IfcWallType"},
};
constexpr std::size_t kTemplateCount = std::size(kTemplates);

std::string cmp_of(int k) {
    static const char* cms[] = {">", "<", ">=", "<="};
    return cms[k & 3];
}

std::string emit_template(std::size_t t, Rng& rng, std::set<std::string>& cov) {
    auto mark = [&](const char* f) { cov.insert(f); };
    mark(kTemplates[t].feature);
    switch (t) {
        case 0:  // value_eq
            return "->Name[Value]=" + q(rng.pick(wall_names()));
        case 1: {  // alternatives
            std::string s = "->Name=" + q(rng.pick(wall_names())) + "|" + q(rng.pick(wall_names()));
            if (rng.chance(0.5)) s += "|" + q(rng.pick(wall_names()));
            return s;
        }
        case 2: {  // enum_ci: lower-case string literal against an enum token
            if (rng.chance(0.5)) return "->PredefinedType='solid'";
            return "->Category='fire'";
        }
        case 3: {  // deep_pset_chain (through the occ abbreviation)
            mark("abbreviation");
            mark("name_filter");
            switch (rng.below(3)) {
                case 0:
                    return std::string("occ('Pset_WallCommon')->HasProperties('IsExternal')"
                                       "->NominalValue[Value]=") +
                           (rng.chance(0.5) ? "TRUE" : "FALSE");
                case 1:
                    return "occ('Pset_Custom1')->HasProperties('FireRating')->NominalValue[Value]="
                           + q(rng.chance(0.5) ? "F30" : "F60");
                default:
                    return "occ('Pset_Custom2')->HasProperties('Acoustic')->NominalValue" +
                           cmp_of(rng.below(4)) + std::to_string(rng.range(30, 60));
            }
        }
        case 4:  // type_object_chain with a mid-chain anchor
            mark("midchain_anchor");
            if (rng.chance(0.5))
                return "->IsTypedBy->RelatingType(IfcWallType)->PredefinedType[Exists]=TRUE";
            return "->IsTypedBy->RelatingType(IfcWallType)->PredefinedType[Value]=" +
                   q(rng.pick(wall_type_names()));
        case 5:  // compound_and
            return "(->Name[Value]=" + q(rng.pick(wall_names())) +
                   " AND ->IsExternal[Value]=" + (rng.chance(0.5) ? "TRUE)" : "FALSE)");
        case 6:  // compound_or
            return "(->Tag[Exists]=TRUE OR ->Rating" + cmp_of(rng.below(4)) +
                   rule_real(rng.real(1.0, 4.0)) + ")";
        case 7:  // compound_xor
            return "(->Name[Value]=" + q(rng.pick(wall_names())) +
                   " XOR ->Tag[Exists]=" + (rng.chance(0.5) ? "TRUE)" : "FALSE)");
        case 8:  // compound_not
            return "(NOT ->Name[Value]=" + q(rng.pick(wall_names())) + ")";
        case 9:  // global_fragment inside a compound
            return "(->Tag[Exists]=TRUE OR IfcSpace[Size]>=" + std::to_string(rng.range(1, 3)) +
                   ")";
        case 10:  // bare_comparator
            mark("real_compare");
            return "->Rating" + cmp_of(rng.below(4)) + rule_real(rng.real(0.5, 4.5));
        case 11:  // metric_size
            return "->Scores[Size]" + std::string(rng.chance(0.5) ? ">=" : "=") +
                   std::to_string(rng.range(0, 3));
        case 12:  // metric_unique
            return std::string("->Scores[Unique]=") + (rng.chance(0.5) ? "TRUE" : "FALSE");
        case 13:  // scalar filter, then a count on the survivors
            return "->Scores>" + rule_real(rng.real(0.5, 3.0)) +
                   "[Size]>=" + std::to_string(rng.range(1, 2));
        case 14: {  // compound_map over two relation attributes
            const char* op = rng.chance(0.5) ? " OR " : " XOR ";
            return std::string("(->IsDefinedBy") + op + "->IsTypedBy)->Name[Exists]=FALSE";
        }
        case 15:  // containment_back
            if (rng.chance(0.5))
                return "->ContainedIn->RelatingSpace->Name[Value]=" + q(rng.pick(space_names()));
            return "->ContainedIn[Size]=" + std::to_string(rng.range(0, 1));
        case 16:  // door_dimensions
            if (rng.chance(0.5)) return "->Height>=" + rule_real(rng.real(1.8, 2.2));
            return "->Width<" + rule_real(rng.real(1.0, 1.4));
        case 17: {  // metric_exists
            static const char* attrs[] = {"Tag", "Description", "ObjectType"};
            return std::string("->") + attrs[rng.below(3)] +
                   "[Exists]=" + (rng.chance(0.5) ? "TRUE" : "FALSE");
        }
        case 18:  // containment_fwd with explicit type constraints
            mark("explicit_type_constraint");
            if (rng.chance(0.5))
                return "->ContainsElements:IfcRelContains->RelatedElements:IfcWall"
                       "->Name[Exists]=TRUE";
            return "->ContainsElements->RelatedElements[Size]>=" + std::to_string(rng.range(1, 2));
        case 19:  // elevation_check
            if (rng.chance(0.5)) return "->Elevation[Exists]=" + std::string(rng.chance(0.5) ? "TRUE" : "FALSE");
            return "->Elevation[Value]<=" + rule_real(rng.real(2.0, 8.0));
        case 20:  // filtered_count
            mark("name_filter");
            return "->HasProperties(" + q(rng.pick(prop_names())) +
                   ")[Size]" + (rng.chance(0.5) ? ">=" : "=") + std::to_string(rng.range(0, 2));
        case 21: {  // metric_type
            static const char* types[] = {"IfcBoolean", "IfcLabel", "IfcInteger", "IfcReal"};
            return std::string("->HasProperties->NominalValue[Type]") +
                   (rng.chance(0.3) ? "!=" : "=") + q(types[rng.below(4)]);
        }
        case 22:  // value_unique
            return std::string("->HasProperties->Name[Unique]=") +
                   (rng.chance(0.5) ? "TRUE" : "FALSE");
        case 23:  // inverse_navigation
            switch (rng.below(3)) {
                case 0: return "->DefinesOccurrence->RelatedObjects[Size]>=1";
                case 1: return "->DefinesOccurrence[Size]" + std::string(rng.chance(0.5) ? ">=1" : "=0");
                default: return "->DefinesType[Exists]=" + std::string(rng.chance(0.5) ? "TRUE" : "FALSE");
            }
        case 24:  // pset_size
            return "->HasProperties[Size]<=" + std::to_string(rng.range(2, 4));
        case 25:  // type_enum_req
            if (rng.chance(0.5)) return "->PredefinedType[Exists]=TRUE";
            return "->PredefinedType[Value]=" + q(rng.pick(wall_type_names()));
        default:  // type_usage
            return "->Types->RelatedObjects[Size]>=1";
    }
}

std::string fallback_rule(Rng& rng) {
    switch (rng.below(4)) {
        case 0: return "->Name[Exists]=TRUE";
        case 1: return "->Description[Exists]=FALSE";
        case 2: return "->Name!='zzz'";
        default: return "->GlobalId[Exists]=TRUE";
    }
}

}  // namespace

const std::vector<std::string>& rule_feature_names() {
    static const std::vector<std::string> v = [] {
        std::vector<std::string> out;
        for (const TemplateInfo& t : kTemplates) out.push_back(t.feature);
        for (const char* s : {"abbreviation", "name_filter", "midchain_anchor", "real_compare",
                              "explicit_type_constraint", "global_chain", "extends",
                              "definition_rule", "tag_json", "definition_anchor"})
            out.push_back(s);
        std::sort(out.begin(), out.end());
        return out;
    }();
    return v;
}

std::string random_ifcmini_rules(std::uint64_t seed, int concept_count,
                                 std::set<std::string>* coverage) {
    Rng rng(seed ^ 0xfeedfacecafef00dULL);
    std::set<std::string> cov;

    std::string out = "schema IFCMINI\n\n";
    out += "occ as (IfcObject)->IsDefinedBy->RelatingPropertySetDefinition\n\n";

    // group the template table by root, shuffled within each group; one
    // full drain covers every feature once
    static const char* kRoots[] = {"IfcWall", "IfcElement", "IfcDoor",
                                   "IfcSpace", "IfcPropertySet", "IfcWallType"};
    int passes = std::max(1, concept_count / 9);
    std::vector<std::vector<std::size_t>> groups;
    for (const char* root : kRoots) {
        std::vector<std::size_t> g;
        for (std::size_t t = 0; t < kTemplateCount; ++t)
            for (int p = 0; p < passes; ++p)
                if (std::string_view(kTemplates[t].root) == root) g.push_back(t);
        std::shuffle(g.begin(), g.end(), rng.engine());
        groups.push_back(std::move(g));
    }

    struct Made {
        std::string name;
        std::string root;
    };
    std::vector<Made> made;
    int ci = 0;

    auto emit_concept = [&](const std::string& root, const std::vector<std::string>& rules,
                            bool extra_def_rule) {
        std::string name = "C" + std::to_string(ci++);
        if (ci % 5 == 1) {
            cov.insert("tag_json");
            out += "// {\"uuid\":\"a0b1c2d3-0000-4000-8000-" +
                   std::string(12 - std::min<std::size_t>(12, std::to_string(ci).size()), '0') +
                   std::to_string(ci) + "\"}\n";
        }
        out += "definition " + name + "\n(" + root + ")\n";
        cov.insert("definition_anchor");
        if (extra_def_rule) {
            out += fallback_rule(rng) + "\n";
            cov.insert("definition_rule");
        }
        out += "\nconstraint " + name + "\n";
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (i == 0 && ci % 2 == 1) {
                cov.insert("tag_json");
                out += "// {\"code\":\"" + name + "-" + std::to_string(i + 1) + "\"}\n";
            }
            out += rules[i] + "\n";
        }
        out += "\n";
        made.push_back({name, root});
    };

    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<std::size_t>& queue = groups[g];
        std::size_t pos = 0;
        while (pos < queue.size()) {
            std::vector<std::string> rules;
            int take = rng.range(2, 4);
            while (take-- && pos < queue.size())
                rules.push_back(emit_template(queue[pos++], rng, cov));
            emit_concept(kRoots[g], rules, ci % 3 == 2);
        }
    }

    // one child concept that narrows a parent with a definition rule
    if (!made.empty()) {
        const Made& parent = made[static_cast<std::size_t>(rng.below(
            static_cast<int>(made.size())))];
        cov.insert("extends");
        cov.insert("definition_rule");
        out += "definition CNarrow extends " + parent.name + "\n";
        out += fallback_rule(rng) + "\n\nconstraint CNarrow\n";
        out += fallback_rule(rng) + "\n";
        if (rng.chance(0.6)) out += fallback_rule(rng) + "\n";
        out += "\n";
    }

    // one global-only concept (no definition block, empty root)
    cov.insert("global_chain");
    out += "constraint GShape\n";
    out += "IfcWall[Size]>=" + std::to_string(rng.range(1, 2)) + "\n";
    out += std::string("IfcDoor[Exists]=") + (rng.chance(0.7) ? "TRUE" : "FALSE") + "\n";

    if (coverage) coverage->insert(cov.begin(), cov.end());
    return out;
}

// ===========================================================================
// random parse-stage ASTs

lang::RuleSet random_ruleset_ast(std::uint64_t seed) {
    using namespace mvd::lang;
    Rng rng(seed * 0x2545F4914F6CDD1DULL + 0x9E37ULL);
    RuleSet rs;
    if (!rng.chance(0.2)) rs.schema_id = rng.chance(0.5) ? "IFCMINI" : "IFC4";

    static const std::vector<std::string> attrs = {
        "Name", "Description", "Tag", "Rating", "Scores", "HasProperties", "NominalValue",
        "RelatingType", "RelatedObjects", "IsDefinedBy", "PredefinedType", "Elevation"};
    static const std::vector<std::string> types = {
        "IfcWall", "IfcDoor", "IfcSpace", "IfcPropertySet", "IfcWallType", "IfcElement",
        "IfcObject"};
    static const std::vector<std::string> name_lits = {"SOLID", "PARTITION", "MOVABLE",
                                                       "LOADBEARING", "UNKNOWN"};
    static const std::vector<std::string> strings = {"W1", "Pset_WallCommon", "IsExternal",
                                                     "F30", "Kitchen", "R-7"};

    auto literal = [&]() -> Literal {
        switch (rng.below(5)) {
            case 0: return Literal::string(rng.pick(strings));
            case 1: return Literal::integer(rng.range(-3, 9));
            case 2: return Literal::real(rng.range(0, 24) / 4.0);
            case 3: return Literal::boolean(rng.chance(0.5));
            default: return Literal::name(rng.pick(name_lits));
        }
    };
    auto metric = [&]() -> Segment {
        MetricSegment m;
        m.metric = static_cast<MetricKind>(rng.below(6));
        m.cmp = static_cast<Cmp>(rng.below(6));
        int nvals = rng.chance(0.2) ? rng.range(2, 3) : 1;
        for (int i = 0; i < nvals; ++i) m.values.push_back(literal());
        return m;
    };
    auto attribute = [&]() -> Segment {
        AttributeSegment a;
        a.attribute = rng.pick(attrs);
        if (rng.chance(0.3)) {
            a.type_constraint = rng.pick(types);
            a.constraint_explicit = true;
        }
        if (rng.chance(0.2)) a.name_filter = rng.pick(strings);
        return a;
    };
    auto anchor = [&]() -> Segment { return InputAnchorSegment{rng.pick(types)}; };

    auto fragment = [&]() -> Fragment {
        Fragment f;
        if (rng.chance(0.25)) {
            NameRefSegment ref;
            ref.name = rng.pick(types);
            f.segments.emplace_back(std::move(ref));
            f.segments.push_back(metric());
            return f;
        }
        f.segments.push_back(attribute());
        if (rng.chance(0.4)) f.segments.push_back(attribute());
        if (rng.chance(0.8)) f.segments.push_back(metric());
        return f;
    };
    std::function<LogicExpr(int)> logic = [&](int depth) -> LogicExpr {
        if (rng.chance(0.2)) {
            std::vector<LogicExpr> kid;
            kid.push_back(LogicExpr::make_leaf(fragment()));
            return LogicExpr::make_op(Connective::Not, std::move(kid));
        }
        Connective op = static_cast<Connective>(rng.below(3));  // And/Or/Xor
        std::vector<LogicExpr> kids;
        int n = rng.range(2, 3);
        for (int i = 0; i < n; ++i) {
            int pickk = rng.below(depth > 0 ? 8 : 6);
            if (pickk < 5) {
                kids.push_back(LogicExpr::make_leaf(fragment()));
            } else if (pickk < 6) {
                std::vector<LogicExpr> kid;
                kid.push_back(LogicExpr::make_leaf(fragment()));
                kids.push_back(LogicExpr::make_op(Connective::Not, std::move(kid)));
            } else {
                LogicExpr sub = logic(depth - 1);
                if (!sub.is_leaf && sub.op == op)
                    sub.op = op == Connective::And ? Connective::Or : Connective::And;
                kids.push_back(std::move(sub));
            }
        }
        return LogicExpr::make_op(op, std::move(kids));
    };
    auto chain = [&]() -> Chain {
        Chain c;
        int lead = rng.below(3);
        if (lead == 0) {
            c.segments.push_back(anchor());
        } else if (lead == 1) {
            NameRefSegment ref;
            ref.name = rng.pick(types);
            if (rng.chance(0.2)) ref.name_filter = rng.pick(strings);
            c.segments.emplace_back(std::move(ref));
        } else {
            c.segments.push_back(attribute());
        }
        int extra = rng.range(0, 3);
        for (int i = 0; i < extra; ++i) {
            switch (rng.below(5)) {
                case 0:
                case 1: c.segments.push_back(attribute()); break;
                case 2: c.segments.push_back(metric()); break;
                case 3: c.segments.push_back(anchor()); break;
                default: c.segments.emplace_back(CompoundSegment{logic(1)}); break;
            }
        }
        return c;
    };
    auto maybe_tag = [&](TagInfo& tag, const char* key, int serial) {
        if (!rng.chance(0.2)) return;
        tag.present = true;
        tag.data = nlohmann::json::object();
        tag.data[key] = "t" + std::to_string(serial);
    };

    int n_abbr = rng.below(3);
    for (int i = 0; i < n_abbr; ++i) {
        Abbreviation ab;
        ab.name = "ab" + std::to_string(i);
        if (rng.chance(0.5)) ab.root_type = rng.pick(types);
        int n = rng.range(1, 3);
        for (int s = 0; s < n; ++s) ab.body.push_back(attribute());
        if (rng.chance(0.3)) ab.body.push_back(metric());
        maybe_tag(ab.tag, "note", i);
        rs.abbreviations.push_back(std::move(ab));
    }

    int n_concepts = rng.range(1, 4);
    for (int i = 0; i < n_concepts; ++i) {
        ConceptDef c;
        c.name = "K" + std::to_string(i);
        if (i > 0 && rng.chance(0.25)) c.extends = "K" + std::to_string(rng.below(i));
        bool with_def = rng.chance(0.6);
        if (with_def) {
            Rule r;
            r.chain.segments.push_back(anchor());
            maybe_tag(r.tag, "code", i * 10);
            c.definition_rules.push_back(std::move(r));
            if (rng.chance(0.4)) {
                Rule r2;
                r2.chain = chain();
                c.definition_rules.push_back(std::move(r2));
            }
        }
        int n_rules = rng.range(0, 3);
        if (!with_def && !c.extends && n_rules == 0) n_rules = 1;
        for (int r = 0; r < n_rules; ++r) {
            Rule rule;
            rule.chain = chain();
            maybe_tag(rule.tag, "code", i * 10 + r + 1);
            c.constraint_rules.push_back(std::move(rule));
        }
        maybe_tag(c.tag, "uuid", i);
        rs.concepts.push_back(std::move(c));
    }
    return rs;
}

// ===========================================================================
// big synthetic IFC4 building

std::size_t write_big_ifc4_model(const std::string& path, std::size_t wall_count,
                                 std::uint64_t seed) {
    Rng rng(seed + 0xb16b00b5ULL);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);

    std::string out = spf_header("IFC4", "big.ifc");
    RowWriter w(out);
    auto flush = [&] {
        file << out;
        out.clear();
    };

    // actors, units, context
    std::uint32_t org = w.row("IFCORGANIZATION", "$,'Acme Models',$,$,$");
    std::uint32_t person = w.row("IFCPERSON", "$,'Doe','Jan',$,$,$,$,$");
    std::uint32_t pao = w.row("IFCPERSONANDORGANIZATION",
                              "#" + std::to_string(person) + ",#" + std::to_string(org) + ",$");
    std::uint32_t app = w.row("IFCAPPLICATION",
                              "#" + std::to_string(org) + ",'1.0','Synthetic Builder','sbuild'");
    std::uint32_t oh = w.row("IFCOWNERHISTORY", "#" + std::to_string(pao) + ",#" +
                                                    std::to_string(app) +
                                                    ",$,.ADDED.,$,$,$,1700000000");
    const std::string ohr = ",#" + std::to_string(oh) + ",";

    std::uint32_t dim = w.row("IFCDIMENSIONALEXPONENTS", "1,0,0,0,0,0,0");
    std::uint32_t si_len = w.row("IFCSIUNIT", "#" + std::to_string(dim) + ",.LENGTHUNIT.,$,.METRE.");
    std::uint32_t si_area =
        w.row("IFCSIUNIT", "#" + std::to_string(dim) + ",.AREAUNIT.,$,.SQUARE_METRE.");
    std::uint32_t si_vol =
        w.row("IFCSIUNIT", "#" + std::to_string(dim) + ",.VOLUMEUNIT.,$,.CUBIC_METRE.");
    std::uint32_t units = w.row("IFCUNITASSIGNMENT", "(#" + std::to_string(si_len) + ",#" +
                                                         std::to_string(si_area) + ",#" +
                                                         std::to_string(si_vol) + ")");

    std::uint32_t origin = w.row("IFCCARTESIANPOINT", "(0.,0.,0.)");
    std::uint32_t dir_z = w.row("IFCDIRECTION", "(0.,0.,1.)");
    std::uint32_t dir_x = w.row("IFCDIRECTION", "(1.,0.,0.)");
    std::uint32_t wcs = w.row("IFCAXIS2PLACEMENT3D", "#" + std::to_string(origin) + ",#" +
                                                          std::to_string(dir_z) + ",#" +
                                                          std::to_string(dir_x));
    std::uint32_t ctx =
        w.row("IFCGEOMETRICREPRESENTATIONCONTEXT",
              "$,'Model',3,1.0E-5,#" + std::to_string(wcs) + ",#" + std::to_string(dir_x));
    const std::string ctxr = "#" + std::to_string(ctx);

    // spatial spine
    std::uint32_t project = w.row(
        "IFCPROJECT", q(gid(w.peek_id())) + ohr + "'Big model',$,$,'Synthetic tower',$,(" + ctxr +
                          "),#" + std::to_string(units));
    std::uint32_t site_lp = w.row("IFCLOCALPLACEMENT", "$,#" + std::to_string(wcs));
    std::uint32_t site =
        w.row("IFCSITE", q(gid(w.peek_id())) + ohr + "'Site',$,$,#" + std::to_string(site_lp) +
                             ",$,$,.ELEMENT.,$,$,0.,$,$");
    std::uint32_t bldg_lp =
        w.row("IFCLOCALPLACEMENT", "#" + std::to_string(site_lp) + ",#" + std::to_string(wcs));
    std::uint32_t bldg =
        w.row("IFCBUILDING", q(gid(w.peek_id())) + ohr + "'Building',$,$,#" +
                                 std::to_string(bldg_lp) + ",$,$,.ELEMENT.,0.,$,$");
    w.row("IFCRELAGGREGATES",
          q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(project) + ",(#" +
              std::to_string(site) + ")");
    w.row("IFCRELAGGREGATES", q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(site) + ",(#" +
                                  std::to_string(bldg) + ")");

    // a few wall types shared by everything
    static const char* kTypeEnums[] = {".SOLIDWALL.", ".STANDARD.", ".PARTITIONING.", ".SHEAR."};
    std::array<std::uint32_t, 4> wall_types{};
    for (int t = 0; t < 4; ++t)
        wall_types[static_cast<std::size_t>(t)] =
            w.row("IFCWALLTYPE", q(gid(w.peek_id())) + ohr + "'WT-" + std::to_string(t) +
                                     "',$,$,$,$,$,$," + kTypeEnums[t]);

    // one material layer set used by all storeys
    std::uint32_t mat = w.row("IFCMATERIAL", "'Concrete',$,$");
    std::uint32_t layer =
        w.row("IFCMATERIALLAYER", "#" + std::to_string(mat) + ",0.3,.U.,'Core',$,$,$");
    std::uint32_t layer_set =
        w.row("IFCMATERIALLAYERSET", "(#" + std::to_string(layer) + "),'WallLayers',$");
    std::uint32_t usage = w.row("IFCMATERIALLAYERSETUSAGE",
                                "#" + std::to_string(layer_set) + ",.AXIS2.,.POSITIVE.,0.,$");

    const std::size_t per_storey = 800;
    std::size_t storeys = (wall_count + per_storey - 1) / per_storey;
    if (storeys == 0) storeys = 1;
    std::vector<std::uint32_t> storey_ids;

    std::size_t made_walls = 0;
    std::size_t door_serial = 0;
    for (std::size_t s = 0; s < storeys; ++s) {
        std::uint32_t s_lp =
            w.row("IFCLOCALPLACEMENT", "#" + std::to_string(bldg_lp) + ",#" + std::to_string(wcs));
        std::uint32_t storey = w.row(
            "IFCBUILDINGSTOREY", q(gid(w.peek_id())) + ohr + "'Storey-" + std::to_string(s) +
                                     "',$,$,#" + std::to_string(s_lp) + ",$,$,.ELEMENT.," +
                                     spf_real(3.0 * static_cast<double>(s)));
        storey_ids.push_back(storey);

        std::vector<std::uint32_t> contained;
        std::array<std::vector<std::uint32_t>, 4> typed{};
        std::vector<std::uint32_t> material_walls;

        std::size_t quota = std::min(per_storey, wall_count - made_walls);
        for (std::size_t k = 0; k < quota; ++k) {
            std::size_t i = made_walls++;
            double x = rng.real(0.0, 80.0);
            double y = rng.real(0.0, 40.0);
            double len = rng.real(2.0, 8.0);

            std::uint32_t pt = w.row("IFCCARTESIANPOINT",
                                     "(" + spf_real(x) + "," + spf_real(y) + ",0.)");
            std::uint32_t a2p = w.row("IFCAXIS2PLACEMENT3D", "#" + std::to_string(pt) + ",#" +
                                                                 std::to_string(dir_z) + ",#" +
                                                                 std::to_string(dir_x));
            std::uint32_t lp = w.row("IFCLOCALPLACEMENT",
                                     "#" + std::to_string(s_lp) + ",#" + std::to_string(a2p));
            std::uint32_t p1 = w.row("IFCCARTESIANPOINT", "(0.,0.)");
            std::uint32_t p2 = w.row("IFCCARTESIANPOINT", "(" + spf_real(len) + ",0.)");
            std::uint32_t poly =
                w.row("IFCPOLYLINE", "(#" + std::to_string(p1) + ",#" + std::to_string(p2) + ")");
            std::uint32_t axis_rep =
                w.row("IFCSHAPEREPRESENTATION",
                      ctxr + ",'Axis','Curve2D',(#" + std::to_string(poly) + ")");
            std::uint32_t prof = w.row("IFCRECTANGLEPROFILEDEF",
                                       ".AREA.,$,$," + spf_real(len) + ",0.3");
            std::uint32_t solid =
                w.row("IFCEXTRUDEDAREASOLID",
                      "#" + std::to_string(prof) + ",$,#" + std::to_string(dir_z) + ",2.7");
            std::uint32_t body_rep =
                w.row("IFCSHAPEREPRESENTATION",
                      ctxr + ",'Body','SweptSolid',(#" + std::to_string(solid) + ")");
            std::uint32_t pds =
                w.row("IFCPRODUCTDEFINITIONSHAPE",
                      "$,$,(#" + std::to_string(axis_rep) + ",#" + std::to_string(body_rep) + ")");

            // sprinkle rule violations at fixed strides
            std::string name = i % 97 == 13 ? "$" : q("Wall-" + std::to_string(i));
            std::string tag = i % 131 == 40 ? "$" : q("T-" + std::to_string(i));
            const char* ptype = i % 113 == 7 ? ".MOVABLE." : kTypeEnums[i % 2];
            std::uint32_t wall = w.row(
                "IFCWALLSTANDARDCASE", q(gid(w.peek_id())) + ohr + name + ",$,$,#" +
                                           std::to_string(lp) + ",#" + std::to_string(pds) + "," +
                                           tag + "," + ptype);
            contained.push_back(wall);
            typed[i % 4].push_back(wall);
            material_walls.push_back(wall);

            std::uint32_t pr1 = w.row(
                "IFCPROPERTYSINGLEVALUE",
                std::string("'IsExternal',$,IFCBOOLEAN(") + (i % 89 == 21 ? ".F." : ".T.") + "),$");
            std::uint32_t pr2 = w.row("IFCPROPERTYSINGLEVALUE",
                                      std::string("'FireRating',$,IFCLABEL(") +
                                          (i % 3 ? "'F60'" : "'F90'") + "),$");
            std::uint32_t pr3 = w.row("IFCPROPERTYSINGLEVALUE",
                                      std::string("'LoadBearing',$,IFCBOOLEAN(") +
                                          (i % 4 ? ".T." : ".F.") + "),$");
            std::uint32_t pset = w.row(
                "IFCPROPERTYSET", q(gid(w.peek_id())) + ohr + "'Pset_WallCommon',$,(#" +
                                      std::to_string(pr1) + ",#" + std::to_string(pr2) + ",#" +
                                      std::to_string(pr3) + ")");
            w.row("IFCRELDEFINESBYPROPERTIES", q(gid(w.peek_id())) + ohr + "$,$,(#" +
                                                   std::to_string(wall) + "),#" +
                                                   std::to_string(pset));

            std::uint32_t q1 = w.row("IFCQUANTITYLENGTH", "'Length',$,$," + spf_real(len) + ",$");
            std::uint32_t q2 = w.row("IFCQUANTITYAREA",
                                     "'NetSideArea',$,$," + spf_real(len * 2.7) + ",$");
            std::uint32_t q3 = w.row("IFCQUANTITYVOLUME",
                                     "'NetVolume',$,$," + spf_real(len * 2.7 * 0.3) + ",$");
            std::uint32_t qto = w.row(
                "IFCELEMENTQUANTITY", q(gid(w.peek_id())) + ohr +
                                          "'Qto_WallBaseQuantities',$,$,(#" + std::to_string(q1) +
                                          ",#" + std::to_string(q2) + ",#" + std::to_string(q3) +
                                          ")");
            w.row("IFCRELDEFINESBYPROPERTIES", q(gid(w.peek_id())) + ohr + "$,$,(#" +
                                                   std::to_string(wall) + "),#" +
                                                   std::to_string(qto));

            // every sixth wall hosts a door in an opening
            if (i % 6 == 3) {
                std::size_t d = door_serial++;
                std::uint32_t opening =
                    w.row("IFCOPENINGELEMENT", q(gid(w.peek_id())) + ohr + "'Opening-" +
                                                   std::to_string(d) + "',$,$,#" +
                                                   std::to_string(lp) + ",$,$,.OPENING.");
                w.row("IFCRELVOIDSELEMENT", q(gid(w.peek_id())) + ohr + "$,$,#" +
                                                std::to_string(wall) + ",#" +
                                                std::to_string(opening));
                std::string height = spf_real(d % 54 == 33 ? 1.9 : 2.1);
                std::uint32_t door = w.row(
                    "IFCDOOR", q(gid(w.peek_id())) + ohr + "'Door-" + std::to_string(d) +
                                   "',$,$,#" + std::to_string(lp) + ",$,'TD-" + std::to_string(d) +
                                   "'," + height + ",0.9,.DOOR.,.SINGLE_SWING_LEFT.,$");
                w.row("IFCRELFILLSELEMENT", q(gid(w.peek_id())) + ohr + "$,$,#" +
                                                std::to_string(opening) + ",#" +
                                                std::to_string(door));
                std::uint32_t dp = w.row("IFCPROPERTYSINGLEVALUE",
                                         "'FireRating',$,IFCLABEL('F30'),$");
                std::uint32_t dpset =
                    w.row("IFCPROPERTYSET", q(gid(w.peek_id())) + ohr + "'Pset_DoorCommon',$,(#" +
                                                std::to_string(dp) + ")");
                w.row("IFCRELDEFINESBYPROPERTIES", q(gid(w.peek_id())) + ohr + "$,$,(#" +
                                                       std::to_string(door) + "),#" +
                                                       std::to_string(dpset));
                contained.push_back(door);
            }
            if (out.size() > (1u << 20)) flush();
        }

        w.row("IFCRELCONTAINEDINSPATIALSTRUCTURE",
              q(gid(w.peek_id())) + ohr + "$,$," + refs(contained) + ",#" + std::to_string(storey));
        for (int t = 0; t < 4; ++t)
            if (!typed[static_cast<std::size_t>(t)].empty())
                w.row("IFCRELDEFINESBYTYPE",
                      q(gid(w.peek_id())) + ohr + "$,$," + refs(typed[static_cast<std::size_t>(t)]) +
                          ",#" + std::to_string(wall_types[static_cast<std::size_t>(t)]));
        w.row("IFCRELASSOCIATESMATERIAL",
              q(gid(w.peek_id())) + ohr + "$,$," + refs(material_walls) + ",#" +
                  std::to_string(usage));
        flush();
    }

    w.row("IFCRELAGGREGATES",
          q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(bldg) + "," + refs(storey_ids));
    out += kSpfFooter;
    flush();
    file.close();
    return w.rows();
}

std::string big_ifc4_rules() {
    // 58 constraint rules matching the layout written by
    // write_big_ifc4_model; a handful fail on the sprinkled deviations.
    return R"(schema IFC4

ops as (IfcObject)->IsDefinedBy->RelatingPropertySetDefinition

definition WallBasics
(IfcWallStandardCase)

constraint WallBasics
->Name[Exists]=TRUE
->Name!='Wall-unnamed'
->Tag[Exists]=TRUE
->PredefinedType[Exists]=TRUE
->PredefinedType='SOLIDWALL'|'STANDARD'|'PARTITIONING'
->ObjectType[Exists]=FALSE
(->Name[Exists]=TRUE AND ->Tag[Exists]=TRUE)

definition WallPsets
(IfcWallStandardCase)

constraint WallPsets
ops('Pset_WallCommon')[Exists]=TRUE
ops('Pset_WallCommon')->HasProperties[Size]=3
ops('Pset_WallCommon')->HasProperties('IsExternal')[Size]=1
ops('Pset_WallCommon')->HasProperties('IsExternal')->NominalValue[Type]='IfcBoolean'
ops('Pset_WallCommon')->HasProperties('IsExternal')->NominalValue[Value]=TRUE
ops('Pset_WallCommon')->HasProperties('FireRating')->NominalValue[Exists]=TRUE
ops('Pset_WallCommon')->HasProperties('LoadBearing')->NominalValue[Type]='IfcBoolean'
ops('Pset_WallCommon')->HasProperties->Name[Unique]=TRUE

definition WallQuantities
(IfcWallStandardCase)

constraint WallQuantities
ops(IfcElementQuantity)->Quantities[Size]=3
ops(IfcElementQuantity)->Quantities:IfcQuantityLength('Length')->LengthValue>0.0
ops(IfcElementQuantity)->Quantities:IfcQuantityArea('NetSideArea')->AreaValue>0.0
ops(IfcElementQuantity)->Quantities:IfcQuantityVolume('NetVolume')->VolumeValue>0.0
ops(IfcElementQuantity)->Quantities->Name[Unique]=TRUE
ops(IfcElementQuantity)->MethodOfMeasurement[Exists]=FALSE

definition WallShape
(IfcWallStandardCase)

constraint WallShape
->ObjectPlacement[Exists]=TRUE
->ObjectPlacement[Type]='IfcLocalPlacement'
->Representation[Exists]=TRUE
->Representation->Representations[Size]=2
->Representation->Representations->RepresentationIdentifier='Axis'|'Body'
->Representation->Representations(->RepresentationIdentifier[Value]='Body')->RepresentationType[Value]='SweptSolid'
->HasAssociations:IfcRelAssociatesMaterial->RelatingMaterial:IfcMaterialLayerSetUsage->ForLayerSet->MaterialLayers[Size]>=1
->HasAssociations:IfcRelAssociatesMaterial->RelatingMaterial:IfcMaterialLayerSetUsage->ForLayerSet->MaterialLayers->LayerThickness>0.0

definition WallTyping
(IfcWallStandardCase)

constraint WallTyping
->IsTypedBy[Size]=1
->IsTypedBy->RelatingType[Type]='IfcWallType'
->IsTypedBy->RelatingType:IfcWallType->PredefinedType[Exists]=TRUE
->IsTypedBy->RelatingType:IfcWallType->Types->RelatedObjects[Size]>=1

definition DoorBasics
(IfcDoor)

constraint DoorBasics
->OverallHeight[Exists]=TRUE
->OverallHeight>=2.0
->OverallWidth>=0.8
->PredefinedType='DOOR'
->OperationType[Exists]=TRUE
ops('Pset_DoorCommon')->HasProperties('FireRating')->NominalValue[Exists]=TRUE
(->OverallHeight>=2.0 AND ->OverallWidth>=0.8)

definition OpeningFill
(IfcOpeningElement)

constraint OpeningFill
->HasFillings[Size]=1
->HasFillings->RelatedBuildingElement[Type]='IfcDoor'
->PredefinedType='OPENING'

definition SpatialTree
(IfcBuildingStorey)

constraint SpatialTree
->Elevation[Exists]=TRUE
->ContainsElements[Size]>=1
->ContainsElements->RelatedElements[Size]>=1
->Decomposes->RelatingObject[Type]='IfcBuilding'
->CompositionType[Exists]=TRUE

definition SiteShape
(IfcSite)

constraint SiteShape
->Decomposes->RelatingObject[Type]='IfcProject'
->IsDecomposedBy->RelatedObjects[Type]='IfcBuilding'
->CompositionType[Value]='ELEMENT'

constraint ModelShape
IfcProject[Size]=1
IfcSite[Size]=1
IfcBuilding[Size]=1
IfcGeometricRepresentationContext[Exists]=TRUE
IfcWallStandardCase[Size]>=100
IfcOpeningElement[Exists]=TRUE
IfcWindow[Exists]=FALSE
)";
}

// ===========================================================================
// cache / prune stress pair

std::string caching_stress_model(std::uint64_t seed, int elements, int kinds,
                                 int props_per_pset) {
    Rng rng(seed + 0xcac4eULL);
    std::string out = spf_header("IFCMINI", "stress.ifc");
    RowWriter w(out);
    out.reserve(static_cast<std::size_t>(elements) * 140 + 65536);

    // per kind: one type-level property set behind a wall type, and one
    // shared occurrence property set
    std::vector<std::uint32_t> wall_types, occ_psets;
    for (int k = 0; k < kinds; ++k) {
        std::vector<std::uint32_t> tprops;
        for (int j = 0; j < props_per_pset; ++j) {
            double v = ((k * 31 + j * 17) % 100) / 10.0;
            tprops.push_back(w.row("IFCPROPERTYSINGLEVALUE",
                                   q(gid(w.peek_id())) + ",'P" + std::to_string(j) +
                                       "',$,IFCREAL(" + spf_real(v) + "),$"));
        }
        std::uint32_t tpset = w.row("IFCPROPERTYSET", q(gid(w.peek_id())) + ",'TPset_K" +
                                                          std::to_string(k) + "',$," +
                                                          refs(tprops));
        wall_types.push_back(w.row("IFCWALLTYPE", q(gid(w.peek_id())) + ",'WT" +
                                                      std::to_string(k) + "',$,(#" +
                                                      std::to_string(tpset) + "),.SOLID."));

        std::vector<std::uint32_t> oprops;
        for (int j = 0; j < props_per_pset; ++j) {
            double v = ((k * 13 + j * 29) % 100) / 10.0;
            oprops.push_back(w.row("IFCPROPERTYSINGLEVALUE",
                                   q(gid(w.peek_id())) + ",'Q" + std::to_string(j) +
                                       "',$,IFCREAL(" + spf_real(v) + "),$"));
        }
        occ_psets.push_back(w.row("IFCPROPERTYSET", q(gid(w.peek_id())) + ",'OPset_K" +
                                                        std::to_string(k) + "',$," +
                                                        refs(oprops)));
    }

    std::vector<std::vector<std::uint32_t>> by_kind(static_cast<std::size_t>(kinds));
    for (int i = 0; i < elements; ++i) {
        int k = i % kinds;
        std::string tag = i % 50 == 0 ? q("T" + std::to_string(i)) : "$";
        std::uint32_t wall =
            w.row("IFCWALL", q(gid(w.peek_id())) + ",'W" + std::to_string(k) + "_" +
                                 std::to_string(i) + "',$,$," + tag + "," +
                                 spf_real(rng.real(0.0, 10.0)) + ",$,$,$,$");
        by_kind[static_cast<std::size_t>(k)].push_back(wall);
        w.row("IFCRELDEFINESBYPROPERTIES",
              q(gid(w.peek_id())) + ",$,$,(#" + std::to_string(wall) + "),#" +
                  std::to_string(occ_psets[static_cast<std::size_t>(k)]));
    }
    for (int k = 0; k < kinds; ++k)
        if (!by_kind[static_cast<std::size_t>(k)].empty())
            w.row("IFCRELDEFINESBYTYPE", q(gid(w.peek_id())) + ",$,$," +
                                             refs(by_kind[static_cast<std::size_t>(k)]) + ",#" +
                                             std::to_string(wall_types[static_cast<std::size_t>(k)]));

    out += kSpfFooter;
    return out;
}

std::string caching_stress_rules(int kinds, int rules_per_kind, int props_per_pset) {
    std::string out = "schema IFCMINI\n\n";
    out += "tps as (IfcWall)->IsTypedBy->RelatingType:IfcWallType->HasPropertySets\n\n";

    // family A: many rules sharing one expensive navigation prefix, so a
    // result cache pays off
    out += "definition Stress\n(IfcWall)\n\nconstraint Stress\n";
    static const char* cms[] = {">=", "<", ">"};
    int n_shared = kinds * rules_per_kind;
    for (int r = 0; r < n_shared; ++r) {
        double t = ((r * 13) % 90) / 10.0;
        out += "tps->HasProperties('P" + std::to_string(r % props_per_pset) + "')->NominalValue" +
               cms[r % 3] + rule_real(t) + "\n";
    }

    // family B: each rule filters hard up front, so pruning pays off; the
    // filters differ per rule to keep the cache out of the picture
    out += "\ndefinition Narrow\n(IfcWall)\n\nconstraint Narrow\n";
    int n_narrow = std::max(8, kinds);
    for (int r = 0; r < n_narrow; ++r) {
        double t = 9.0 + (r % 10) * 0.07 + r * 0.0003;
        out += "(->Rating>=" + rule_real(t) +
               ")->IsDefinedBy->RelatingPropertySetDefinition->HasProperties[Size]=" +
               std::to_string(props_per_pset) + "\n";
    }
    return out;
}

// ===========================================================================
// paired fixture, one building in two schema dialects

std::string paired_model_text(const std::string& schema_id) {
    const bool v4 = schema_id == "IFC4";
    if (!v4 && schema_id != "IFC2X3")
        throw std::invalid_argument("paired_model_text: unknown schema " + schema_id);

    std::string out = spf_header(schema_id, "fixb.ifc");
    RowWriter w(out);

    std::uint32_t org = w.row("IFCORGANIZATION", "$,'Acme Models',$,$,$");
    std::uint32_t person = w.row("IFCPERSON", "$,'Doe','Jan',$,$,$,$,$");
    std::uint32_t pao = w.row("IFCPERSONANDORGANIZATION",
                              "#" + std::to_string(person) + ",#" + std::to_string(org) + ",$");
    std::uint32_t app = w.row("IFCAPPLICATION",
                              "#" + std::to_string(org) + ",'1.0','Synthetic Builder','sbuild'");
    std::uint32_t oh = w.row("IFCOWNERHISTORY", "#" + std::to_string(pao) + ",#" +
                                                    std::to_string(app) +
                                                    ",$,.ADDED.,$,$,$,1700000000");
    const std::string ohr = ",#" + std::to_string(oh) + ",";

    std::uint32_t dim = w.row("IFCDIMENSIONALEXPONENTS", "1,0,0,0,0,0,0");
    std::uint32_t si = w.row("IFCSIUNIT", "#" + std::to_string(dim) + ",.LENGTHUNIT.,$,.METRE.");
    std::uint32_t units = w.row("IFCUNITASSIGNMENT", "(#" + std::to_string(si) + ")");
    std::uint32_t origin = w.row("IFCCARTESIANPOINT", "(0.,0.,0.)");
    std::uint32_t dz = w.row("IFCDIRECTION", "(0.,0.,1.)");
    std::uint32_t dx = w.row("IFCDIRECTION", "(1.,0.,0.)");
    std::uint32_t wcs = w.row("IFCAXIS2PLACEMENT3D", "#" + std::to_string(origin) + ",#" +
                                                          std::to_string(dz) + ",#" +
                                                          std::to_string(dx));
    std::uint32_t ctx = w.row("IFCGEOMETRICREPRESENTATIONCONTEXT",
                              "$,'Model',3,1.0E-5,#" + std::to_string(wcs) + ",$");

    std::uint32_t project =
        w.row("IFCPROJECT", q(gid(w.peek_id())) + ohr + "'FixB',$,$,'Paired fixture',$,(#" +
                                std::to_string(ctx) + "),#" + std::to_string(units));
    std::uint32_t site = w.row("IFCSITE", q(gid(w.peek_id())) + ohr +
                                              "'Site',$,$,$,$,$,.ELEMENT.,$,$,$,$,$");
    std::uint32_t bldg = w.row("IFCBUILDING", q(gid(w.peek_id())) + ohr +
                                                  "'Building',$,$,$,$,$,.ELEMENT.,$,$,$");
    std::vector<std::uint32_t> storeys;
    for (int s = 0; s < 2; ++s)
        storeys.push_back(w.row("IFCBUILDINGSTOREY",
                                q(gid(w.peek_id())) + ohr + "'Level-" + std::to_string(s + 1) +
                                    "',$,$,$,$,$,.ELEMENT.," + spf_real(3.0 * s)));
    w.row("IFCRELAGGREGATES", q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(project) +
                                  ",(#" + std::to_string(site) + ")");
    w.row("IFCRELAGGREGATES", q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(site) + ",(#" +
                                  std::to_string(bldg) + ")");
    w.row("IFCRELAGGREGATES",
          q(gid(w.peek_id())) + ohr + "$,$,#" + std::to_string(bldg) + "," + refs(storeys));

    // INTERNAL is a valid token for the space enum of either schema
    std::vector<std::uint32_t> spaces;
    for (int s = 0; s < 2; ++s) {
        spaces.push_back(w.row("IFCSPACE", q(gid(w.peek_id())) + ohr + "'Room-" +
                                               std::to_string(s + 1) +
                                               "',$,$,$,$,$,.ELEMENT.,.INTERNAL.,$"));
        w.row("IFCRELAGGREGATES", q(gid(w.peek_id())) + ohr + "$,$,#" +
                                      std::to_string(storeys[static_cast<std::size_t>(s)]) +
                                      ",(#" + std::to_string(spaces.back()) + ")");
    }

    int wall_serial = 0;
    for (int s = 0; s < 2; ++s) {
        std::vector<std::uint32_t> contained;
        for (int k = 0; k < 3; ++k) {
            int n = ++wall_serial;
            // wall #4 loses its name, wall #3 its tag: rule fodder
            std::string name = n == 4 ? "$" : q("WB-" + std::to_string(n));
            std::string tag = n == 3 ? "$" : q("TB-" + std::to_string(n));
            std::string args = q(gid(w.peek_id())) + ohr + name + ",$,$,$,$," + tag;
            if (v4) args += ",.SOLIDWALL.";
            std::uint32_t wall = w.row("IFCWALL", args);
            contained.push_back(wall);

            std::uint32_t pr1 = w.row("IFCPROPERTYSINGLEVALUE",
                                      std::string("'IsExternal',$,IFCBOOLEAN(") +
                                          (n % 2 ? ".T." : ".F.") + "),$");
            std::uint32_t pr2 = w.row("IFCPROPERTYSINGLEVALUE",
                                      "'FireRating',$,IFCLABEL('F60'),$");
            std::uint32_t pset = w.row("IFCPROPERTYSET",
                                       q(gid(w.peek_id())) + ohr + "'Pset_WallCommon',$,(#" +
                                           std::to_string(pr1) + ",#" + std::to_string(pr2) + ")");
            w.row("IFCRELDEFINESBYPROPERTIES", q(gid(w.peek_id())) + ohr + "$,$,(#" +
                                                   std::to_string(wall) + "),#" +
                                                   std::to_string(pset));
        }
        // door #2 is too low on purpose
        std::string height = spf_real(s == 1 ? 1.8 : 2.1);
        std::string args = q(gid(w.peek_id())) + ohr + q("DB-" + std::to_string(s + 1)) +
                           ",$,$,$,$," + q("TD-" + std::to_string(s + 1)) + "," + height + ",0.9";
        if (v4) args += ",.DOOR.,.SINGLE_SWING_LEFT.,$";
        std::uint32_t door = w.row("IFCDOOR", args);
        contained.push_back(door);

        std::uint32_t dp = w.row("IFCPROPERTYSINGLEVALUE", "'FireRating',$,IFCLABEL('F30'),$");
        std::uint32_t dpset = w.row("IFCPROPERTYSET", q(gid(w.peek_id())) + ohr +
                                                          "'Pset_DoorCommon',$,(#" +
                                                          std::to_string(dp) + ")");
        w.row("IFCRELDEFINESBYPROPERTIES",
              q(gid(w.peek_id())) + ohr + "$,$,(#" + std::to_string(door) + "),#" +
                  std::to_string(dpset));

        w.row("IFCRELCONTAINEDINSPATIALSTRUCTURE",
              q(gid(w.peek_id())) + ohr + "$,$," + refs(contained) + ",#" +
                  std::to_string(storeys[static_cast<std::size_t>(s)]));
    }

    out += kSpfFooter;
    return out;
}

}  // namespace mvd::test
