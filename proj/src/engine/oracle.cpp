#include "mvd/engine/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <variant>

#include "mvd/engine/compare.hpp"
#include "mvd/ifc/node.hpp"

namespace mvd::engine {

namespace {

using ifc::Node;
using ifc::NodeList;

struct OracleCtx {
    const ifc::Model* model;
    double epsilon;
};

NodeList walk(OracleCtx& cx, NodeList nodes, const std::vector<lang::Segment>& segs,
              std::size_t from);

bool wants_collection(const lang::MetricSegment& m) {
    return m.metric == lang::MetricKind::Size || m.metric == lang::MetricKind::Exists ||
           m.metric == lang::MetricKind::Unique;
}

bool starts_global(const lang::Fragment& frag) {
    return !frag.segments.empty() &&
           std::holds_alternative<lang::NameRefSegment>(frag.segments[0].as_variant());
}

bool metric_on_count(const lang::MetricSegment& m, std::size_t count, bool unique) {
    const lang::Literal& lit = m.values.front();
    if (m.metric == lang::MetricKind::Size) {
        auto c = static_cast<std::int64_t>(count);
        switch (m.cmp) {
            case lang::Cmp::Eq: return c == lit.ival;
            case lang::Cmp::Ne: return c != lit.ival;
            case lang::Cmp::Lt: return c < lit.ival;
            case lang::Cmp::Gt: return c > lit.ival;
            case lang::Cmp::Le: return c <= lit.ival;
            case lang::Cmp::Ge: return c >= lit.ival;
        }
        return false;
    }
    bool truth = m.metric == lang::MetricKind::Exists ? count > 0 : unique;
    return m.cmp == lang::Cmp::Eq ? truth == lit.bval : truth != lit.bval;
}

bool pairwise_distinct(const NodeList& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const Node& a = nodes[i];
            const Node& b = nodes[j];
            if (a.is_instance() != b.is_instance()) continue;
            if (a.is_instance() ? a.inst == b.inst : a.value->structurally_equal(*b.value))
                return false;
        }
    return true;
}

bool scalar_metric_passes(OracleCtx& cx, const lang::MetricSegment& m, const Node& n) {
    if (m.metric == lang::MetricKind::Type) {
        bool match = ifc::node_matches_type(*cx.model, n, m.values[0].text);
        return m.cmp == lang::Cmp::Eq ? match : !match;
    }
    if (n.is_instance()) return false;
    return satisfies(m.cmp, compare_value(*n.value, m.values[0], cx.epsilon));
}

bool global_truth(OracleCtx& cx, const lang::Fragment& frag) {
    const auto& ref = std::get<lang::NameRefSegment>(frag.segments[0].as_variant());
    const auto& m = std::get<lang::MetricSegment>(frag.segments[1].as_variant());
    return metric_on_count(m, cx.model->instances_of(ref.name).size(), true);
}

bool boolean_logic(OracleCtx& cx, const lang::LogicExpr& e, const Node& n) {
    if (e.is_leaf) {
        if (starts_global(e.leaf)) return global_truth(cx, e.leaf);
        return !walk(cx, {n}, e.leaf.segments, 0).empty();
    }
    switch (e.op) {
        case lang::Connective::Not:
            return !boolean_logic(cx, e.children.front(), n);
        case lang::Connective::And: {
            bool all = true;
            for (const auto& kid : e.children) all = boolean_logic(cx, kid, n) && all;
            return all;
        }
        case lang::Connective::Or: {
            bool any = false;
            for (const auto& kid : e.children) any = boolean_logic(cx, kid, n) || any;
            return any;
        }
        case lang::Connective::Xor: {
            int on = 0;
            for (const auto& kid : e.children)
                if (boolean_logic(cx, kid, n)) ++on;
            return on % 2 == 1;
        }
    }
    return false;
}

bool compound_only_filters(const lang::LogicExpr& e) {
    if (e.is_leaf) return starts_global(e.leaf) || lang::is_metric_ended(e.leaf);
    for (const auto& kid : e.children)
        if (!compound_only_filters(kid)) return false;
    return true;
}

NodeList nl_union(NodeList a, const NodeList& b) {
    a.insert(a.end(), b.begin(), b.end());
    ifc::sort_unique(a);
    return a;
}

NodeList nl_intersection(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeList nl_difference(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeList nl_symdiff(const NodeList& a, const NodeList& b) {
    NodeList out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
}

NodeList mapped_leaf(OracleCtx& cx, const lang::Fragment& frag, const NodeList& front) {
    if (starts_global(frag)) return global_truth(cx, frag) ? front : NodeList{};
    if (lang::is_metric_ended(frag)) {
        NodeList out;
        for (const Node& n : front)
            if (!walk(cx, {n}, frag.segments, 0).empty()) out.push_back(n);
        return out;
    }
    NodeList copy = front;
    return walk(cx, std::move(copy), frag.segments, 0);
}

NodeList mapped_logic(OracleCtx& cx, const lang::LogicExpr& e, const NodeList& front,
                      const NodeList& universe) {
    if (e.is_leaf) return mapped_leaf(cx, e.leaf, front);
    switch (e.op) {
        case lang::Connective::Not:
            return nl_difference(universe, mapped_logic(cx, e.children.front(), front, universe));
        case lang::Connective::And: {
            NodeList out = mapped_logic(cx, e.children.front(), front, universe);
            for (std::size_t i = 1; i < e.children.size(); ++i)
                out = nl_intersection(out, mapped_logic(cx, e.children[i], front, universe));
            return out;
        }
        case lang::Connective::Or: {
            NodeList out;
            for (const auto& kid : e.children)
                out = nl_union(std::move(out), mapped_logic(cx, kid, front, universe));
            return out;
        }
        case lang::Connective::Xor: {
            NodeList out;
            for (const auto& kid : e.children)
                out = nl_symdiff(out, mapped_logic(cx, kid, front, universe));
            return out;
        }
    }
    return {};
}

void collect_universe(OracleCtx& cx, const lang::LogicExpr& e, const NodeList& front,
                      NodeList& universe) {
    if (e.is_leaf) {
        universe = nl_union(std::move(universe), mapped_leaf(cx, e.leaf, front));
        return;
    }
    for (const auto& kid : e.children) collect_universe(cx, kid, front, universe);
}

NodeList walk(OracleCtx& cx, NodeList nodes, const std::vector<lang::Segment>& segs,
              std::size_t from) {
    std::size_t i = from;
    while (i < segs.size() && !nodes.empty()) {
        const auto& var = segs[i].as_variant();
        if (const auto* anchor = std::get_if<lang::InputAnchorSegment>(&var)) {
            NodeList kept;
            for (Node& n : nodes)
                if (ifc::node_matches_type(*cx.model, n, anchor->type_name))
                    kept.push_back(std::move(n));
            nodes = std::move(kept);
            ++i;
        } else if (const auto* attr = std::get_if<lang::AttributeSegment>(&var)) {
            // look ahead: a collection metric turns this attribute into a
            // per-node counting test, with any filters in between
            std::size_t j = i + 1;
            std::size_t metric_at = segs.size();
            while (j < segs.size()) {
                if (const auto* m = std::get_if<lang::MetricSegment>(&segs[j].as_variant())) {
                    if (wants_collection(*m)) {
                        metric_at = j;
                        break;
                    }
                    ++j;
                    continue;
                }
                if (const auto* c = std::get_if<lang::CompoundSegment>(&segs[j].as_variant());
                    c && compound_only_filters(c->expr)) {
                    ++j;
                    continue;
                }
                break;
            }
            if (metric_at < segs.size()) {
                const auto& metric = std::get<lang::MetricSegment>(segs[metric_at].as_variant());
                NodeList kept;
                for (Node& n : nodes) {
                    NodeList targets;
                    ifc::attribute_targets(*cx.model, n, attr->attribute, attr->type_constraint,
                                           targets);
                    NodeList surviving;
                    for (Node& t : targets) {
                        bool keep = true;
                        for (std::size_t k = i + 1; k < metric_at && keep; ++k) {
                            if (const auto* m =
                                    std::get_if<lang::MetricSegment>(&segs[k].as_variant()))
                                keep = scalar_metric_passes(cx, *m, t);
                            else if (const auto* c = std::get_if<lang::CompoundSegment>(
                                         &segs[k].as_variant()))
                                keep = boolean_logic(cx, c->expr, t);
                        }
                        if (keep) surviving.push_back(std::move(t));
                    }
                    bool uniq = metric.metric == lang::MetricKind::Unique
                                    ? pairwise_distinct(surviving)
                                    : true;
                    if (metric_on_count(metric, surviving.size(), uniq))
                        kept.push_back(std::move(n));
                }
                nodes = std::move(kept);
                i = metric_at + 1;
            } else {
                NodeList out;
                for (const Node& n : nodes) {
                    NodeList targets;
                    ifc::attribute_targets(*cx.model, n, attr->attribute, attr->type_constraint,
                                           targets);
                    for (Node& t : targets) out.push_back(std::move(t));
                }
                ifc::sort_unique(out);
                nodes = std::move(out);
                ++i;
            }
        } else if (const auto* m = std::get_if<lang::MetricSegment>(&var)) {
            if (wants_collection(*m))
                throw std::logic_error("collection metric without an attribute");
            NodeList kept;
            for (Node& n : nodes)
                if (scalar_metric_passes(cx, *m, n)) kept.push_back(std::move(n));
            nodes = std::move(kept);
            ++i;
        } else if (const auto* c = std::get_if<lang::CompoundSegment>(&var)) {
            if (compound_only_filters(c->expr)) {
                NodeList kept;
                for (Node& n : nodes)
                    if (boolean_logic(cx, c->expr, n)) kept.push_back(std::move(n));
                nodes = std::move(kept);
            } else {
                NodeList universe;
                collect_universe(cx, c->expr, nodes, universe);
                nodes = mapped_logic(cx, c->expr, nodes, universe);
            }
            ++i;
        } else {
            throw std::logic_error("unexpanded name reference in chain");
        }
    }
    return nodes;
}

}  // namespace

bool oracle_chain_passes(const ifc::Model& model, const lang::Chain& chain, std::uint32_t root,
                         double epsilon) {
    OracleCtx cx{&model, epsilon};
    if (lang::chain_is_global(chain)) {
        const auto& ref = std::get<lang::NameRefSegment>(chain.segments[0].as_variant());
        const auto& m = std::get<lang::MetricSegment>(chain.segments[1].as_variant());
        return metric_on_count(m, model.instances_of(ref.name).size(), true);
    }
    return !walk(cx, {ifc::make_instance_node(root)}, chain.segments, 0).empty();
}

RootList oracle_passing_roots(const ifc::Model& model, const lang::Chain& chain,
                              const RootList& roots, double epsilon) {
    RootList out;
    for (std::uint32_t r : roots)
        if (oracle_chain_passes(model, chain, r, epsilon)) out.push_back(r);
    return out;
}

}  // namespace mvd::engine
