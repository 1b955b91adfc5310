#include "mvd/engine/evaluator.hpp"

#include <algorithm>
#include <variant>

#include "mvd/engine/compare.hpp"
#include "mvd/ifc/schema.hpp"
#include "mvd/lang/format.hpp"

namespace mvd::engine {

namespace {

bool is_collection(lang::MetricKind m) {
    return m == lang::MetricKind::Size || m == lang::MetricKind::Exists ||
           m == lang::MetricKind::Unique;
}

bool fragment_is_global(const lang::Fragment& frag) {
    return !frag.segments.empty() &&
           std::holds_alternative<lang::NameRefSegment>(frag.segments[0].as_variant());
}

// True when every leaf either tests per node (ends in a metric) or is a
// model-wide constant; such compounds filter the front instead of mapping
// it to new nodes.
bool logic_is_filter(const lang::LogicExpr& e) {
    if (e.is_leaf) return fragment_is_global(e.leaf) || lang::is_metric_ended(e.leaf);
    for (const auto& kid : e.children)
        if (!logic_is_filter(kid)) return false;
    return true;
}

Ordering order_counts(std::int64_t a, std::int64_t b) {
    if (a == b) return Ordering::Equal;
    return a < b ? Ordering::Less : Ordering::Greater;
}

// [Size]/[Exists]/[Unique] verdict over a collection summary.
bool count_metric_passes(const lang::MetricSegment& m, std::size_t count, bool unique) {
    const lang::Literal& lit = m.values.front();
    switch (m.metric) {
        case lang::MetricKind::Size:
            return satisfies(m.cmp, order_counts(static_cast<std::int64_t>(count), lit.ival));
        case lang::MetricKind::Exists: {
            bool truth = count > 0;
            return m.cmp == lang::Cmp::Eq ? truth == lit.bval : truth != lit.bval;
        }
        case lang::MetricKind::Unique:
            return m.cmp == lang::Cmp::Eq ? unique == lit.bval : unique != lit.bval;
        default:
            throw EvalError("internal: scalar metric in collection position");
    }
}

// Pairwise distinctness: value nodes by structural value, instance nodes
// by identity.  Collections are small, so quadratic is fine.
bool all_distinct(const ifc::NodeList& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const ifc::Node& a = nodes[i];
            const ifc::Node& b = nodes[j];
            if (a.is_instance() != b.is_instance()) continue;
            if (a.is_instance()) {
                if (a.inst == b.inst) return false;
            } else if (a.value->structurally_equal(*b.value)) {
                return false;
            }
        }
    return true;
}

struct Step {
    enum Kind { Anchor, Attribute, Scalar, Filter, Map, Count } kind;
    std::size_t begin;
    std::size_t end;  // one past the last segment of this step
};

std::vector<Step> build_plan(const std::vector<lang::Segment>& segs, std::size_t from) {
    std::vector<Step> plan;
    std::size_t i = from;
    while (i < segs.size()) {
        const auto& var = segs[i].as_variant();
        if (std::holds_alternative<lang::InputAnchorSegment>(var)) {
            plan.push_back({Step::Anchor, i, i + 1});
            ++i;
        } else if (std::holds_alternative<lang::AttributeSegment>(var)) {
            // fuse "->Attr <filters> [collection]" into one counting step
            std::size_t j = i + 1;
            bool counted = false;
            while (j < segs.size()) {
                if (const auto* m = std::get_if<lang::MetricSegment>(&segs[j].as_variant())) {
                    if (is_collection(m->metric)) {
                        counted = true;
                        break;
                    }
                    ++j;
                    continue;
                }
                if (const auto* c = std::get_if<lang::CompoundSegment>(&segs[j].as_variant());
                    c && logic_is_filter(c->expr)) {
                    ++j;
                    continue;
                }
                break;
            }
            if (counted) {
                plan.push_back({Step::Count, i, j + 1});
                i = j + 1;
            } else {
                plan.push_back({Step::Attribute, i, i + 1});
                ++i;
            }
        } else if (const auto* m = std::get_if<lang::MetricSegment>(&var)) {
            if (is_collection(m->metric))
                throw EvalError("collection metric without a preceding attribute");
            plan.push_back({Step::Scalar, i, i + 1});
            ++i;
        } else if (const auto* c = std::get_if<lang::CompoundSegment>(&var)) {
            plan.push_back({logic_is_filter(c->expr) ? Step::Filter : Step::Map, i, i + 1});
            ++i;
        } else {
            throw EvalError("unexpanded name reference in chain");
        }
    }
    return plan;
}

struct Ctx {
    Evaluator* ev;
    const ifc::Model* model;
    EvalStats stats;
    double epsilon;
};

Front run_sub(Ctx& ctx, Front front, const std::vector<lang::Segment>& segs, std::size_t from,
              std::size_t to);

bool fragment_filter(Ctx& ctx, const lang::Fragment& frag, const ifc::Node& node) {
    Front one;
    one.nodes.push_back(node);
    one.roots.push_back({0});
    return !run_sub(ctx, std::move(one), frag.segments, 0, frag.segments.size()).empty();
}

bool global_fragment_truth(Ctx& ctx, const lang::Fragment& frag) {
    const auto& ref = std::get<lang::NameRefSegment>(frag.segments[0].as_variant());
    const auto& metric = std::get<lang::MetricSegment>(frag.segments[1].as_variant());
    return count_metric_passes(metric, ctx.ev->global_count(ref.name), true);
}

bool node_filter_logic(Ctx& ctx, const lang::LogicExpr& e, const ifc::Node& node) {
    if (e.is_leaf) {
        if (fragment_is_global(e.leaf)) return global_fragment_truth(ctx, e.leaf);
        return fragment_filter(ctx, e.leaf, node);
    }
    switch (e.op) {
        case lang::Connective::Not:
            return !node_filter_logic(ctx, e.children.front(), node);
        case lang::Connective::And:
            for (const auto& kid : e.children)
                if (!node_filter_logic(ctx, kid, node)) return false;
            return true;
        case lang::Connective::Or:
            for (const auto& kid : e.children)
                if (node_filter_logic(ctx, kid, node)) return true;
            return false;
        case lang::Connective::Xor: {
            int on = 0;
            for (const auto& kid : e.children) on += node_filter_logic(ctx, kid, node) ? 1 : 0;
            return (on % 2) == 1;
        }
    }
    return false;
}

// Image of one compound leaf over `front`, as (node, root) pairs.
PairSet leaf_image(Ctx& ctx, const lang::Fragment& frag, const Front& front) {
    if (fragment_is_global(frag))
        return global_fragment_truth(ctx, frag) ? to_pairs(front) : PairSet{};
    if (lang::is_metric_ended(frag)) {
        Front kept;
        for (std::size_t i = 0; i < front.nodes.size(); ++i)
            if (fragment_filter(ctx, frag, front.nodes[i])) {
                kept.nodes.push_back(front.nodes[i]);
                kept.roots.push_back(front.roots[i]);
            }
        return to_pairs(kept);
    }
    Front copy;
    copy.nodes = front.nodes;
    copy.roots = front.roots;
    return to_pairs(run_sub(ctx, std::move(copy), frag.segments, 0, frag.segments.size()));
}

void collect_leaf_images(Ctx& ctx, const lang::LogicExpr& e, const Front& front,
                         std::vector<std::pair<const lang::LogicExpr*, PairSet>>& images) {
    if (e.is_leaf) {
        images.emplace_back(&e, leaf_image(ctx, e.leaf, front));
        return;
    }
    for (const auto& kid : e.children) collect_leaf_images(ctx, kid, front, images);
}

PairSet eval_pairs(const lang::LogicExpr& e,
                   const std::vector<std::pair<const lang::LogicExpr*, PairSet>>& images,
                   const PairSet& universe) {
    if (e.is_leaf) {
        for (const auto& [leaf, pairs] : images)
            if (leaf == &e) return pairs;
        return {};
    }
    switch (e.op) {
        case lang::Connective::Not:
            return pair_difference(universe, eval_pairs(e.children.front(), images, universe));
        case lang::Connective::And: {
            PairSet out = eval_pairs(e.children.front(), images, universe);
            for (std::size_t i = 1; i < e.children.size(); ++i)
                out = pair_intersection(out, eval_pairs(e.children[i], images, universe));
            return out;
        }
        case lang::Connective::Or: {
            PairSet out;
            for (const auto& kid : e.children)
                out = pair_union(out, eval_pairs(kid, images, universe));
            return out;
        }
        case lang::Connective::Xor: {
            PairSet out;
            for (const auto& kid : e.children)
                out = pair_symmetric_difference(out, eval_pairs(kid, images, universe));
            return out;
        }
    }
    return {};
}

// Applies the target filters sitting between an attribute and its
// collection metric ([i] scalar metrics and filter compounds).
void filter_targets(Ctx& ctx, ifc::NodeList& targets, const std::vector<lang::Segment>& segs,
                    std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
        if (const auto* m = std::get_if<lang::MetricSegment>(&segs[k].as_variant())) {
            targets.erase(
                std::remove_if(targets.begin(), targets.end(),
                               [&](const ifc::Node& n) {
                                   if (m->metric == lang::MetricKind::Type) {
                                       bool match = ifc::node_matches_type(*ctx.model, n,
                                                                           m->values[0].text);
                                       return (m->cmp == lang::Cmp::Eq) ? !match : match;
                                   }
                                   if (n.is_instance()) return true;
                                   return !satisfies(m->cmp, compare_value(*n.value, m->values[0],
                                                                           ctx.epsilon));
                               }),
                targets.end());
        } else if (const auto* c = std::get_if<lang::CompoundSegment>(&segs[k].as_variant())) {
            targets.erase(std::remove_if(targets.begin(), targets.end(),
                                         [&](const ifc::Node& n) {
                                             return !node_filter_logic(ctx, c->expr, n);
                                         }),
                          targets.end());
        }
    }
}

struct RunState {
    Front front;
    ifc::NodeList shadow;  // unfiltered front, tracked when pruning is off
    bool track_shadow = false;
};

void shadow_walk(Ctx& ctx, ifc::NodeList& shadow, const std::vector<lang::Segment>& segs,
                 std::size_t from, std::size_t to);

void apply_step(Ctx& ctx, RunState& st, const std::vector<lang::Segment>& segs,
                const Step& step) {
    switch (step.kind) {
        case Step::Anchor: {
            const auto& anchor = std::get<lang::InputAnchorSegment>(segs[step.begin].as_variant());
            Front kept;
            for (std::size_t i = 0; i < st.front.nodes.size(); ++i)
                if (ifc::node_matches_type(*ctx.model, st.front.nodes[i], anchor.type_name)) {
                    kept.nodes.push_back(std::move(st.front.nodes[i]));
                    kept.roots.push_back(std::move(st.front.roots[i]));
                }
            st.front = std::move(kept);
            break;
        }
        case Step::Attribute: {
            const auto& attr = std::get<lang::AttributeSegment>(segs[step.begin].as_variant());
            Front out;
            ifc::NodeList targets;
            for (std::size_t i = 0; i < st.front.nodes.size(); ++i) {
                targets.clear();
                ifc::attribute_targets(*ctx.model, st.front.nodes[i], attr.attribute,
                                       attr.type_constraint, targets);
                ctx.stats.nodes_expanded += targets.size();
                for (ifc::Node& t : targets) {
                    out.nodes.push_back(std::move(t));
                    out.roots.push_back(st.front.roots[i]);
                }
            }
            out.tidy();
            st.front = std::move(out);
            break;
        }
        case Step::Scalar: {
            const auto& m = std::get<lang::MetricSegment>(segs[step.begin].as_variant());
            Front kept;
            for (std::size_t i = 0; i < st.front.nodes.size(); ++i) {
                const ifc::Node& n = st.front.nodes[i];
                bool pass;
                if (m.metric == lang::MetricKind::Type) {
                    bool match = ifc::node_matches_type(*ctx.model, n, m.values[0].text);
                    pass = (m.cmp == lang::Cmp::Eq) ? match : !match;
                } else {
                    pass = !n.is_instance() &&
                           satisfies(m.cmp, compare_value(*n.value, m.values[0], ctx.epsilon));
                }
                if (pass) {
                    kept.nodes.push_back(std::move(st.front.nodes[i]));
                    kept.roots.push_back(std::move(st.front.roots[i]));
                }
            }
            st.front = std::move(kept);
            break;
        }
        case Step::Filter: {
            const auto& c = std::get<lang::CompoundSegment>(segs[step.begin].as_variant());
            Front kept;
            for (std::size_t i = 0; i < st.front.nodes.size(); ++i)
                if (node_filter_logic(ctx, c.expr, st.front.nodes[i])) {
                    kept.nodes.push_back(std::move(st.front.nodes[i]));
                    kept.roots.push_back(std::move(st.front.roots[i]));
                }
            st.front = std::move(kept);
            break;
        }
        case Step::Map: {
            const auto& c = std::get<lang::CompoundSegment>(segs[step.begin].as_variant());
            std::vector<std::pair<const lang::LogicExpr*, PairSet>> images;
            collect_leaf_images(ctx, c.expr, st.front, images);
            PairSet universe;
            for (const auto& [leaf, pairs] : images) universe = pair_union(universe, pairs);
            st.front = from_pairs(eval_pairs(c.expr, images, universe));
            break;
        }
        case Step::Count: {
            const auto& attr = std::get<lang::AttributeSegment>(segs[step.begin].as_variant());
            const auto& metric = std::get<lang::MetricSegment>(segs[step.end - 1].as_variant());
            Front kept;
            ifc::NodeList targets;
            for (std::size_t i = 0; i < st.front.nodes.size(); ++i) {
                targets.clear();
                ifc::attribute_targets(*ctx.model, st.front.nodes[i], attr.attribute,
                                       attr.type_constraint, targets);
                ctx.stats.nodes_expanded += targets.size();
                filter_targets(ctx, targets, segs, step.begin + 1, step.end - 1);
                bool unique = metric.metric == lang::MetricKind::Unique ? all_distinct(targets)
                                                                        : true;
                if (count_metric_passes(metric, targets.size(), unique)) {
                    kept.nodes.push_back(std::move(st.front.nodes[i]));
                    kept.roots.push_back(std::move(st.front.roots[i]));
                }
            }
            st.front = std::move(kept);
            break;
        }
    }
    if (st.track_shadow) shadow_walk(ctx, st.shadow, segs, step.begin, step.end);
}

Front run_sub(Ctx& ctx, Front front, const std::vector<lang::Segment>& segs, std::size_t from,
              std::size_t to) {
    RunState st;
    st.front = std::move(front);
    for (const Step& step : build_plan(segs, from)) {
        if (step.begin >= to) break;
        apply_step(ctx, st, segs, step);
        if (st.front.empty()) break;
    }
    return std::move(st.front);
}

// The no-pruning baseline keeps expanding the full, unfiltered image of
// every attribute step; filters and metrics do not narrow it.  Verdicts
// never depend on the shadow — it exists to cost what pruning saves.
void shadow_walk(Ctx& ctx, ifc::NodeList& shadow, const std::vector<lang::Segment>& segs,
                 std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to && !shadow.empty(); ++i) {
        const auto& var = segs[i].as_variant();
        if (const auto* attr = std::get_if<lang::AttributeSegment>(&var)) {
            ifc::NodeList out, targets;
            for (const ifc::Node& n : shadow) {
                targets.clear();
                ifc::attribute_targets(*ctx.model, n, attr->attribute, attr->type_constraint,
                                       targets);
                ctx.stats.nodes_expanded += targets.size();
                for (ifc::Node& t : targets) out.push_back(std::move(t));
            }
            ifc::sort_unique(out);
            shadow = std::move(out);
        } else if (const auto* c = std::get_if<lang::CompoundSegment>(&var)) {
            if (!logic_is_filter(c->expr)) {
                // mapped images still have to be computed in full
                ifc::NodeList merged = shadow;
                std::vector<const lang::Fragment*> leaves;
                std::vector<const lang::LogicExpr*> stack{&c->expr};
                while (!stack.empty()) {
                    const lang::LogicExpr* e = stack.back();
                    stack.pop_back();
                    if (e->is_leaf) {
                        if (!fragment_is_global(e->leaf) && !lang::is_metric_ended(e->leaf))
                            leaves.push_back(&e->leaf);
                    } else {
                        for (const auto& kid : e->children) stack.push_back(&kid);
                    }
                }
                for (const lang::Fragment* frag : leaves) {
                    ifc::NodeList image = shadow;
                    shadow_walk(ctx, image, frag->segments, 0, frag->segments.size());
                    for (ifc::Node& n : image) merged.push_back(std::move(n));
                }
                ifc::sort_unique(merged);
                shadow = std::move(merged);
            }
        }
        // anchors, metrics and filter compounds leave the shadow untouched
    }
}

}  // namespace

Evaluator::Evaluator(const ifc::Model& model, EvalOptions options)
    : model_(model), options_(options) {}

std::string Evaluator::prefix_text(const lang::Chain& chain, std::size_t end_segment) {
    std::string out;
    for (std::size_t i = 0; i < end_segment && i < chain.segments.size(); ++i)
        out += lang::format(chain.segments[i]);
    return out;
}

std::string Evaluator::cache_key(const std::string& scope, const lang::Chain& chain,
                                 std::size_t end_segment) const {
    std::string key = scope;
    key.push_back('\x1f');
    key.push_back(options_.pruning ? 'P' : 'U');
    key.push_back('\x1f');
    key += prefix_text(chain, end_segment);
    return key;
}

RootList Evaluator::passing_roots(const lang::Chain& chain, const RootList& roots,
                                  const std::string& cache_scope) {
    if (lang::chain_is_global(chain))
        return global_chain_passes(chain) ? roots : RootList{};

    Ctx ctx{this, &model_, {}, options_.epsilon};
    const std::vector<Step> plan = build_plan(chain.segments, 0);

    RunState st;
    st.track_shadow = !options_.pruning;
    RootList failed;
    std::size_t start = 0;

    if (options_.caching) {
        for (std::size_t k = plan.size(); k > 0; --k) {
            std::string key = cache_key(cache_scope, chain, plan[k - 1].end);
            if (!cache_allowed(key)) continue;
            if (auto entry = cache_find(key)) {
                st.front.nodes = entry->front.nodes;
                st.front.roots = entry->front.roots;
                st.shadow = entry->shadow;
                failed = entry->failed;
                start = k;
                ctx.stats.cache_hits += 1;
                break;
            }
        }
        if (start == 0) ctx.stats.cache_misses += 1;
    }
    if (start == 0) {
        st.front = make_root_front(roots);
        if (st.track_shadow) st.shadow = st.front.nodes;
    }

    for (std::size_t k = start; k < plan.size(); ++k) {
        apply_step(ctx, st, chain.segments, plan[k]);
        if (options_.pruning) {
            RootList live = st.front.live_roots();
            RootList undecided = root_difference(roots, failed);
            RootList gone = root_difference(undecided, live);
            if (!gone.empty()) {
                ctx.stats.roots_failed_early += gone.size();
                failed = root_union(failed, gone);
            }
        }
        if (options_.caching) {
            std::string key = cache_key(cache_scope, chain, plan[k].end);
            if (cache_allowed(key)) {
                auto entry = std::make_shared<CacheEntry>();
                entry->front.nodes = st.front.nodes;
                entry->front.roots = st.front.roots;
                entry->failed = failed;
                entry->shadow = st.shadow;
                cache_store(key, std::move(entry));
            }
        }
    }

    // A resumed prefix may have been cached under a wider population of
    // the same scope; verdicts only ever apply to the roots asked about.
    RootList passing = root_intersection(st.front.live_roots(), roots);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        stats_ += ctx.stats;
    }
    return passing;
}

bool Evaluator::global_chain_passes(const lang::Chain& chain) {
    const auto& ref = std::get<lang::NameRefSegment>(chain.segments[0].as_variant());
    const auto& metric = std::get<lang::MetricSegment>(chain.segments[1].as_variant());
    return count_metric_passes(metric, global_count(ref.name), true);
}

void Evaluator::set_cache_plan(std::set<std::string> keys) {
    std::lock_guard<std::mutex> lock(mutex_);
    has_plan_ = true;
    plan_ = std::move(keys);
}

void Evaluator::clear_cache() {
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.clear();
}

EvalStats Evaluator::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return stats_;
}

void Evaluator::reset_stats() {
    std::lock_guard<std::mutex> lock(mutex_);
    stats_ = {};
}

std::shared_ptr<const Evaluator::CacheEntry> Evaluator::cache_find(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    return it == cache_.end() ? nullptr : it->second;
}

void Evaluator::cache_store(const std::string& key, std::shared_ptr<const CacheEntry> entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, std::move(entry));
}

bool Evaluator::cache_allowed(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return !has_plan_ || plan_.count(key) > 0;
}

std::size_t Evaluator::global_count(const std::string& entity_name) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = global_counts_.find(entity_name);
        if (it != global_counts_.end()) return it->second;
    }
    std::size_t n = model_.instances_of(entity_name).size();
    std::lock_guard<std::mutex> lock(mutex_);
    global_counts_.emplace(entity_name, n);
    return n;
}

}  // namespace mvd::engine
