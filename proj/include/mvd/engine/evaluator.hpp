#pragma once

// Rule-chain evaluation over a model: all roots of a concept walk the
// chain together, sharing node expansion through the rooted front.
// Optional prefix caching reuses fronts across rules that start the same
// way; optional pruning stops expanding branches that filters have
// already cut off.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mvd/engine/relation.hpp"
#include "mvd/ifc/model.hpp"
#include "mvd/lang/ast.hpp"

namespace mvd::engine {

struct EvalOptions {
    bool caching = true;
    bool pruning = true;
    double epsilon = 0.0;  // tolerance for real-number comparisons
    int threads = 1;       // rule-level parallelism in validate()
};

struct EvalStats {
    std::uint64_t nodes_expanded = 0;  // attribute targets produced
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::uint64_t roots_failed_early = 0;

    EvalStats& operator+=(const EvalStats& o) {
        nodes_expanded += o.nodes_expanded;
        cache_hits += o.cache_hits;
        cache_misses += o.cache_misses;
        roots_failed_early += o.roots_failed_early;
        return *this;
    }
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Evaluator {
public:
    explicit Evaluator(const ifc::Model& model, EvalOptions options = {});

    const ifc::Model& model() const { return model_; }
    const EvalOptions& options() const { return options_; }

    // Sorted ids of the roots the (completed) chain holds for.
    // `cache_scope` identifies the root population — cached prefix fronts
    // are only shared between chains evaluated under the same scope.
    RootList passing_roots(const lang::Chain& chain, const RootList& roots,
                           const std::string& cache_scope);

    // Model-wide verdict of a global chain ("IfcProject[Size]=1").
    bool global_chain_passes(const lang::Chain& chain);

    // Restricts prefix caching to the given keys (computed by validate()
    // from the prefixes two or more chains share).  Without a plan every
    // prefix is cached.
    void set_cache_plan(std::set<std::string> keys);
    void clear_cache();

    EvalStats stats() const;
    void reset_stats();

    // Formatted prefix of the first `end_segment` segments, as used in
    // cache keys; exposed so validate() can plan shared prefixes.
    static std::string prefix_text(const lang::Chain& chain, std::size_t end_segment);
    std::string cache_key(const std::string& scope, const lang::Chain& chain,
                          std::size_t end_segment) const;

    // Memoized instance count per entity type (for global fragments).
    std::size_t global_count(const std::string& entity_name);

private:
    struct CacheEntry {
        Front front;
        RootList failed;
        ifc::NodeList shadow;  // unfiltered expansion front (no-prune mode)
    };

    std::shared_ptr<const CacheEntry> cache_find(const std::string& key);
    void cache_store(const std::string& key, std::shared_ptr<const CacheEntry> entry);
    bool cache_allowed(const std::string& key) const;

    const ifc::Model& model_;
    EvalOptions options_;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const CacheEntry>> cache_;
    bool has_plan_ = false;
    std::set<std::string> plan_;
    std::map<std::string, std::size_t, std::less<>> global_counts_;
    EvalStats stats_;
};

}  // namespace mvd::engine
