#pragma once

// The rooted front: the set of nodes a rule chain currently points at,
// together with the roots that reach each node.  Keeping the root lists on
// the shared nodes (instead of evaluating per root) is what lets one
// expansion serve every root that arrives at the same instance.

#include <cstdint>
#include <utility>
#include <vector>

#include "mvd/ifc/node.hpp"

namespace mvd::engine {

using RootList = std::vector<std::uint32_t>;  // sorted unique instance ids

struct Front {
    ifc::NodeList nodes;           // sorted unique
    std::vector<RootList> roots;   // parallel to nodes

    bool empty() const { return nodes.empty(); }
    std::size_t size() const { return nodes.size(); }

    // Re-establishes the sorted-unique invariant, merging root lists of
    // duplicate nodes.
    void tidy();

    // All roots still present anywhere in the front, sorted unique.
    RootList live_roots() const;

    // Drops nodes after removing the given (sorted) roots everywhere.
    void remove_roots(const RootList& gone);
};

// One front per root id: the chain starts at the roots themselves.
Front make_root_front(const RootList& roots);

RootList root_union(const RootList& a, const RootList& b);
RootList root_intersection(const RootList& a, const RootList& b);
RootList root_difference(const RootList& a, const RootList& b);

// (node, root) pair algebra used for compound set operations.
using PairSet = std::vector<std::pair<ifc::Node, std::uint32_t>>;  // sorted unique

PairSet to_pairs(const Front& front);
Front from_pairs(PairSet pairs);

PairSet pair_union(const PairSet& a, const PairSet& b);
PairSet pair_intersection(const PairSet& a, const PairSet& b);
PairSet pair_symmetric_difference(const PairSet& a, const PairSet& b);
PairSet pair_difference(const PairSet& a, const PairSet& b);

}  // namespace mvd::engine
