#include "mvd/engine/relation.hpp"

#include <algorithm>

namespace mvd::engine {

void Front::tidy() {
    if (nodes.empty()) return;
    std::vector<std::uint32_t> order(nodes.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return nodes[a] < nodes[b];
    });
    ifc::NodeList out_nodes;
    std::vector<RootList> out_roots;
    out_nodes.reserve(nodes.size());
    out_roots.reserve(nodes.size());
    for (std::uint32_t idx : order) {
        if (!out_nodes.empty() && out_nodes.back() == nodes[idx]) {
            out_roots.back() = root_union(out_roots.back(), roots[idx]);
        } else {
            out_nodes.push_back(std::move(nodes[idx]));
            out_roots.push_back(std::move(roots[idx]));
        }
    }
    nodes = std::move(out_nodes);
    roots = std::move(out_roots);
}

RootList Front::live_roots() const {
    RootList all;
    for (const RootList& r : roots) all = root_union(all, r);
    return all;
}

void Front::remove_roots(const RootList& gone) {
    if (gone.empty()) return;
    std::size_t w = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        RootList kept = root_difference(roots[i], gone);
        if (kept.empty()) continue;
        nodes[w] = std::move(nodes[i]);
        roots[w] = std::move(kept);
        ++w;
    }
    nodes.resize(w);
    roots.resize(w);
}

Front make_root_front(const RootList& roots) {
    Front f;
    f.nodes.reserve(roots.size());
    f.roots.reserve(roots.size());
    for (std::uint32_t id : roots) {
        f.nodes.push_back(ifc::make_instance_node(id));
        f.roots.push_back({id});
    }
    return f;  // root ids are sorted, so the node list already is too
}

RootList root_union(const RootList& a, const RootList& b) {
    RootList out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

RootList root_intersection(const RootList& a, const RootList& b) {
    RootList out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

RootList root_difference(const RootList& a, const RootList& b) {
    RootList out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

PairSet to_pairs(const Front& front) {
    PairSet out;
    for (std::size_t i = 0; i < front.nodes.size(); ++i)
        for (std::uint32_t r : front.roots[i]) out.emplace_back(front.nodes[i], r);
    return out;  // nodes sorted, roots sorted within each node
}

Front from_pairs(PairSet pairs) {
    Front f;
    for (auto& [node, root] : pairs) {
        if (!f.nodes.empty() && f.nodes.back() == node) {
            f.roots.back().push_back(root);
        } else {
            f.nodes.push_back(std::move(node));
            f.roots.push_back({root});
        }
    }
    return f;
}

PairSet pair_union(const PairSet& a, const PairSet& b) {
    PairSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

PairSet pair_intersection(const PairSet& a, const PairSet& b) {
    PairSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

PairSet pair_symmetric_difference(const PairSet& a, const PairSet& b) {
    PairSet out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
}

PairSet pair_difference(const PairSet& a, const PairSet& b) {
    PairSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace mvd::engine
