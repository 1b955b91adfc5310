#pragma once

// Slow reference evaluator: one root at a time, direct structural
// recursion over the chain, no shared fronts, no caching, no pruning.
// Deliberately written against the language semantics alone so its
// verdicts can check the optimized evaluator rather than mirror it.

#include <cstdint>

#include "mvd/engine/relation.hpp"
#include "mvd/lang/ast.hpp"

namespace mvd::engine {

bool oracle_chain_passes(const ifc::Model& model, const lang::Chain& chain, std::uint32_t root,
                         double epsilon = 0.0);

RootList oracle_passing_roots(const ifc::Model& model, const lang::Chain& chain,
                              const RootList& roots, double epsilon = 0.0);

}  // namespace mvd::engine
