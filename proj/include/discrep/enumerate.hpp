#pragma once

#include <functional>
#include <string>
#include <vector>

#include "discrep/graph.hpp"

namespace discrep {

enum class Shape { Any, Chain, Tree };

// Bounds and filters for bounded graph enumeration. All enumerated graphs
// are connected, have genus 0 everywhere, and internal weights in
// [1, max_weight]. Externals, when enabled, are single mult-1 links with
// coefficients drawn from the lattice; max_externals caps how many.
//
// Filters: elliptic_only / minimal_only are structural and applied during
// generation; lc_only / lt_only require a solve and are applied after it
// (graphs whose system is degenerate are dropped by those two filters).
struct EnumerationSpec {
    int max_vertices = 1;
    int min_vertices = 1;
    int max_weight = 1;
    Shape shape = Shape::Any;
    bool elliptic_only = false;
    bool minimal_only = false;
    bool lc_only = false;
    bool lt_only = false;
    std::vector<Rational> coeffs; // coefficient lattice for externals
    int max_externals = 0;
    // Cap on a single edge multiplicity. 0 = automatic: for elliptic_only
    // the largest m with w_i*w_j - m^2 > 0 (a 2x2 minor necessity), else 2.
    int max_edge_mult = 0;
    int threads = 0; // 0 = serial reference path
};

// Lexicographically minimal serialization of g over vertex relabelings that
// sort (weight, genus) nondecreasingly, computed by branch-and-bound over
// label prefixes. Two graphs are isomorphic (as labeled weighted graphs with
// decorated externals) iff their canonical forms compare equal.
std::string canonical_form(const WeightedGraph& g);

// Rebuilds g with the canonical labeling: vertices v1..vn in canonical
// order, externals x1..xk sorted by their canonical record.
WeightedGraph canonical_graph(const WeightedGraph& g);

// Streams every connected graph within the spec's bounds exactly once up to
// canonical form, in a deterministic order (partitioned by vertex count and
// weight multiset, a fixed order within each partition) that does not depend
// on spec.threads. Emitted graphs carry their canonical labeling.
void enumerate_graphs(const EnumerationSpec& spec,
                      const std::function<void(const WeightedGraph&)>& emit);

long long enumerate_count(const EnumerationSpec& spec);

} // namespace discrep
