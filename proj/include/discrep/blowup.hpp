#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discrep/graph.hpp"
#include "discrep/rational.hpp"

namespace discrep {

// Infinitely near point: parent = the point it lies on the exceptional curve
// of (-1 = the root, a point of the smooth surface). A satellite point lies
// on two exceptional curves; prox2 names the second one (-1 = free point).
struct ClusterPoint {
    std::string id;
    int parent = -1;
    int prox2 = -1;
};

// Curve branch through the root with a boundary coefficient and a
// multiplicity at every cluster point (0 = branch does not pass through).
struct ClusterBranch {
    std::string id;
    Rational coeff;
    std::vector<long long> mult; // indexed by point
};

// Tree of infinitely near points over one smooth surface point, together
// with branch multiplicity data. Points are stored parents-first; q is
// proximate to p iff p = parent(q) or p = prox2(q).
struct Cluster {
    std::vector<ClusterPoint> points;
    std::vector<ClusterBranch> branches;

    bool proximate(int q, int p) const {
        return points[q].parent == p || points[q].prox2 == p;
    }
};

// File format, one directive per line, '#' starts a comment:
//   point <id> parent=<id>|parent=root [prox=<id>]
//   branch <id> coeff=<p>/<q>
//   mult <branch-id> <point-id> <int>
// prox marks a satellite point: it also lies on the named earlier
// exceptional curve (which must be visible at the parent, i.e. the parent's
// own parent or its prox target). Unstated mults are 0.
Cluster parse_cluster(std::string_view text);

// Throws on malformed data: no unique root, parent order violations, bad
// prox targets, coefficients outside (0,1], or proximity-inconsistent
// multiplicities (mult at p must be >= sum of mults at points proximate
// to p, for every branch).
void validate_cluster(const Cluster& c);

// Codiscrepancy of the exceptional curve of one blowup at a point carrying
// the listed (multiplicity, coefficient) branch data: -1 + sum mult * coeff.
Rational single_blowup_coeff(const std::vector<std::pair<long long, Rational>>& at_point);

// Result of executing the whole cluster in order: for every point, the
// proximity accumulations s and t, the codiscrepancy b = -s + sum t_j b_j of
// its exceptional curve in the final surface, and a = 1 - b.
struct BlowupTrace {
    std::vector<long long> s;
    std::vector<std::vector<long long>> t; // [point][branch]
    std::vector<Rational> b, a;
    Rational min_a;
};

BlowupTrace run_trace(const Cluster& c);

// Weighted dual graph of the final configuration: one vertex per point
// (weight 1 + number of points proximate to it), edges where exceptional
// curves still meet, branch strict transforms linked by proximity excess.
WeightedGraph cluster_dual_graph(const Cluster& c);

struct SearchResult {
    Rational value;
    bool complete = false;
};

// Minimum log discrepancy over all blowup sequences of length <= depth over
// the cluster's root point, including the branches' own values 1 - b_j.
// Branch-and-bound: a new exceptional curve of codiscrepancy <= 0 certifies
// its whole subtree (all deeper values are >= its own), so the search stops
// there; `prune` exists so tests can compare against the unpruned search.
// complete = every unexplored continuation is covered by that certificate.
// Beyond the data recorded in the cluster, a branch of residual multiplicity
// m is taken to continue through free points with multiplicity m.
SearchResult ld_search(const Cluster& c, int depth, bool prune = true);

// Blowup of a point of the configuration described by a graph: an edge
// point (two curves meet), a free point on one curve, or a link point
// (boundary meets curve). Inserts a weight-1 vertex, increments the weights
// of the curves through the center, and reattaches incidences; a link moves
// whole to the new vertex.
struct BlowupCenter {
    enum Kind { EdgePoint, FreePoint, LinkPoint } kind = FreePoint;
    std::string a; // EdgePoint: first vertex; FreePoint: vertex; LinkPoint: external
    std::string b; // EdgePoint: second vertex; LinkPoint: vertex
};

WeightedGraph graph_blowup(const WeightedGraph& g, const BlowupCenter& center,
                           std::string new_id = "");

// Minimum internal log discrepancy over all graph-blowup sequences of
// length <= depth, tracked incrementally (new values from the solved ones:
// edge a_u + a_v, free point a_v + 1, link a_v + 1 - mult * coeff).
// Requires an elliptic, log canonical graph. When every link has
// multiplicity 1 the minimum is the graph's own pld and the search
// certifies instantly; `certificates` exists so tests can force the
// exhaustive walk.
SearchResult ld_of_graph(const WeightedGraph& g, int depth, bool certificates = true);

} // namespace discrep
