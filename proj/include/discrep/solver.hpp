#pragma once

#include <string>
#include <vector>

#include "discrep/graph.hpp"

namespace discrep {

enum class GraphClass { Elliptic, Parabolic, Hyperbolic, Other };

std::string to_string(GraphClass c);

// Inertia (n_plus, n_zero, n_minus) of the symmetric intersection matrix.
struct Signature {
    int plus = 0, zero = 0, minus = 0;

    GraphClass cls() const {
        if (plus == 0 && zero == 0) return GraphClass::Elliptic;
        if (plus == 0 && zero == 1) return GraphClass::Parabolic;
        if (plus == 1 && zero == 0) return GraphClass::Hyperbolic;
        return GraphClass::Other;
    }
    std::string str() const {
        return "(" + std::to_string(plus) + "," + std::to_string(zero) + "," +
               std::to_string(minus) + ")";
    }
    friend bool operator==(const Signature&, const Signature&) = default;
};

// Dense symmetric matrix of F_i . F_k over the solve set: all internal
// vertices (rows 0..nv-1) followed by the unknown-coefficient externals that
// get solved alongside them (which require a stated weight = -B^2).
struct IntersectionMatrix {
    int n = 0;
    std::vector<long long> entry; // row-major n*n
    std::vector<std::string> row_id;
    std::vector<int> row_vertex;   // vertex index or -1
    std::vector<int> row_external; // external index or -1

    long long at(int i, int j) const { return entry[static_cast<size_t>(i) * n + j]; }
};

IntersectionMatrix intersection_matrix(const WeightedGraph& g);

Signature inertia(const IntersectionMatrix& m);
Signature inertia(const WeightedGraph& g);

// Thrown by solve when the intersection matrix is singular.
class DegenerateSystem : public Error {
public:
    DegenerateSystem(Signature s, const std::string& what) : Error(what), sig(s) {}
    Signature sig;
};

// Solution of the numerically-trivial system: for every solve row k,
//   sum_i b_i (F_i . F_k) = 2 - 2 genus(k) - weight(k) - sum_j b_j (B_j . F_k),
// the sum on the right over fixed-coefficient externals. b = codiscrepancies
// (solved external coefficients for promoted rows), a = 1 - b.
struct DiscrepancyReport {
    Signature sig;
    int internal_rows = 0;        // = g.vertex_count(); promoted externals follow
    std::vector<Rational> b, a;   // per solve row
    std::vector<int> promoted;    // external indices, in row order
    Rational pld;                 // min a over internal rows (elliptic graphs)
    std::vector<int> pld_at;      // vertex indices attaining pld
    bool lc = false;              // all a >= 0 across solve rows
    bool lt = false;              // all a > 0
};

DiscrepancyReport solve_codiscrepancies(const WeightedGraph& g);

// Same, reusing the report's buffers; the sweep-friendly entry point.
void solve_into(const WeightedGraph& g, DiscrepancyReport& r);

// Minimal log discrepancy of the given (minimal-resolution) graph:
// min_i a_i over internal vertices. Requires an elliptic graph.
Rational pld(const WeightedGraph& g);

// Sum of boundary coefficients; lemma check for connected elliptic lc graphs
// whose externals all carry fixed coefficients and at least one link.
// Returns whether sum_j b_j <= 2; throws if a hypothesis fails.
bool check_local_bound(const WeightedGraph& g);

// Whether b == 1 on every solve row satisfies the system (the degenerate
// boundary case: parabolic graphs of elliptic-singularity type).
bool unit_codiscrepancies_satisfy(const WeightedGraph& g);

// Residue of the numerically-trivial condition against each external curve
// whose self-intersection is stated: (K + sum b_j B_j + sum b_i F_i) . B_x.
// Intersections between distinct externals are not modeled (taken as 0).
std::vector<std::pair<int, Rational>>
triviality_defects(const WeightedGraph& g, const DiscrepancyReport& r);

// Text report; see README for the exact line grammar.
std::string render_report(const WeightedGraph& g, const DiscrepancyReport& r);

} // namespace discrep
