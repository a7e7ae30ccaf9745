#pragma once

#include <string>
#include <vector>

#include "discrep/enumerate.hpp"
#include "discrep/graph.hpp"
#include "discrep/solver.hpp"

namespace discrep {

// Ordered group of boundary coefficients B = (b_1, ..., b_s).
struct BoundaryGroup {
    std::vector<Rational> coeffs; // each in (0,1]
};

// Coefficients of g's externals, in declaration order. Throws on an unknown
// coefficient: groups compare fixed boundaries only.
BoundaryGroup boundary_of(const WeightedGraph& g);

// Group order: B <= B2 iff B is at least as long and entrywise dominated on
// B2's indices. group_lt additionally needs strictness somewhere — in the
// length or in one entry.
bool group_leq(const BoundaryGroup& b, const BoundaryGroup& b2);
bool group_lt(const BoundaryGroup& b, const BoundaryGroup& b2);

// ---------------------------------------------------------------------------
// pld spectrum
// ---------------------------------------------------------------------------

struct SpectrumEntry {
    Rational value;
    long long generators = 0;           // graphs attaining this exact value
    std::vector<std::string> witnesses; // up to 4 serialized generators
    std::vector<std::string> families;  // up to 4 distinct family labels
};

struct PLDSet {
    std::vector<SpectrumEntry> entries; // ascending by value
    long long total_graphs = 0;
};

// Enumerates per spec (ellipticity is forced: pld reads the minimal
// resolution) and collects min_i a_i per graph. Boundary-free chains take a
// closed-form continuant path; the values agree with the solver exactly.
PLDSet pld_spectrum(const EnumerationSpec& spec);

// Aggregates externally computed values (e.g. a closed-form family sweep)
// into the same shape cluster_check consumes.
PLDSet spectrum_of_values(const std::vector<std::pair<Rational, std::string>>& values);

// Family of a generating graph: a boundary-free chain splits as
// [left part | run of 2's | right part]; with a nonempty run it belongs to
// the two-headed series, labeled "fig2(q1/m1,A=<run>,q2/m2)" by the
// determinant pairs of the two parts. Anything else is "sporadic".
std::string family_label(const WeightedGraph& g);

struct ClusterCandidate {
    Rational center;       // the spectrum value at the window's middle
    long long support = 0; // generators of values within the window
    Rational nearest;      // closest 1/k among the targets
    Rational distance;     // |center - nearest|
};

struct ClusterReport {
    long long candidates = 0;
    std::vector<ClusterCandidate> violations; // candidates off every target (capped)
    std::vector<ClusterCandidate> sample;     // a few on-target candidates (capped)
    bool all_near_targets = true;
};

// Accumulation detection: a value above `floor` is a candidate when the
// generators within `window` of it total at least min_support; every
// candidate must lie within tol of some 1/k, k = 2..max_k.
ClusterReport cluster_check(const PLDSet& s, const Rational& floor, const Rational& window,
                            long long min_support, int max_k, const Rational& tol);

// ---------------------------------------------------------------------------
// Sequence verification (finite-prefix checks of the chain conditions)
// ---------------------------------------------------------------------------

struct SequenceStep {
    Rational value;      // tracked quantity
    std::string tracked; // "pld" (elliptic) or "b0" (first solved external)
    bool lc = false;
    bool group_ok = true;   // B^(n) <= B^(n+1) into the next element
    bool trivial_ok = true; // stated-weight external rows balance exactly
    bool floor_ok = true;   // all a_i >= 1 - max b0 (solved-boundary sequences)
    std::string note;
};

struct SequenceVerdict {
    std::vector<SequenceStep> steps;
    bool hypotheses_ok = false;
    bool increasing = false;    // tracked value strictly increases throughout
    bool nondecreasing = false;
    int first_decrease = -1;    // first index whose value drops below its predecessor
    int first_violation = -1;   // first element failing a hypothesis
};

// Checks the chain-condition hypotheses element by element — lc, boundary
// groups nondecreasing, and for sequences with a solved boundary curve also
// numerical triviality and the a_i >= 1 - max b0 floor — then reports how the
// tracked value moves. Certifies only the finite window it is given.
SequenceVerdict verify_acc_on_sequence(const std::vector<WeightedGraph>& seq);

// ---------------------------------------------------------------------------
// Lemma suites
// ---------------------------------------------------------------------------

struct SuiteReport {
    std::string name;
    long long instances = 0;
    long long counterexamples = 0;
    std::vector<std::string> details; // up to 5 serialized counterexamples
    bool pass = false;
};

// Exhaustive property suites over the spec's bounds. Names:
//   a_less1       all a_i <= 1 on minimal elliptic graphs; < 1 off Du Val
//   subgraph_mono induced subgraphs and lowered weights never lower b_i
//   hyper_mono    weight-1 apex over an elliptic core: b_0 never exceeds the
//                 b_0 of any admissible sub-configuration
//   max_ell       min a_i >= c forces weights <= 2/c (c = 1/2 and 1/3)
//   max_hyp       apex valence obeys sum F_0.F_i <= 2 + 2/b_0
//   loc_bound     lc forces sum of boundary coefficients <= 2
SuiteReport verify_lemma_suite(const std::string& name, const EnumerationSpec& spec);

// Cone family over the ruled-surface shape: a center section of weight n,
// three fibre boundaries at 3/4 linked to it, and a disjoint section at
// 1 - 1/n. Solves to b_0 = 1 + 1/(4n): numerically trivial against the
// contracted section yet never lc.
WeightedGraph cone_family_fixture(int n);

} // namespace discrep
