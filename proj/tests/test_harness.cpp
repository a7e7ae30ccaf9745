#include "doctest.h"

#include <map>
#include <string>
#include <vector>

#include "discrep/error.hpp"
#include "discrep/family.hpp"
#include "discrep/harness.hpp"
#include "discrep/solver.hpp"

using namespace discrep;

namespace {

BoundaryGroup grp(std::vector<Rational> v) { return BoundaryGroup{std::move(v)}; }

WeightedGraph bare_chain(const std::vector<int>& weights) {
    GraphBuilder b;
    int prev = -1;
    for (int w : weights) {
        int v = b.add_vertex(w);
        if (prev >= 0) b.add_edge(prev, v);
        prev = v;
    }
    return b.build();
}

// Star of chain arms around an unknown boundary center of weight 1; the
// center coefficient comes out of the solve.
WeightedGraph promoted_star(const std::vector<std::pair<long long, long long>>& arms) {
    GraphBuilder b;
    int x = b.add_external_unknown("x0", 1);
    for (size_t s = 0; s < arms.size(); s++) {
        Chain c = chain_from_pair(arms[s].first, arms[s].second);
        int prev = -1;
        for (size_t i = 0; i < c.weights.size(); i++) {
            int v = b.add_vertex("a" + std::to_string(s) + "v" + std::to_string(i),
                                 c.weights[i]);
            if (prev >= 0) b.add_edge(prev, v);
            if (i == 0) b.add_link(x, v);
            prev = v;
        }
    }
    return b.build();
}

WeightedGraph decorated_a1(const Rational& coeff) {
    GraphBuilder b;
    int v = b.add_vertex("v1", 2);
    b.add_link(b.add_external("x", coeff), v);
    return b.build();
}

} // namespace

TEST_CASE("boundary group order") {
    CHECK(group_leq(grp({Rational(1, 2)}), grp({Rational(1, 2)})));
    CHECK(!group_lt(grp({Rational(1, 2)}), grp({Rational(1, 2)})));
    CHECK(group_lt(grp({Rational(1, 2)}), grp({Rational(3, 4)})));
    CHECK(!group_leq(grp({Rational(3, 4)}), grp({Rational(1, 2)})));

    // Longer groups sit below shorter ones (more boundary, smaller pair).
    CHECK(group_leq(grp({Rational(1, 2), Rational(1, 4)}), grp({Rational(1, 2)})));
    CHECK(group_lt(grp({Rational(1, 2), Rational(1, 4)}), grp({Rational(1, 2)})));
    CHECK(!group_leq(grp({Rational(1, 2)}), grp({Rational(1, 2), Rational(1, 4)})));
    CHECK(group_leq(grp({}), grp({})));
    CHECK(!group_lt(grp({}), grp({})));
    CHECK(group_lt(grp({Rational(1)}), grp({})));

    // Partial-order laws over all lattice vectors of length <= 3.
    std::vector<Rational> lattice = {Rational(1, 4), Rational(1, 2), Rational(3, 4),
                                     Rational(1)};
    std::vector<BoundaryGroup> all;
    all.push_back(grp({}));
    for (const Rational& a : lattice) {
        all.push_back(grp({a}));
        for (const Rational& b : lattice) {
            all.push_back(grp({a, b}));
            for (const Rational& c : lattice) all.push_back(grp({a, b, c}));
        }
    }
    auto same = [](const BoundaryGroup& a, const BoundaryGroup& b) {
        return a.coeffs == b.coeffs;
    };
    for (const auto& a : all) {
        CHECK(group_leq(a, a));
        for (const auto& b : all) {
            CHECK(group_lt(a, b) == (group_leq(a, b) && !group_leq(b, a)));
            if (group_leq(a, b) && group_leq(b, a)) CHECK(same(a, b));
            for (const auto& c : all)
                if (group_leq(a, b) && group_leq(b, c)) CHECK(group_leq(a, c));
        }
    }
}

TEST_CASE("boundary_of reads declaration order") {
    GraphBuilder b;
    int v = b.add_vertex("v", 2);
    b.add_external("s", Rational(1, 3));
    b.add_link(b.add_external("f", Rational(3, 4)), v);
    BoundaryGroup g = boundary_of(b.build());
    CHECK(g.coeffs == std::vector<Rational>{Rational(1, 3), Rational(3, 4)});

    GraphBuilder u;
    int w = u.add_vertex("v", 2);
    u.add_link(u.add_external_unknown("x", 1), w);
    CHECK_THROWS_AS(boundary_of(u.build()), Error);
}

TEST_CASE("family labels") {
    CHECK(family_label(bare_chain({3, 2, 2, 2, 3})) == "fig2(1/3,A=3,1/3)");
    CHECK(family_label(bare_chain({3, 2})) == "fig2(1/3,A=1,0/1)");
    CHECK(family_label(bare_chain({2, 3})) == "fig2(0/1,A=1,1/3)");
    CHECK(family_label(bare_chain({2, 2, 2})) == "fig2(0/1,A=3,0/1)");
    CHECK(family_label(bare_chain({3, 2, 2, 5, 2, 3})) == "fig2(1/3,A=2,5/22)");
    CHECK(family_label(bare_chain({3, 3})) == "sporadic");
    CHECK(family_label(bare_chain({5})) == "sporadic");

    // Longest run wins; leftmost breaks ties.
    CHECK(family_label(bare_chain({2, 3, 2, 2})) == "fig2(2/5,A=2,0/1)");
    CHECK(family_label(bare_chain({2, 3, 2})) == "fig2(0/1,A=1,2/5)");

    // Stars, decorations, genus, and multiple edges are all off the chart.
    GraphBuilder s;
    int c = s.add_vertex(1);
    for (int i = 0; i < 3; i++) s.add_edge(c, s.add_vertex(2));
    CHECK(family_label(s.build()) == "sporadic");
    CHECK(family_label(decorated_a1(Rational(1, 2))) == "sporadic");
    GraphBuilder gg;
    gg.add_vertex("v", 2, 1);
    CHECK(family_label(gg.build()) == "sporadic");
    GraphBuilder dd;
    int u = dd.add_vertex(2), v = dd.add_vertex(3);
    dd.add_edge(u, v, 2);
    CHECK(family_label(dd.build()) == "sporadic");
}

TEST_CASE("pld spectrum over small graphs") {
    // Minimal elliptic graphs, <= 2 vertices, weights <= 3, simple edges:
    // [2] -> 1, [3] -> 2/3, [2,2] -> 1, [2,3] -> 3/5, [3,3] -> 1/2.
    EnumerationSpec spec;
    spec.max_vertices = 2;
    spec.max_weight = 3;
    spec.minimal_only = true;
    spec.max_edge_mult = 1;
    PLDSet s = pld_spectrum(spec);
    CHECK(s.total_graphs == 5);
    REQUIRE(s.entries.size() == 4);
    CHECK(s.entries[0].value == Rational(1, 2));
    CHECK(s.entries[0].generators == 1);
    CHECK(s.entries[1].value == Rational(3, 5));
    CHECK(s.entries[2].value == Rational(2, 3));
    CHECK(s.entries[3].value == Rational(1));
    CHECK(s.entries[3].generators == 2);
    CHECK(s.entries[1].families == std::vector<std::string>{"fig2(0/1,A=1,1/3)"});
    CHECK(s.entries[0].families == std::vector<std::string>{"sporadic"});
    REQUIRE(!s.entries[1].witnesses.empty());
    CHECK(parse_graph(s.entries[1].witnesses[0]).vertex_count() == 2);

    // Double edges join in under the automatic cap: [2,3] and [3,3] doubled
    // are still negative definite and land on pld 0.
    EnumerationSpec open = spec;
    open.max_edge_mult = 0;
    PLDSet s2 = pld_spectrum(open);
    CHECK(s2.total_graphs == 7);
    CHECK(s2.entries.front().value == Rational(0));
    CHECK(s2.entries.front().generators == 2);

    // Entries ascend and account for every graph.
    long long sum = 0;
    for (size_t i = 0; i < s2.entries.size(); i++) {
        sum += s2.entries[i].generators;
        if (i) CHECK(s2.entries[i - 1].value < s2.entries[i].value);
    }
    CHECK(sum == s2.total_graphs);
}

TEST_CASE("chain fast path agrees with the solver") {
    EnumerationSpec spec;
    spec.max_vertices = 6;
    spec.max_weight = 4;
    spec.shape = Shape::Chain;
    PLDSet s = pld_spectrum(spec);

    std::map<Rational, long long> direct;
    long long total = 0;
    EnumerationSpec esolve = spec;
    esolve.elliptic_only = true;
    enumerate_graphs(esolve, [&](const WeightedGraph& g) {
        direct[pld(g)]++;
        total++;
    });
    CHECK(total == s.total_graphs);
    REQUIRE(direct.size() == s.entries.size());
    size_t i = 0;
    for (const auto& [v, count] : direct) {
        CHECK(s.entries[i].value == v);
        CHECK(s.entries[i].generators == count);
        i++;
    }
}

TEST_CASE("spectrum aggregation and clustering") {
    std::vector<std::pair<Rational, std::string>> vals;
    for (int i = 0; i < 12; i++) vals.emplace_back(Rational(1, 3), "famA");
    vals.emplace_back(Rational(1, 3), "famB");
    vals.emplace_back(Rational(3, 5), "famA");
    PLDSet s = spectrum_of_values(vals);
    CHECK(s.total_graphs == 14);
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].value == Rational(1, 3));
    CHECK(s.entries[0].generators == 13);
    CHECK(s.entries[0].families ==
          std::vector<std::string>{"famA", "famB"});

    // The 1/3 mass clusters on target; the lone 3/5 value has no support.
    ClusterReport rep = cluster_check(s, Rational(9, 100), Rational(1, 100), 10, 11,
                                      Rational(1, 100));
    CHECK(rep.candidates == 1);
    CHECK(rep.all_near_targets);
    REQUIRE(rep.sample.size() == 1);
    CHECK(rep.sample[0].center == Rational(1, 3));
    CHECK(rep.sample[0].support == 13);
    CHECK(rep.sample[0].nearest == Rational(1, 3));
    CHECK(rep.sample[0].distance == Rational(0));

    // Mass far from every 1/k is flagged.
    std::vector<std::pair<Rational, std::string>> bad = vals;
    for (int i = 0; i < 11; i++) bad.emplace_back(Rational(2, 5), "famC");
    ClusterReport rb = cluster_check(spectrum_of_values(bad), Rational(9, 100),
                                     Rational(1, 100), 10, 11, Rational(1, 100));
    CHECK(!rb.all_near_targets);
    REQUIRE(rb.violations.size() == 1);
    CHECK(rb.violations[0].center == Rational(2, 5));
    CHECK(rb.violations[0].nearest == Rational(1, 3)); // |2/5-1/3| < |2/5-1/2|
    CHECK(rb.violations[0].distance == Rational(1, 15));

    // Below the floor nothing is a candidate; max_k widens the target set.
    std::vector<std::pair<Rational, std::string>> low(
        20, {Rational(1, 20), "famD"});
    CHECK(cluster_check(spectrum_of_values(low), Rational(9, 100), Rational(1, 100),
                        10, 11, Rational(1, 100))
              .candidates == 0);
    std::vector<std::pair<Rational, std::string>> eleventh(
        15, {Rational(1, 11), "famE"});
    PLDSet se = spectrum_of_values(eleventh);
    CHECK(cluster_check(se, Rational(9, 100), Rational(1, 100), 10, 11,
                        Rational(1, 100))
              .all_near_targets);
    CHECK(!cluster_check(se, Rational(9, 100), Rational(1, 100), 10, 5,
                         Rational(1, 100))
               .all_near_targets);
    CHECK_THROWS_AS(cluster_check(se, Rational(0), Rational(1, 100), 1, 1, Rational(1)),
                    Error);

    // Window support pools neighboring values.
    std::vector<std::pair<Rational, std::string>> pooled;
    for (int i = 0; i < 6; i++) pooled.emplace_back(Rational(1, 2), "famF");
    for (int i = 0; i < 6; i++)
        pooled.emplace_back(Rational(1, 2) + Rational(1, 200), "famF");
    ClusterReport rp = cluster_check(spectrum_of_values(pooled), Rational(9, 100),
                                     Rational(1, 100), 10, 11, Rational(1, 100));
    CHECK(rp.candidates == 2);
    CHECK(rp.all_near_targets);
}

TEST_CASE("sequence verification: passing sequences") {
    // Boundary sweep on A_1: groups grow, pld strictly falls.
    std::vector<WeightedGraph> sweep;
    for (const Rational& c : {Rational(1, 4), Rational(1, 2), Rational(3, 4)})
        sweep.push_back(decorated_a1(c));
    SequenceVerdict v = verify_acc_on_sequence(sweep);
    CHECK(v.hypotheses_ok);
    CHECK(v.first_violation == -1);
    REQUIRE(v.steps.size() == 3);
    for (int i = 0; i < 3; i++) {
        CHECK(v.steps[i].tracked == "pld");
        CHECK(v.steps[i].lc);
    }
    CHECK(v.steps[0].value == Rational(7, 8));
    CHECK(v.steps[1].value == Rational(3, 4));
    CHECK(v.steps[2].value == Rational(5, 8));
    CHECK(!v.increasing);
    CHECK(!v.nondecreasing);
    CHECK(v.first_decrease == 1);

    // Promoted stars: tracked switches to the solved center coefficient.
    std::vector<WeightedGraph> stars = {promoted_star({{2, 3}, {2, 3}, {2, 3}}),
                                        promoted_star({{3, 4}, {3, 4}, {3, 4}}),
                                        promoted_star({{4, 5}, {4, 5}, {4, 5}})};
    SequenceVerdict vs = verify_acc_on_sequence(stars);
    CHECK(vs.hypotheses_ok);
    REQUIRE(vs.steps.size() == 3);
    CHECK(vs.steps[0].tracked == "b0");
    CHECK(vs.steps[0].value == Rational(1));
    CHECK(vs.steps[1].value == Rational(4, 5));
    CHECK(vs.steps[2].value == Rational(5, 7));
    for (const auto& st : vs.steps) {
        CHECK(st.trivial_ok);
        CHECK(st.floor_ok);
    }
    CHECK(vs.first_decrease == 1);

    // A constant sequence is nondecreasing but not increasing.
    std::vector<WeightedGraph> flat = {bare_chain({2, 3}), bare_chain({2, 3})};
    SequenceVerdict vf = verify_acc_on_sequence(flat);
    CHECK(vf.hypotheses_ok);
    CHECK(vf.nondecreasing);
    CHECK(!vf.increasing);
    CHECK(vf.first_decrease == -1);
}

TEST_CASE("sequence verification: violations") {
    // Shrinking boundary group.
    std::vector<WeightedGraph> shrink = {decorated_a1(Rational(3, 4)),
                                         decorated_a1(Rational(1, 2))};
    SequenceVerdict v = verify_acc_on_sequence(shrink);
    CHECK(!v.hypotheses_ok);
    CHECK(v.first_violation == 0);
    CHECK(!v.steps[0].group_ok);
    CHECK(v.steps[1].group_ok); // last element has nothing to compare into

    // Degenerate element.
    GraphBuilder tri;
    int t0 = tri.add_vertex(2), t1 = tri.add_vertex(2), t2 = tri.add_vertex(2);
    tri.add_edge(t0, t1);
    tri.add_edge(t1, t2);
    tri.add_edge(t2, t0);
    SequenceVerdict vd = verify_acc_on_sequence({tri.build()});
    CHECK(!vd.hypotheses_ok);
    CHECK(vd.steps[0].tracked == "none");
    CHECK(vd.steps[0].note.find("degenerate") != std::string::npos);

    // Promoted row next to an unbalanced fixed external: triviality and the
    // discrepancy floor both break.
    GraphBuilder b;
    int w = b.add_vertex("v", 2);
    int ux = b.add_external_unknown("u", 2);
    b.add_link(ux, w);
    b.add_link(b.add_external("x", Rational(1, 2), 3), w);
    SequenceVerdict vt = verify_acc_on_sequence({b.build()});
    CHECK(!vt.hypotheses_ok);
    CHECK(!vt.steps[0].trivial_ok);
    CHECK(!vt.steps[0].floor_ok);
    CHECK(vt.steps[0].note.find("triviality defect") != std::string::npos);

    // Non-lc element.
    GraphBuilder n;
    int nv = n.add_vertex("v", 3);
    for (int i = 0; i < 3; i++)
        n.add_link(n.add_external("x" + std::to_string(i), Rational(1)), nv);
    SequenceVerdict vn = verify_acc_on_sequence({n.build()});
    CHECK(!vn.hypotheses_ok);
    CHECK(!vn.steps[0].lc);
}

TEST_CASE("cone family fixture") {
    BoundaryGroup prev;
    for (int n = 2; n <= 10; n++) {
        WeightedGraph g = cone_family_fixture(n);
        CHECK(g.vertex_count() == 1);
        CHECK(g.vertex(0).weight == n);
        CHECK(g.external_count() == 4);
        CHECK(*g.external(0).coeff == Rational(n - 1, n));

        DiscrepancyReport r = solve_codiscrepancies(g);
        CHECK(r.b[0] == Rational(1) + Rational(1, 4 * n));
        CHECK(r.a[0] == Rational(-1, 4 * n));
        CHECK(!r.lc);

        BoundaryGroup cur = boundary_of(g);
        if (n > 2) {
            CHECK(group_leq(prev, cur));
            CHECK(group_lt(prev, cur));
        }
        prev = cur;
    }

    // The whole parade fails log canonicity from its first element, while
    // the tracked value and the boundary groups both march upward.
    std::vector<WeightedGraph> seq;
    for (int n = 2; n <= 10; n++) seq.push_back(cone_family_fixture(n));
    SequenceVerdict v = verify_acc_on_sequence(seq);
    CHECK(!v.hypotheses_ok);
    CHECK(v.first_violation == 0);
    CHECK(v.increasing);
    for (const auto& st : v.steps) {
        CHECK(!st.lc);
        CHECK(st.group_ok);
        CHECK(st.tracked == "pld");
    }
}

TEST_CASE("lemma suites on small desks") {
    EnumerationSpec spec;
    spec.max_vertices = 4;
    spec.max_weight = 4;
    spec.coeffs = {Rational(1, 2), Rational(1)};
    spec.max_externals = 2;

    for (const char* name :
         {"a_less1", "max_ell", "loc_bound", "subgraph_mono", "max_hyp", "hyper_mono"}) {
        SuiteReport rep = verify_lemma_suite(name, spec);
        CHECK(rep.name == name);
        CHECK(rep.pass);
        CHECK(rep.counterexamples == 0);
        CHECK(rep.instances > 0);
    }
    CHECK_THROWS_AS(verify_lemma_suite("unknown", spec), Error);
}
