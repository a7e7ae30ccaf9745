#include "doctest.h"

#include <string>
#include <vector>

#include "discrep/blowup.hpp"
#include "discrep/error.hpp"
#include "discrep/solver.hpp"

using namespace discrep;

namespace {

// x^2 = y^3 germ: three blowups, the last a satellite, branch mults (2,1,1).
Cluster cusp_cluster(const Rational& coeff) {
    Cluster c;
    c.points.push_back({"p0", -1, -1});
    c.points.push_back({"p1", 0, -1});
    c.points.push_back({"p2", 1, 0});
    c.branches.push_back({"br", coeff, {2, 1, 1}});
    return c;
}

Cluster point_with_lines(int nlines, const Rational& coeff) {
    Cluster c;
    c.points.push_back({"p0", -1, -1});
    for (int i = 1; i <= nlines; i++)
        c.branches.push_back({"l" + std::to_string(i), coeff, {1}});
    return c;
}

} // namespace

TEST_CASE("single blowup coefficient") {
    CHECK(single_blowup_coeff({}) == Rational(-1));
    CHECK(single_blowup_coeff({{2, Rational(1, 2)}, {1, Rational(3, 4)}}) ==
          Rational(3, 4));
    CHECK(single_blowup_coeff({{3, Rational(1)}}) == Rational(2));
}

TEST_CASE("cluster parsing and validation") {
    const char* text =
        "# cusp\n"
        "point p0 parent=root\n"
        "point p1 parent=p0\n"
        "point p2 parent=p1 prox=p0\n"
        "branch br coeff=5/6\n"
        "mult br p0 2\n"
        "mult br p1 1\n"
        "mult br p2 1\n";
    Cluster c = parse_cluster(text);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[2].parent == 1);
    CHECK(c.points[2].prox2 == 0);
    CHECK(c.proximate(2, 0));
    CHECK(c.proximate(2, 1));
    CHECK(!c.proximate(1, 1));
    REQUIRE(c.branches.size() == 1);
    CHECK(c.branches[0].coeff == Rational(5, 6));
    CHECK(c.branches[0].mult == std::vector<long long>{2, 1, 1});
    validate_cluster(c);

    CHECK_THROWS_AS(parse_cluster("point p parent=q\n"), Error);
    CHECK_THROWS_AS(parse_cluster("point p parent=root\nbranch b coeff=0\n"), Error);
    CHECK_THROWS_AS(parse_cluster("point p parent=root\nmult b p 1\n"), Error);

    // Proximity inequality: mults at p0 must cover the proximate points.
    Cluster bad = cusp_cluster(Rational(1, 2));
    bad.branches[0].mult = {1, 1, 1};
    CHECK_THROWS_AS(validate_cluster(bad), Error);
    // Two roots.
    Cluster two;
    two.points.push_back({"p", -1, -1});
    two.points.push_back({"q", -1, -1});
    CHECK_THROWS_AS(validate_cluster(two), Error);
    // prox must name a curve visible at the parent.
    Cluster prox = cusp_cluster(Rational(1, 2));
    prox.points.push_back({"p3", 2, -1});
    prox.points.push_back({"p4", 3, 1});
    for (auto& br : prox.branches) br.mult.resize(5, 0);
    CHECK_THROWS_AS(validate_cluster(prox), Error);
}

TEST_CASE("cusp trace") {
    for (const Rational& c :
         {Rational(5, 6), Rational(1, 2), Rational(1), Rational(1, 3)}) {
        BlowupTrace t = run_trace(cusp_cluster(c));
        CHECK(t.b[0] == Rational(2) * c - Rational(1));
        CHECK(t.b[1] == Rational(3) * c - Rational(2));
        CHECK(t.b[2] == Rational(6) * c - Rational(4));
        for (int i = 0; i < 3; i++) CHECK(t.a[i] == Rational(1) - t.b[i]);
    }
    BlowupTrace t = run_trace(cusp_cluster(Rational(5, 6)));
    CHECK(t.min_a == Rational(0));
    CHECK(run_trace(cusp_cluster(Rational(1))).min_a == Rational(-1));
    // min_a ranges over the cluster's points; the branch value 1 - coeff is
    // the search's business, not the trace's.
    CHECK(run_trace(cusp_cluster(Rational(1, 2))).min_a == Rational(1));
}

TEST_CASE("cluster dual graph reproduces the trace") {
    for (const Rational& coeff : {Rational(5, 6), Rational(1, 2), Rational(1)}) {
        Cluster c = cusp_cluster(coeff);
        BlowupTrace t = run_trace(c);
        WeightedGraph g = cluster_dual_graph(c);
        REQUIRE(g.vertex_count() == 3);
        // Satellite separates the first two curves; weights count proximities.
        int v0 = *g.find_vertex("p0"), v1 = *g.find_vertex("p1"),
            v2 = *g.find_vertex("p2");
        CHECK(g.vertex(v0).weight == 3);
        CHECK(g.vertex(v1).weight == 2);
        CHECK(g.vertex(v2).weight == 1);
        CHECK(g.edge_mult(v0, v2) == 1);
        CHECK(g.edge_mult(v1, v2) == 1);
        CHECK(g.edge_mult(v0, v1) == 0);
        REQUIRE(g.external_count() == 1);
        REQUIRE(g.links().size() == 1);
        CHECK(g.links()[0].vert == v2); // proximity excess sits at the last point

        DiscrepancyReport r = solve_codiscrepancies(g);
        CHECK(r.b[v0] == t.b[0]);
        CHECK(r.b[v1] == t.b[1]);
        CHECK(r.b[v2] == t.b[2]);
    }

    // Free chain of three points: no satellites, curves stay a chain.
    Cluster free3;
    free3.points.push_back({"p0", -1, -1});
    free3.points.push_back({"p1", 0, -1});
    free3.points.push_back({"p2", 1, -1});
    free3.branches.push_back({"br", Rational(3, 4), {1, 1, 1}});
    BlowupTrace t = run_trace(free3);
    WeightedGraph g = cluster_dual_graph(free3);
    DiscrepancyReport r = solve_codiscrepancies(g);
    for (int i = 0; i < 3; i++)
        CHECK(r.b[*g.find_vertex(free3.points[i].id)] == t.b[i]);
}

TEST_CASE("log discrepancy search over a point") {
    // Bare smooth point: one blowup, instantly certified.
    Cluster smooth;
    smooth.points.push_back({"p0", -1, -1});
    SearchResult r = ld_search(smooth, 4);
    CHECK(r.value == Rational(2));
    CHECK(r.complete);

    // One smooth branch with full coefficient: boundary value 0, certified.
    r = ld_search(point_with_lines(1, Rational(1)), 4);
    CHECK(r.value == Rational(0));
    CHECK(r.complete);

    // Three concurrent full lines: not lc, and satellites keep digging.
    r = ld_search(point_with_lines(3, Rational(1)), 1);
    CHECK(r.value == Rational(-1));
    CHECK(!r.complete);
    r = ld_search(point_with_lines(3, Rational(1)), 4);
    CHECK(r.value == Rational(-3));
    CHECK(!r.complete);

    // Cusp at the boundary coefficient: minimum 0, no certificate by depth 6.
    for (int depth : {3, 6}) {
        r = ld_search(cusp_cluster(Rational(5, 6)), depth);
        CHECK(r.value == Rational(0));
        CHECK(!r.complete);
    }
    r = ld_search(cusp_cluster(Rational(1)), 3);
    CHECK(r.value == Rational(-1));
    CHECK(!r.complete);

    // Small coefficient: the branch value is the floor, certified early.
    r = ld_search(point_with_lines(2, Rational(1, 4)), 3);
    CHECK(r.value == Rational(3, 4));
    CHECK(r.complete);

    // Pruning never changes the minimum, only the work.
    for (int depth = 1; depth <= 4; depth++) {
        CHECK(ld_search(cusp_cluster(Rational(5, 6)), depth).value ==
              ld_search(cusp_cluster(Rational(5, 6)), depth, false).value);
        CHECK(ld_search(point_with_lines(3, Rational(1)), depth).value ==
              ld_search(point_with_lines(3, Rational(1)), depth, false).value);
        CHECK(ld_search(point_with_lines(2, Rational(1, 2)), depth).value ==
              ld_search(point_with_lines(2, Rational(1, 2)), depth, false).value);
    }

    CHECK_THROWS_AS(ld_search(smooth, 0), Error);
}

TEST_CASE("graph blowup preserves solved values") {
    WeightedGraph g = parse_graph(
        "vertex v1 weight=2\nvertex v2 weight=3\nedge v1 v2\n"
        "external x coeff=1/2\nlink x v2\n");
    DiscrepancyReport r0 = solve_codiscrepancies(g);

    auto check_preserved = [&](const WeightedGraph& h, const Rational& a_new) {
        DiscrepancyReport r = solve_codiscrepancies(h);
        for (int i = 0; i < g.vertex_count(); i++) {
            const std::string& id = g.vertex(i).id;
            CHECK(r.a[*h.find_vertex(id)] == r0.a[i]);
        }
        CHECK(r.a[*h.find_vertex("n")] == a_new);
    };

    Rational a1 = r0.a[*g.find_vertex("v1")], a2 = r0.a[*g.find_vertex("v2")];
    WeightedGraph he = graph_blowup(g, {BlowupCenter::EdgePoint, "v1", "v2"}, "n");
    CHECK(he.vertex(*he.find_vertex("v1")).weight == 3);
    CHECK(he.vertex(*he.find_vertex("v2")).weight == 4);
    CHECK(he.edge_mult(*he.find_vertex("v1"), *he.find_vertex("v2")) == 0);
    check_preserved(he, a1 + a2);

    WeightedGraph hf = graph_blowup(g, {BlowupCenter::FreePoint, "v1", ""}, "n");
    CHECK(hf.vertex(*hf.find_vertex("v1")).weight == 3);
    check_preserved(hf, a1 + Rational(1));

    WeightedGraph hl = graph_blowup(g, {BlowupCenter::LinkPoint, "x", "v2"}, "n");
    CHECK(hl.vertex(*hl.find_vertex("v2")).weight == 4);
    check_preserved(hl, a2 + Rational(1) - Rational(1, 2));
    // The link now hangs off the new vertex.
    int nx = *hl.find_external("x");
    REQUIRE(hl.links().size() == 1);
    CHECK(hl.links()[0].ext == nx);
    CHECK(hl.vertex(hl.links()[0].vert).id == "n");

    // A multiplicity-2 link keeps the old value on the new curve.
    WeightedGraph m = parse_graph(
        "vertex v1 weight=2\nexternal x coeff=1/2\nlink x v1 mult=2\n");
    DiscrepancyReport rm = solve_codiscrepancies(m);
    WeightedGraph hm = graph_blowup(m, {BlowupCenter::LinkPoint, "x", "v1"}, "n");
    DiscrepancyReport rhm = solve_codiscrepancies(hm);
    CHECK(rhm.a[*hm.find_vertex("n")] == rm.a[0]);
    CHECK(rhm.a[*hm.find_vertex("v1")] == rm.a[0]);

    CHECK_THROWS_AS(graph_blowup(g, {BlowupCenter::EdgePoint, "v1", "v9"}, "n"),
                    Error);
    CHECK_THROWS_AS(graph_blowup(g, {BlowupCenter::LinkPoint, "x", "v1"}, "n"),
                    Error); // x is linked to v2, not v1
}

TEST_CASE("graph-level search") {
    // Multiplicity-1 links everywhere: certificate mode answers instantly.
    WeightedGraph g = parse_graph("vertex v1 weight=2\nvertex v2 weight=3\nedge v1 v2\n");
    SearchResult fast = ld_of_graph(g, 3);
    CHECK(fast.value == Rational(3, 5));
    CHECK(fast.complete);
    SearchResult slow = ld_of_graph(g, 3, false);
    CHECK(slow.value == Rational(3, 5));
    // nonnegative values and multiplicity-1 links certify every leaf, so
    // even the forced walk covers the tree
    CHECK(slow.complete);

    WeightedGraph one = parse_graph("vertex v1 weight=4\n");
    CHECK(ld_of_graph(one, 2).value == Rational(1, 2));

    // A multiplicity-2 link disables the shortcut but not the answer.
    WeightedGraph m = parse_graph(
        "vertex v1 weight=2\nexternal x coeff=1/2\nlink x v1 mult=2\n");
    SearchResult sm = ld_of_graph(m, 3);
    CHECK(sm.value == Rational(1, 2));
    CHECK(!sm.complete); // the multiplicity-2 link blocks every certificate

    // Hypotheses: elliptic and log canonical.
    WeightedGraph hyper = parse_graph(
        "vertex c weight=1\nvertex a1 weight=2\nvertex a2 weight=2\nvertex a3 weight=2\n"
        "edge c a1\nedge c a2\nedge c a3\n");
    CHECK_THROWS_AS(ld_of_graph(hyper, 2), Error);
    WeightedGraph nonlc = parse_graph(
        "vertex v weight=3\nexternal x coeff=1\nexternal y coeff=1\nexternal z coeff=1\n"
        "link x v\nlink y v\nlink z v\n");
    CHECK_THROWS_AS(ld_of_graph(nonlc, 2), Error);
}
