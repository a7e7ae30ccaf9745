#include "doctest.h"

#include <string>

#include "discrep/error.hpp"
#include "discrep/graph.hpp"

using namespace discrep;

namespace {

WeightedGraph chain_graph(std::initializer_list<int> weights) {
    GraphBuilder b;
    int prev = -1;
    for (int w : weights) {
        int v = b.add_vertex(w);
        if (prev >= 0) b.add_edge(prev, v);
        prev = v;
    }
    return b.build();
}

// Star with all arms of length 1.
WeightedGraph star_graph(int center_w, std::initializer_list<int> arm_w) {
    GraphBuilder b;
    int c = b.add_vertex("c", center_w);
    int k = 0;
    for (int w : arm_w) b.add_edge(c, b.add_vertex("a" + std::to_string(++k), w));
    return b.build();
}

} // namespace

TEST_CASE("builder assembles adjacency and folds parallel edges") {
    GraphBuilder b;
    int u = b.add_vertex("u", 2);
    int v = b.add_vertex("v", 3, 1);
    int x = b.add_external("x", Rational(1, 2));
    b.add_edge(u, v);
    b.add_edge(u, v, 2); // folds with the first edge
    b.add_link(x, v);
    b.add_link(x, v, 3);
    WeightedGraph g = b.build();

    CHECK(g.vertex_count() == 2);
    CHECK(g.external_count() == 1);
    CHECK(g.edges().size() == 1);
    CHECK(g.edge_mult(u, v) == 3);
    CHECK(g.edge_mult(v, u) == 3);
    CHECK(g.vertex(v).genus == 1);
    CHECK(g.links().size() == 1);
    CHECK(g.links()[0].mult == 4);
    CHECK(*g.find_vertex("u") == u);
    CHECK(!g.find_vertex("w").has_value());
    CHECK(*g.find_external("x") == x);

    auto [nb, ne] = g.neighbors(u);
    REQUIRE(ne - nb == 1);
    CHECK(nb->first == v);
    CHECK(nb->second == 3);
    auto [lb, le] = g.vertex_links(v);
    REQUIRE(le - lb == 1);
    CHECK(lb->first == x);
    CHECK(lb->second == 4);
    CHECK(external_load(g, v) == Rational(2));
    CHECK(external_load(g, u) == Rational(0));
}

TEST_CASE("builder rejects bad input") {
    auto expect_throw = [](auto fill) {
        GraphBuilder b;
        fill(b);
        CHECK_THROWS_AS(b.build(), Error);
    };
    expect_throw([](GraphBuilder& b) { b.add_vertex("v", 0); });
    expect_throw([](GraphBuilder& b) { b.add_vertex("v", 2, -1); });
    expect_throw([](GraphBuilder& b) {
        b.add_vertex("v", 2);
        b.add_vertex("v", 3);
    });
    expect_throw([](GraphBuilder& b) {
        int v = b.add_vertex("v", 2);
        b.add_edge(v, v);
    });
    expect_throw([](GraphBuilder& b) { b.add_external("x", Rational(0)); });
    expect_throw([](GraphBuilder& b) { b.add_external("x", Rational(3, 2)); });
    expect_throw([](GraphBuilder& b) { b.add_external("x", Rational(-1, 2)); });
    expect_throw([](GraphBuilder& b) {
        b.add_vertex("v", 2);
        b.add_external("v", Rational(1)); // id collides across kinds
    });

    // Boundary curves with no link and unknown ones are both fine.
    GraphBuilder ok;
    int v = ok.add_vertex("v", 2);
    ok.add_external("loose", Rational(1));
    int y = ok.add_external_unknown("y", 3);
    ok.add_link(y, v);
    WeightedGraph g = ok.build();
    CHECK(g.external(0).coeff.has_value());
    CHECK(!g.external(1).coeff.has_value());
    CHECK(g.external(1).weight == 3);
    CHECK_THROWS_AS(external_load(g, v), Error); // unknown coefficient
}

TEST_CASE("parse and serialize round trip") {
    const char* text =
        "# sample resolution graph\n"
        "vertex v1 weight=2\n"
        "vertex v2 weight=3 genus=1\n"
        "edge v1 v2 mult=2\n"
        "external x coeff=1/2 weight=1\n"
        "external y coeff=?\n"
        "link x v2\n"
        "link y v1 mult=3\n";
    WeightedGraph g = parse_graph(text);
    CHECK(g.vertex_count() == 2);
    CHECK(g.vertex(*g.find_vertex("v2")).genus == 1);
    CHECK(g.edge_mult(0, 1) == 2);
    const ExternalCurve& x = g.external(*g.find_external("x"));
    CHECK(*x.coeff == Rational(1, 2));
    CHECK(*x.weight == 1);
    CHECK(!g.external(*g.find_external("y")).coeff.has_value());

    WeightedGraph again = parse_graph(serialize_graph(g));
    CHECK(again == g);
    CHECK(serialize_graph(again) == serialize_graph(g));
}

TEST_CASE("parse rejects malformed text") {
    CHECK_THROWS_AS(parse_graph("vertex v1\n"), Error);              // missing weight
    CHECK_THROWS_AS(parse_graph("vertex v1 weight=x\n"), Error);     // bad int
    CHECK_THROWS_AS(parse_graph("frob v1 weight=2\n"), Error);       // unknown directive
    CHECK_THROWS_AS(parse_graph("vertex v1 weight=2 size=3\n"), Error);
    CHECK_THROWS_AS(parse_graph("vertex v1 weight=2\nedge v1 v9\n"), Error);
    CHECK_THROWS_AS(parse_graph("external x coeff=0\nvertex v weight=2\n"), Error);
    CHECK_THROWS_AS(parse_graph("vertex v weight=2\nlink x v\n"), Error);
    CHECK_THROWS_AS(parse_graph("vertex v weight=2\nvertex v weight=2\n"), Error);
}

TEST_CASE("connectivity") {
    CHECK(chain_graph({2, 3, 2}).connected());
    GraphBuilder b;
    b.add_vertex("u", 2);
    b.add_vertex("v", 2);
    CHECK(!b.build().connected());
    GraphBuilder one;
    one.add_vertex("v", 5);
    CHECK(one.build().connected());
}

TEST_CASE("minimality flags (-1)-curves") {
    CHECK(is_minimal(chain_graph({2, 3, 2})));
    CHECK(!is_minimal(chain_graph({2, 1, 2})));
    GraphBuilder b;
    b.add_vertex("e", 1, 1); // weight 1 but positive genus: not contractible
    CHECK(is_minimal(b.build()));
}

TEST_CASE("du val recognition") {
    // A_n chains.
    CHECK(is_du_val(chain_graph({2})));
    CHECK(is_du_val(chain_graph({2, 2, 2, 2})));
    CHECK(!is_du_val(chain_graph({2, 3})));

    // D_4 and E_6; bumping one weight or attaching a boundary curve breaks it.
    CHECK(is_du_val(star_graph(2, {2, 2, 2})));
    CHECK(!is_du_val(star_graph(3, {2, 2, 2})));
    {
        GraphBuilder b; // E_6: arms of length 2,2,2 around a center, all weight 2
        int c = b.add_vertex("c", 2);
        for (int arm = 0; arm < 3; arm++) {
            int m = b.add_vertex(2);
            int t = b.add_vertex(2);
            b.add_edge(c, m);
            b.add_edge(m, t);
        }
        CHECK(!is_du_val(b.build())); // that's the affine shape, one arm too long
    }
    {
        GraphBuilder b; // actual E_6: arms 1,2,2
        int c = b.add_vertex("c", 2);
        int a1 = b.add_vertex(2);
        b.add_edge(c, a1);
        for (int arm = 0; arm < 2; arm++) {
            int m = b.add_vertex(2);
            int t = b.add_vertex(2);
            b.add_edge(c, m);
            b.add_edge(m, t);
        }
        CHECK(is_du_val(b.build()));
    }
    {
        GraphBuilder b; // A_1 plus a boundary curve is not bare
        int v = b.add_vertex("v", 2);
        b.add_link(b.add_external("x", Rational(1)), v);
        CHECK(!is_du_val(b.build()));
    }
    {
        GraphBuilder b; // genus kills it too
        b.add_vertex("v", 2, 1);
        CHECK(!is_du_val(b.build()));
    }
    {
        GraphBuilder b; // cycle of (-2)-curves is parabolic, not ADE
        int v0 = b.add_vertex(2), v1 = b.add_vertex(2), v2 = b.add_vertex(2);
        b.add_edge(v0, v1);
        b.add_edge(v1, v2);
        b.add_edge(v2, v0);
        CHECK(!is_du_val(b.build()));
    }
}

TEST_CASE("subgraph embedding checks domination") {
    WeightedGraph big = chain_graph({2, 3, 2});
    WeightedGraph small = chain_graph({2, 2});

    CHECK(is_subgraph(small, big, {{"v1", "v1"}, {"v2", "v2"}}));
    CHECK(is_subgraph(small, big, {{"v1", "v3"}, {"v2", "v2"}}));
    // Unmatched small vertex, non-injective matching, missing edge.
    CHECK(!is_subgraph(small, big, {{"v1", "v1"}}));
    CHECK(!is_subgraph(small, big, {{"v1", "v2"}, {"v2", "v2"}}));
    CHECK(!is_subgraph(small, big, {{"v1", "v1"}, {"v2", "v3"}}));
    // Weight must be dominated.
    CHECK(!is_subgraph(chain_graph({3, 2}), big, {{"v1", "v1"}, {"v2", "v2"}}));
    CHECK(is_subgraph(chain_graph({3, 2}), big, {{"v1", "v2"}, {"v2", "v1"}}));
    CHECK_THROWS_AS(is_subgraph(small, big, {{"v1", "nope"}, {"v2", "v2"}}), Error);

    // External load: a loaded vertex can only map onto one at least as loaded.
    GraphBuilder lb;
    int v = lb.add_vertex("v1", 2);
    lb.add_link(lb.add_external("x", Rational(1, 2)), v);
    WeightedGraph loaded = lb.build();
    CHECK(!is_subgraph(loaded, big, {{"v1", "v1"}}));
    GraphBuilder hb;
    v = hb.add_vertex("v1", 2);
    hb.add_link(hb.add_external("x", Rational(3, 4)), v);
    WeightedGraph heavier = hb.build();
    CHECK(is_subgraph(loaded, heavier, {{"v1", "v1"}}));
    CHECK(!is_subgraph(heavier, loaded, {{"v1", "v1"}}));
}
