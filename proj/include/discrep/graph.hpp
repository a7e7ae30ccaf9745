#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "discrep/rational.hpp"

namespace discrep {

// Internal curve of the resolution: weight = -F^2 >= 1, genus >= 0.
struct Vertex {
    std::string id;
    int weight = 0;
    int genus = 0;
};

// Boundary curve B_j. coeff is its multiplicity in (0,1], or nullopt when
// unknown (to be solved for). weight = -B^2, known only when stated; needed
// to promote an unknown external into the linear system (may be <= 0: a
// fiber has B^2 = 0, a positive section B^2 > 0).
struct ExternalCurve {
    std::string id;
    std::optional<Rational> coeff;
    std::optional<int> weight;
};

// Undirected, no self-loops, parallel edges folded into mult.
struct Edge {
    int a = 0, b = 0; // vertex indices, a < b
    int mult = 1;
};

struct Link {
    int ext = 0, vert = 0; // external index, vertex index
    int mult = 1;
};

// Weighted dual graph of a resolution together with its boundary curves.
// Immutable once built; construction goes through GraphBuilder or parse_graph.
// Vertex/external storage keeps insertion order (chains built in chain order
// give banded intersection matrices); serialization sorts by id.
class WeightedGraph {
public:
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int external_count() const { return static_cast<int>(externals_.size()); }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const ExternalCurve& external(int i) const { return externals_[i]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<ExternalCurve>& externals() const { return externals_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Link>& links() const { return links_; }

    std::optional<int> find_vertex(std::string_view id) const;
    std::optional<int> find_external(std::string_view id) const;

    // CSR adjacency over internal vertices: (neighbor index, multiplicity).
    std::pair<const std::pair<int, int>*, const std::pair<int, int>*>
    neighbors(int v) const {
        return {adj_.data() + adj_start_[v], adj_.data() + adj_start_[v + 1]};
    }
    // Links incident to vertex v: (external index, multiplicity).
    std::pair<const std::pair<int, int>*, const std::pair<int, int>*>
    vertex_links(int v) const {
        return {vlinks_.data() + vlink_start_[v], vlinks_.data() + vlink_start_[v + 1]};
    }

    int edge_mult(int a, int b) const; // 0 when absent
    bool connected() const;            // via edges, over internal vertices

    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b);

private:
    friend class GraphBuilder;
    std::vector<Vertex> vertices_;
    std::vector<ExternalCurve> externals_;
    std::vector<Edge> edges_;
    std::vector<Link> links_;
    std::vector<int> adj_start_, vlink_start_;
    std::vector<std::pair<int, int>> adj_, vlinks_;
};

class GraphBuilder {
public:
    void reserve(int nv, int ne, int nx, int nl);

    int add_vertex(std::string id, int weight, int genus = 0);
    int add_vertex(int weight, int genus = 0); // auto-named v1, v2, ...
    int add_external(std::string id, Rational coeff,
                     std::optional<int> weight = std::nullopt);
    int add_external_unknown(std::string id,
                             std::optional<int> weight = std::nullopt);
    int add_external_unknown(std::optional<int> weight = std::nullopt);
    void add_edge(int a, int b, int mult = 1);
    void add_link(int ext, int vert, int mult = 1);

    // Validates, folds parallel edges/links, builds adjacency. Resets the builder.
    WeightedGraph build();

    // Trusting variant for generated graphs: same result as build() provided
    // the caller already guarantees unique ids, valid attributes, and no
    // parallel edges/links. Skips the fold maps; keeps cheap checks on.
    WeightedGraph build_fast();

private:
    static void build_adjacency(WeightedGraph& g);
    WeightedGraph g_;
};

// File format, one directive per line, '#' starts a comment:
//   vertex <id> weight=<int> [genus=<int>]
//   edge <id> <id> [mult=<int>]
//   external <id> coeff=<p>/<q>|coeff=? [weight=<int>]
//   link <ext-id> <vertex-id> [mult=<int>]
WeightedGraph parse_graph(std::string_view text);
std::string serialize_graph(const WeightedGraph& g);

// True iff no vertex is a contractible (-1)-curve (genus 0, weight 1).
bool is_minimal(const WeightedGraph& g);

// True iff g is one of the Du Val graphs A_n, D_n, E6, E7, E8: connected,
// no externals, all genus 0, all weights 2, and the shape is an ADE tree.
bool is_du_val(const WeightedGraph& g);

// Checks that `matching` (small-vertex-id -> big-vertex-id) embeds small into
// big: injective, weights/genera/edge multiplicities dominated, and each
// matched vertex's weighted external load sum_j b_j (B_j . F_i) dominated.
// Throws if a load involves an unknown coefficient.
bool is_subgraph(const WeightedGraph& small, const WeightedGraph& big,
                 const std::vector<std::pair<std::string, std::string>>& matching);

// Total boundary load on vertex v: sum_j coeff_j * linkmult(j, v).
// Throws on unknown coefficients.
Rational external_load(const WeightedGraph& g, int v);

} // namespace discrep
