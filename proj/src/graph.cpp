#include "discrep/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "discrep/error.hpp"
#include "text_util.hpp"

namespace discrep {

std::optional<int> WeightedGraph::find_vertex(std::string_view id) const {
    for (int i = 0; i < vertex_count(); i++)
        if (vertices_[i].id == id) return i;
    return std::nullopt;
}

std::optional<int> WeightedGraph::find_external(std::string_view id) const {
    for (int i = 0; i < external_count(); i++)
        if (externals_[i].id == id) return i;
    return std::nullopt;
}

int WeightedGraph::edge_mult(int a, int b) const {
    auto [it, end] = neighbors(a);
    for (; it != end; ++it)
        if (it->first == b) return it->second;
    return 0;
}

bool WeightedGraph::connected() const {
    int n = vertex_count();
    if (n <= 1) return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        auto [it, end] = neighbors(v);
        for (; it != end; ++it)
            if (!seen[it->first]) {
                seen[it->first] = 1;
                reached++;
                stack.push_back(it->first);
            }
    }
    return reached == n;
}

bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return serialize_graph(a) == serialize_graph(b);
}

void GraphBuilder::reserve(int nv, int ne, int nx, int nl) {
    g_.vertices_.reserve(nv);
    g_.edges_.reserve(ne);
    g_.externals_.reserve(nx);
    g_.links_.reserve(nl);
}

int GraphBuilder::add_vertex(std::string id, int weight, int genus) {
    g_.vertices_.push_back(Vertex{std::move(id), weight, genus});
    return static_cast<int>(g_.vertices_.size()) - 1;
}

int GraphBuilder::add_vertex(int weight, int genus) {
    return add_vertex("v" + std::to_string(g_.vertices_.size() + 1), weight, genus);
}

int GraphBuilder::add_external(std::string id, Rational coeff, std::optional<int> weight) {
    g_.externals_.push_back(ExternalCurve{std::move(id), std::move(coeff), weight});
    return static_cast<int>(g_.externals_.size()) - 1;
}

int GraphBuilder::add_external_unknown(std::string id, std::optional<int> weight) {
    g_.externals_.push_back(ExternalCurve{std::move(id), std::nullopt, weight});
    return static_cast<int>(g_.externals_.size()) - 1;
}

int GraphBuilder::add_external_unknown(std::optional<int> weight) {
    return add_external_unknown("b" + std::to_string(g_.externals_.size() + 1), weight);
}

void GraphBuilder::add_edge(int a, int b, int mult) {
    g_.edges_.push_back(Edge{std::min(a, b), std::max(a, b), mult});
}

void GraphBuilder::add_link(int ext, int vert, int mult) {
    g_.links_.push_back(Link{ext, vert, mult});
}

WeightedGraph GraphBuilder::build() {
    WeightedGraph g = std::move(g_);
    g_ = WeightedGraph{};

    int n = g.vertex_count(), nx = g.external_count();
    std::set<std::string_view> ids;
    for (const auto& v : g.vertices_) {
        if (v.id.empty()) throw Error("vertex with empty id");
        if (!ids.insert(v.id).second) throw Error("duplicate id '" + v.id + "'");
        if (v.weight < 1) throw Error("vertex '" + v.id + "' has weight < 1");
        if (v.genus < 0) throw Error("vertex '" + v.id + "' has negative genus");
    }
    for (const auto& x : g.externals_) {
        if (x.id.empty()) throw Error("external with empty id");
        if (!ids.insert(x.id).second) throw Error("duplicate id '" + x.id + "'");
        if (x.coeff && (x.coeff->sgn() <= 0 || *x.coeff > Rational(1)))
            throw Error("external '" + x.id + "' coefficient " + x.coeff->str() +
                        " outside (0,1]");
    }

    // Fold parallel edges, reject self-loops and dangling indices.
    std::map<std::pair<int, int>, int> emap;
    for (const auto& e : g.edges_) {
        if (e.a < 0 || e.b >= n) throw Error("edge endpoint out of range");
        if (e.a == e.b)
            throw Error("self-edge at vertex '" + g.vertices_[e.a].id + "'");
        if (e.mult < 1) throw Error("edge with multiplicity < 1");
        emap[{e.a, e.b}] += e.mult;
    }
    g.edges_.clear();
    for (const auto& [k, m] : emap) g.edges_.push_back(Edge{k.first, k.second, m});

    std::map<std::pair<int, int>, int> lmap;
    for (const auto& l : g.links_) {
        if (l.ext < 0 || l.ext >= nx || l.vert < 0 || l.vert >= n)
            throw Error("link endpoint out of range");
        if (l.mult < 1) throw Error("link with multiplicity < 1");
        lmap[{l.ext, l.vert}] += l.mult;
    }
    g.links_.clear();
    for (const auto& [k, m] : lmap) g.links_.push_back(Link{k.first, k.second, m});

    build_adjacency(g);
    return g;
}

void GraphBuilder::build_adjacency(WeightedGraph& g) {
    // CSR adjacency, both directions.
    int n = g.vertex_count();
    g.adj_start_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
        g.adj_start_[e.a + 1]++;
        g.adj_start_[e.b + 1]++;
    }
    for (int i = 0; i < n; i++) g.adj_start_[i + 1] += g.adj_start_[i];
    g.adj_.resize(g.adj_start_[n]);
    {
        std::vector<int> fill(g.adj_start_.begin(), g.adj_start_.end() - 1);
        for (const auto& e : g.edges_) {
            g.adj_[fill[e.a]++] = {e.b, e.mult};
            g.adj_[fill[e.b]++] = {e.a, e.mult};
        }
    }
    g.vlink_start_.assign(n + 1, 0);
    for (const auto& l : g.links_) g.vlink_start_[l.vert + 1]++;
    for (int i = 0; i < n; i++) g.vlink_start_[i + 1] += g.vlink_start_[i];
    g.vlinks_.resize(g.vlink_start_[n]);
    {
        std::vector<int> fill(g.vlink_start_.begin(), g.vlink_start_.end() - 1);
        for (const auto& l : g.links_) g.vlinks_[fill[l.vert]++] = {l.ext, l.mult};
    }
}

WeightedGraph GraphBuilder::build_fast() {
    WeightedGraph g = std::move(g_);
    g_ = WeightedGraph{};
    int n = g.vertex_count(), nx = g.external_count();
    for (const auto& e : g.edges_)
        if (e.a < 0 || e.b >= n || e.a == e.b || e.mult < 1)
            throw Error("build_fast: bad edge");
    for (const auto& l : g.links_)
        if (l.ext < 0 || l.ext >= nx || l.vert < 0 || l.vert >= n || l.mult < 1)
            throw Error("build_fast: bad link");
    build_adjacency(g);
    return g;
}

using detail::Attr;
using detail::parse_int;
using detail::split_line;

WeightedGraph parse_graph(std::string_view text) {
    GraphBuilder b;
    // Two passes: ids first so edges/links may reference forward.
    struct PendingEdge { std::string a, b; int mult; int lineno; };
    struct PendingLink { std::string ext, vert; int mult; int lineno; };
    std::vector<PendingEdge> pedges;
    std::vector<PendingLink> plinks;
    std::map<std::string, int, std::less<>> vids, xids;

    std::vector<std::string> pos;
    std::vector<Attr> attrs;
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        lineno++;
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        split_line(line, lineno, pos, attrs);
        if (pos.empty() && attrs.empty()) continue;
        if (pos.empty())
            throw Error("line " + std::to_string(lineno) + ": missing directive");
        const std::string& kw = pos[0];
        auto want_pos = [&](size_t k) {
            if (pos.size() != k + 1)
                throw Error("line " + std::to_string(lineno) + ": '" + kw + "' expects " +
                            std::to_string(k) + " name(s)");
        };
        if (kw == "vertex") {
            want_pos(1);
            std::optional<int> weight, genus;
            for (const auto& a : attrs) {
                if (a.key == "weight") weight = static_cast<int>(parse_int(a.value, lineno));
                else if (a.key == "genus") genus = static_cast<int>(parse_int(a.value, lineno));
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            if (!weight)
                throw Error("line " + std::to_string(lineno) + ": vertex '" + pos[1] +
                            "' missing weight");
            if (vids.count(pos[1]) || xids.count(pos[1]))
                throw Error("line " + std::to_string(lineno) + ": duplicate id '" + pos[1] + "'");
            vids[pos[1]] = b.add_vertex(pos[1], *weight, genus.value_or(0));
        } else if (kw == "edge") {
            want_pos(2);
            int mult = 1;
            for (const auto& a : attrs) {
                if (a.key == "mult") mult = static_cast<int>(parse_int(a.value, lineno));
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            pedges.push_back({pos[1], pos[2], mult, lineno});
        } else if (kw == "external") {
            want_pos(1);
            std::optional<std::string> coeff;
            std::optional<int> weight;
            for (const auto& a : attrs) {
                if (a.key == "coeff") coeff = a.value;
                else if (a.key == "weight") weight = static_cast<int>(parse_int(a.value, lineno));
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            if (!coeff)
                throw Error("line " + std::to_string(lineno) + ": external '" + pos[1] +
                            "' missing coeff");
            if (vids.count(pos[1]) || xids.count(pos[1]))
                throw Error("line " + std::to_string(lineno) + ": duplicate id '" + pos[1] + "'");
            try {
                if (*coeff == "?") xids[pos[1]] = b.add_external_unknown(pos[1], weight);
                else xids[pos[1]] = b.add_external(pos[1], Rational::from_string(*coeff), weight);
            } catch (const Error& e) {
                throw Error("line " + std::to_string(lineno) + ": " + e.what());
            }
        } else if (kw == "link") {
            want_pos(2);
            int mult = 1;
            for (const auto& a : attrs) {
                if (a.key == "mult") mult = static_cast<int>(parse_int(a.value, lineno));
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            plinks.push_back({pos[1], pos[2], mult, lineno});
        } else {
            throw Error("line " + std::to_string(lineno) + ": unknown directive '" + kw + "'");
        }
    }
    for (const auto& e : pedges) {
        auto a = vids.find(e.a), bb = vids.find(e.b);
        if (a == vids.end())
            throw Error("line " + std::to_string(e.lineno) + ": unknown vertex '" + e.a + "'");
        if (bb == vids.end())
            throw Error("line " + std::to_string(e.lineno) + ": unknown vertex '" + e.b + "'");
        b.add_edge(a->second, bb->second, e.mult);
    }
    for (const auto& l : plinks) {
        auto x = xids.find(l.ext);
        auto v = vids.find(l.vert);
        if (x == xids.end())
            throw Error("line " + std::to_string(l.lineno) + ": unknown external '" + l.ext + "'");
        if (v == vids.end())
            throw Error("line " + std::to_string(l.lineno) + ": unknown vertex '" + l.vert + "'");
        b.add_link(x->second, v->second, l.mult);
    }
    try {
        return b.build();
    } catch (const Error& e) {
        throw Error(std::string("graph validation: ") + e.what());
    }
}

std::string serialize_graph(const WeightedGraph& g) {
    std::ostringstream out;
    std::vector<int> vorder(g.vertex_count());
    for (int i = 0; i < g.vertex_count(); i++) vorder[i] = i;
    std::sort(vorder.begin(), vorder.end(), [&](int a, int b) {
        return g.vertex(a).id < g.vertex(b).id;
    });
    for (int i : vorder) {
        const Vertex& v = g.vertex(i);
        out << "vertex " << v.id << " weight=" << v.weight;
        if (v.genus != 0) out << " genus=" << v.genus;
        out << "\n";
    }
    std::vector<std::pair<std::pair<std::string, std::string>, int>> es;
    for (const auto& e : g.edges()) {
        std::string ia = g.vertex(e.a).id, ib = g.vertex(e.b).id;
        if (ib < ia) std::swap(ia, ib);
        es.push_back({{ia, ib}, e.mult});
    }
    std::sort(es.begin(), es.end());
    for (const auto& [k, m] : es) {
        out << "edge " << k.first << " " << k.second;
        if (m != 1) out << " mult=" << m;
        out << "\n";
    }
    std::vector<int> xorder(g.external_count());
    for (int i = 0; i < g.external_count(); i++) xorder[i] = i;
    std::sort(xorder.begin(), xorder.end(), [&](int a, int b) {
        return g.external(a).id < g.external(b).id;
    });
    for (int i : xorder) {
        const ExternalCurve& x = g.external(i);
        out << "external " << x.id << " coeff=" << (x.coeff ? x.coeff->str() : "?");
        if (x.weight) out << " weight=" << *x.weight;
        out << "\n";
    }
    std::vector<std::pair<std::pair<std::string, std::string>, int>> ls;
    for (const auto& l : g.links())
        ls.push_back({{g.external(l.ext).id, g.vertex(l.vert).id}, l.mult});
    std::sort(ls.begin(), ls.end());
    for (const auto& [k, m] : ls) {
        out << "link " << k.first << " " << k.second;
        if (m != 1) out << " mult=" << m;
        out << "\n";
    }
    return out.str();
}

bool is_minimal(const WeightedGraph& g) {
    for (const auto& v : g.vertices())
        if (v.weight == 1 && v.genus == 0) return false;
    return true;
}

bool is_du_val(const WeightedGraph& g) {
    int n = g.vertex_count();
    if (n == 0 || g.external_count() != 0 || !g.links().empty()) return false;
    for (const auto& v : g.vertices())
        if (v.weight != 2 || v.genus != 0) return false;
    for (const auto& e : g.edges())
        if (e.mult != 1) return false;
    if (static_cast<int>(g.edges().size()) != n - 1) return false; // tree
    if (!g.connected()) return false;

    std::vector<int> deg(n, 0);
    for (const auto& e : g.edges()) {
        deg[e.a]++;
        deg[e.b]++;
    }
    int branch = -1;
    for (int i = 0; i < n; i++) {
        if (deg[i] > 3) return false;
        if (deg[i] == 3) {
            if (branch >= 0) return false;
            branch = i;
        }
    }
    if (branch < 0) return true; // path: A_n
    // Arm lengths from the unique degree-3 vertex.
    std::vector<int> arms;
    auto [it, end] = g.neighbors(branch);
    for (; it != end; ++it) {
        int len = 0, prev = branch, cur = it->first;
        while (true) {
            len++;
            int next = -1;
            auto [jt, jend] = g.neighbors(cur);
            for (; jt != jend; ++jt)
                if (jt->first != prev) next = jt->first;
            if (next < 0) break;
            prev = cur;
            cur = next;
        }
        arms.push_back(len);
    }
    std::sort(arms.begin(), arms.end());
    if (arms[0] != 1) return false;
    if (arms[1] == 1) return true;                      // D_n
    return arms[1] == 2 && arms[2] >= 2 && arms[2] <= 4; // E6, E7, E8
}

Rational external_load(const WeightedGraph& g, int v) {
    Rational load;
    auto [it, end] = g.vertex_links(v);
    for (; it != end; ++it) {
        const ExternalCurve& x = g.external(it->first);
        if (!x.coeff)
            throw Error("external '" + x.id + "' has unknown coefficient");
        load += *x.coeff * Rational(it->second);
    }
    return load;
}

bool is_subgraph(const WeightedGraph& small, const WeightedGraph& big,
                 const std::vector<std::pair<std::string, std::string>>& matching) {
    std::vector<int> to_big(small.vertex_count(), -1);
    std::set<int> used;
    for (const auto& [sid, bid] : matching) {
        auto si = small.find_vertex(sid);
        auto bi = big.find_vertex(bid);
        if (!si) throw Error("matching names unknown vertex '" + sid + "'");
        if (!bi) throw Error("matching names unknown vertex '" + bid + "'");
        if (to_big[*si] >= 0 || !used.insert(*bi).second) return false; // not injective
        to_big[*si] = *bi;
    }
    for (int i = 0; i < small.vertex_count(); i++) {
        if (to_big[i] < 0) return false; // every small vertex must be matched
        const Vertex& sv = small.vertex(i);
        const Vertex& bv = big.vertex(to_big[i]);
        if (sv.weight > bv.weight || sv.genus > bv.genus) return false;
        if (external_load(small, i) > external_load(big, to_big[i])) return false;
    }
    for (const auto& e : small.edges())
        if (e.mult > big.edge_mult(to_big[e.a], to_big[e.b])) return false;
    return true;
}

} // namespace discrep
