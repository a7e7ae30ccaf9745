#include "discrep/blowup.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "discrep/error.hpp"
#include "discrep/solver.hpp"
#include "text_util.hpp"

namespace discrep {

using detail::Attr;
using detail::parse_int;
using detail::split_line;

Cluster parse_cluster(std::string_view text) {
    Cluster c;
    std::map<std::string, int, std::less<>> pids, bids;
    struct PendingMult {
        std::string branch, point;
        long long m;
        int lineno;
    };
    std::vector<PendingMult> pmults;

    std::vector<std::string> pos;
    std::vector<Attr> attrs;
    detail::for_each_line(text, [&](std::string_view line, int lineno) {
        split_line(line, lineno, pos, attrs);
        if (pos.empty() && attrs.empty()) return;
        if (pos.empty())
            throw Error("line " + std::to_string(lineno) + ": missing directive");
        const std::string& kw = pos[0];
        if (kw == "point") {
            if (pos.size() != 2)
                throw Error("line " + std::to_string(lineno) + ": 'point' expects one id");
            std::string parent, prox;
            for (const auto& a : attrs) {
                if (a.key == "parent") parent = a.value;
                else if (a.key == "prox") prox = a.value;
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            if (parent.empty())
                throw Error("line " + std::to_string(lineno) + ": point '" + pos[1] +
                            "' missing parent= (use parent=root for the root)");
            if (pids.count(pos[1]))
                throw Error("line " + std::to_string(lineno) + ": duplicate point '" + pos[1] + "'");
            ClusterPoint p;
            p.id = pos[1];
            if (parent != "root") {
                auto it = pids.find(parent);
                if (it == pids.end())
                    throw Error("line " + std::to_string(lineno) + ": unknown parent '" +
                                parent + "' (parents must be declared first)");
                p.parent = it->second;
            }
            if (!prox.empty()) {
                auto it = pids.find(prox);
                if (it == pids.end())
                    throw Error("line " + std::to_string(lineno) + ": unknown prox target '" + prox + "'");
                p.prox2 = it->second;
            }
            pids[p.id] = (int)c.points.size();
            c.points.push_back(std::move(p));
        } else if (kw == "branch") {
            if (pos.size() != 2)
                throw Error("line " + std::to_string(lineno) + ": 'branch' expects one id");
            std::string coeff;
            for (const auto& a : attrs) {
                if (a.key == "coeff") coeff = a.value;
                else throw Error("line " + std::to_string(lineno) + ": unknown attribute '" + a.key + "'");
            }
            if (coeff.empty())
                throw Error("line " + std::to_string(lineno) + ": branch '" + pos[1] +
                            "' missing coeff");
            if (bids.count(pos[1]))
                throw Error("line " + std::to_string(lineno) + ": duplicate branch '" + pos[1] + "'");
            ClusterBranch b;
            b.id = pos[1];
            try {
                b.coeff = Rational::from_string(coeff);
            } catch (const Error& e) {
                throw Error("line " + std::to_string(lineno) + ": " + e.what());
            }
            bids[b.id] = (int)c.branches.size();
            c.branches.push_back(std::move(b));
        } else if (kw == "mult") {
            if (pos.size() != 4)
                throw Error("line " + std::to_string(lineno) +
                            ": 'mult' expects <branch> <point> <int>");
            pmults.push_back({pos[1], pos[2], parse_int(pos[3], lineno), lineno});
        } else {
            throw Error("line " + std::to_string(lineno) + ": unknown directive '" + kw + "'");
        }
    });

    for (auto& b : c.branches) b.mult.assign(c.points.size(), 0);
    for (const auto& pm : pmults) {
        auto bi = bids.find(pm.branch);
        auto pi = pids.find(pm.point);
        if (bi == bids.end())
            throw Error("line " + std::to_string(pm.lineno) + ": unknown branch '" + pm.branch + "'");
        if (pi == pids.end())
            throw Error("line " + std::to_string(pm.lineno) + ": unknown point '" + pm.point + "'");
        if (pm.m < 0)
            throw Error("line " + std::to_string(pm.lineno) + ": negative multiplicity");
        c.branches[bi->second].mult[pi->second] = pm.m;
    }
    validate_cluster(c);
    return c;
}

void validate_cluster(const Cluster& c) {
    int n = (int)c.points.size();
    if (n == 0) throw Error("cluster has no points");
    int roots = 0;
    for (int i = 0; i < n; i++) {
        const ClusterPoint& p = c.points[i];
        if (p.parent >= i)
            throw Error("point '" + p.id + "': parent must precede it");
        if (p.parent < 0) {
            roots++;
            if (p.prox2 >= 0)
                throw Error("root point '" + p.id + "' cannot be a satellite");
        } else if (p.prox2 >= 0) {
            // the second curve must be visible at the parent: it is either
            // what the parent sits on, or what the parent is satellite to
            const ClusterPoint& par = c.points[p.parent];
            if (p.prox2 != par.parent && p.prox2 != par.prox2)
                throw Error("point '" + p.id + "': prox target '" +
                            c.points[p.prox2].id + "' is not visible at parent '" +
                            par.id + "'");
            if (p.prox2 == p.parent)
                throw Error("point '" + p.id + "': prox target equals parent");
        }
    }
    if (roots != 1) throw Error("cluster must have exactly one root point");

    // at most one point may lie on any given pair of exceptional curves:
    // the first such blowup separates them
    std::map<std::pair<int, int>, int> pair_seen;
    for (int q = 0; q < n; q++) {
        const ClusterPoint& p = c.points[q];
        if (p.prox2 >= 0) {
            auto key = std::make_pair(p.prox2, p.parent);
            if (++pair_seen[key] > 1)
                throw Error("point '" + p.id + "': second satellite over curves '" +
                            c.points[p.prox2].id + "' and '" + c.points[p.parent].id +
                            "', which are already separated");
        }
    }

    for (const ClusterBranch& b : c.branches) {
        if (b.coeff.sgn() <= 0 || b.coeff > Rational(1))
            throw Error("branch '" + b.id + "' coefficient " + b.coeff.str() +
                        " outside (0,1]");
        if ((int)b.mult.size() != n)
            throw Error("branch '" + b.id + "' multiplicity vector has wrong length");
        for (int i = 0; i < n; i++) {
            if (b.mult[i] < 0) throw Error("branch '" + b.id + "' has negative multiplicity");
            long long prox_sum = 0;
            for (int q = i + 1; q < n; q++)
                if (c.proximate(q, i)) prox_sum += b.mult[q];
            if (prox_sum > b.mult[i])
                throw Error("branch '" + b.id + "' is proximity-inconsistent at point '" +
                            c.points[i].id + "': " + std::to_string(b.mult[i]) +
                            " < sum " + std::to_string(prox_sum) + " over proximate points");
        }
        int root = 0;
        while (c.points[root].parent >= 0) root++;
        if (b.mult[root] < 1)
            throw Error("branch '" + b.id + "' does not pass through the root point");
    }
}

Rational single_blowup_coeff(const std::vector<std::pair<long long, Rational>>& at_point) {
    Rational c(-1);
    for (const auto& [m, coeff] : at_point) {
        if (m < 0) throw Error("negative multiplicity");
        if (coeff.sgn() <= 0 || coeff > Rational(1))
            throw Error("coefficient " + coeff.str() + " outside (0,1]");
        c += Rational(m) * coeff;
    }
    return c;
}

BlowupTrace run_trace(const Cluster& c) {
    validate_cluster(c);
    int n = (int)c.points.size(), nb = (int)c.branches.size();
    BlowupTrace tr;
    tr.s.assign(n, 0);
    tr.t.assign(n, std::vector<long long>(nb, 0));
    tr.b.resize(n);
    tr.a.resize(n);
    for (int i = 0; i < n; i++) {
        const ClusterPoint& p = c.points[i];
        tr.s[i] = 1;
        if (p.parent >= 0) tr.s[i] += tr.s[p.parent];
        if (p.prox2 >= 0) tr.s[i] += tr.s[p.prox2];
        for (int j = 0; j < nb; j++) {
            long long t = c.branches[j].mult[i];
            if (p.parent >= 0) t += tr.t[p.parent][j];
            if (p.prox2 >= 0) t += tr.t[p.prox2][j];
            tr.t[i][j] = t;
        }
        Rational b(-tr.s[i]);
        for (int j = 0; j < nb; j++)
            if (tr.t[i][j] != 0) b += Rational(tr.t[i][j]) * c.branches[j].coeff;
        tr.b[i] = b;
        tr.a[i] = Rational(1) - b;
        if (i == 0 || tr.a[i] < tr.min_a) tr.min_a = tr.a[i];
    }
    return tr;
}

WeightedGraph cluster_dual_graph(const Cluster& c) {
    validate_cluster(c);
    int n = (int)c.points.size();
    GraphBuilder bld;
    for (int i = 0; i < n; i++) {
        int w = 1;
        for (int q = i + 1; q < n; q++)
            if (c.proximate(q, i)) w++;
        bld.add_vertex(c.points[i].id, w);
    }
    // E_q still meets E_p (q proximate to p) unless some later point was
    // proximate to both, which blows their intersection apart.
    for (int q = 0; q < n; q++)
        for (int p : {c.points[q].parent, c.points[q].prox2}) {
            if (p < 0) continue;
            bool separated = false;
            for (int r = q + 1; r < n && !separated; r++)
                separated = c.proximate(r, q) && c.proximate(r, p);
            if (!separated) bld.add_edge(q, p);
        }
    for (int j = 0; j < (int)c.branches.size(); j++) {
        const ClusterBranch& b = c.branches[j];
        int x = bld.add_external(b.id, b.coeff);
        for (int i = 0; i < n; i++) {
            long long excess = b.mult[i];
            for (int q = i + 1; q < n; q++)
                if (c.proximate(q, i)) excess -= b.mult[q];
            if (excess > 0) bld.add_link(x, i, (int)excess);
        }
    }
    return bld.build();
}

namespace {

// One point of the current configuration during ld_search: the exceptional
// curves through it (their codiscrepancies; at most two) and the branches
// through it with multiplicities. cpoint >= 0 ties it to a cluster point
// whose own blowup data is still to be used.
struct Site {
    Rational exc[2];
    int n_exc = 0;
    std::vector<std::pair<int, long long>> branches;
    int cpoint = -1;
};

struct LdSearch {
    const Cluster& c;
    int depth;
    bool prune;
    Rational min_v;
    bool incomplete = false;
    std::vector<Rational> cpoint_c; // codiscrepancy of each cluster point's curve along the current path

    LdSearch(const Cluster& cl, int d, bool pr) : c(cl), depth(d), prune(pr) {
        cpoint_c.resize(c.points.size());
    }

    void note(const Rational& v) {
        if (v < min_v) min_v = v;
    }

    void blow(const Site& site, int level) {
        Rational cn(-1);
        for (int k = 0; k < site.n_exc; k++) cn += site.exc[k];
        for (const auto& [j, m] : site.branches)
            cn += Rational(m) * c.branches[j].coeff;
        note(Rational(1) - cn);
        if (prune && cn.sgn() <= 0) return; // all deeper values >= 1 - cn
        if (level >= depth) {
            incomplete = true; // deeper moves exist but are out of budget
            return;
        }
        if (site.cpoint >= 0) cpoint_c[site.cpoint] = cn;

        // children of the tied cluster point take priority: they decorate
        // the satellite intersections and carry the recorded branch data
        bool exc_taken[2] = {false, false};
        if (site.cpoint >= 0) {
            for (int q = site.cpoint + 1; q < (int)c.points.size(); q++) {
                const ClusterPoint& cp = c.points[q];
                if (cp.parent != site.cpoint) continue;
                Site child;
                child.exc[child.n_exc++] = cn;
                if (cp.prox2 >= 0) {
                    child.exc[child.n_exc++] = cpoint_c[cp.prox2];
                    for (int k = 0; k < site.n_exc; k++)
                        if (exc_matches(site, k, cp.prox2)) exc_taken[k] = true;
                }
                child.cpoint = q;
                for (int j = 0; j < (int)c.branches.size(); j++)
                    if (c.branches[j].mult[q] > 0)
                        child.branches.push_back({j, c.branches[j].mult[q]});
                blow(child, level + 1);
            }
        }
        // satellite points: the new curve meets each old one once
        for (int k = 0; k < site.n_exc; k++) {
            if (exc_taken[k]) continue;
            Site sat;
            sat.exc[0] = cn;
            sat.exc[1] = site.exc[k];
            sat.n_exc = 2;
            blow(sat, level + 1);
        }
        // branch intersection not claimed by any recorded proximate point
        // (children or deeper satellites) continues through a free point
        for (const auto& [j, m] : site.branches) {
            long long residual = m;
            if (site.cpoint >= 0)
                for (int q = site.cpoint + 1; q < (int)c.points.size(); q++)
                    if (c.proximate(q, site.cpoint)) residual -= c.branches[j].mult[q];
            if (residual > 0) {
                Site cont;
                cont.exc[0] = cn;
                cont.n_exc = 1;
                cont.branches.push_back({j, residual});
                blow(cont, level + 1);
            }
        }
    }

    // whether site.exc[k] is the curve of cluster point `target`
    bool exc_matches(const Site& site, int k, int target) {
        // the site is a cluster point; its exceptionals are (parent, prox2)
        const ClusterPoint& cp = c.points[site.cpoint];
        int owner = (k == 0) ? cp.parent : cp.prox2;
        return owner == target;
    }
};

} // namespace

SearchResult ld_search(const Cluster& c, int depth, bool prune) {
    validate_cluster(c);
    if (depth < 1) throw Error("ld_search: depth bound must be >= 1");
    LdSearch s(c, depth, prune);
    int root = 0;
    while (c.points[root].parent >= 0) root++;
    // boundary branches pass through the root point and count themselves
    bool first = true;
    for (const ClusterBranch& b : c.branches) {
        Rational v = Rational(1) - b.coeff;
        if (first || v < s.min_v) s.min_v = v;
        first = false;
    }
    if (first) s.min_v = Rational(2); // no branches: first blowup gives a = 2
    Site start;
    start.cpoint = root;
    for (int j = 0; j < (int)c.branches.size(); j++)
        if (c.branches[j].mult[root] > 0)
            start.branches.push_back({j, c.branches[j].mult[root]});
    s.blow(start, 1);
    return SearchResult{s.min_v, !s.incomplete};
}

WeightedGraph graph_blowup(const WeightedGraph& g, const BlowupCenter& center,
                           std::string new_id) {
    if (new_id.empty()) {
        for (int k = 1;; k++) {
            std::string cand = "n" + std::to_string(k);
            if (!g.find_vertex(cand) && !g.find_external(cand)) {
                new_id = cand;
                break;
            }
        }
    } else if (g.find_vertex(new_id) || g.find_external(new_id)) {
        throw Error("blowup id '" + new_id + "' already used");
    }

    auto need_vertex = [&](const std::string& id) {
        auto v = g.find_vertex(id);
        if (!v) throw Error("unknown vertex '" + id + "'");
        return *v;
    };

    GraphBuilder b;
    int n = g.vertex_count();
    std::vector<int> bump(n, 0);
    int u = -1, v = -1, x = -1;
    switch (center.kind) {
    case BlowupCenter::EdgePoint:
        u = need_vertex(center.a);
        v = need_vertex(center.b);
        if (g.edge_mult(u, v) < 1)
            throw Error("no edge between '" + center.a + "' and '" + center.b + "'");
        bump[u] = bump[v] = 1;
        break;
    case BlowupCenter::FreePoint:
        u = need_vertex(center.a);
        bump[u] = 1;
        break;
    case BlowupCenter::LinkPoint: {
        auto xi = g.find_external(center.a);
        if (!xi) throw Error("unknown external '" + center.a + "'");
        x = *xi;
        v = need_vertex(center.b);
        bump[v] = 1;
        bool found = false;
        for (const Link& l : g.links())
            if (l.ext == x && l.vert == v) found = true;
        if (!found)
            throw Error("no link between '" + center.a + "' and '" + center.b + "'");
        break;
    }
    }

    for (int i = 0; i < n; i++) {
        const Vertex& vv = g.vertex(i);
        b.add_vertex(vv.id, vv.weight + bump[i], vv.genus);
    }
    int nv = b.add_vertex(new_id, 1, 0);
    for (const Edge& e : g.edges()) {
        if (center.kind == BlowupCenter::EdgePoint &&
            ((e.a == u && e.b == v) || (e.a == v && e.b == u))) {
            if (e.mult > 1) b.add_edge(e.a, e.b, e.mult - 1);
        } else {
            b.add_edge(e.a, e.b, e.mult);
        }
    }
    for (int i = 0; i < g.external_count(); i++) {
        const ExternalCurve& ec = g.external(i);
        std::optional<int> w = ec.weight;
        if (center.kind == BlowupCenter::LinkPoint && i == x && w) {
            // a simple point on the external drops its self-intersection by
            // one; higher-multiplicity contact leaves -B^2 undetermined
            int m = 0;
            for (const Link& l : g.links())
                if (l.ext == x && l.vert == v) m = l.mult;
            if (m == 1) w = *w + 1;
            else w = std::nullopt;
        }
        if (ec.coeff) b.add_external(ec.id, *ec.coeff, w);
        else b.add_external_unknown(ec.id, w);
    }
    for (const Link& l : g.links()) {
        if (center.kind == BlowupCenter::LinkPoint && l.ext == x && l.vert == v)
            b.add_link(l.ext, nv, l.mult); // the whole link moves up
        else
            b.add_link(l.ext, l.vert, l.mult);
    }
    switch (center.kind) {
    case BlowupCenter::EdgePoint:
        b.add_edge(u, nv);
        b.add_edge(v, nv);
        break;
    case BlowupCenter::FreePoint:
        b.add_edge(u, nv);
        break;
    case BlowupCenter::LinkPoint:
        b.add_edge(v, nv);
        break;
    }
    return b.build();
}

namespace {

// Compact mutable state for ld_of_graph: values propagate incrementally, so
// only connectivity and multiplicities matter, not weights. Edges whose
// multiplicity has dropped to 0 stay in place (skipped as moves) so undo is
// a plain increment.
struct GraphState {
    std::vector<Rational> a;                    // internal values, new ones appended
    std::vector<std::array<int, 3>> edges;      // u, v, mult
    std::vector<std::array<int, 3>> links;      // ext, v, mult
    std::vector<Rational> coeff;                // per external (solved value if promoted)
};

} // namespace

SearchResult ld_of_graph(const WeightedGraph& g, int depth, bool certificates) {
    if (depth < 0) throw Error("ld_of_graph: negative depth");
    DiscrepancyReport rep = solve_codiscrepancies(g);
    if (rep.sig.cls() != GraphClass::Elliptic)
        throw Error("ld_of_graph requires an elliptic graph");
    if (!rep.lc) throw Error("ld_of_graph requires a log canonical graph");

    Rational best;
    bool first = true;
    for (int i = 0; i < rep.internal_rows; i++) {
        if (first || rep.a[i] < best) best = rep.a[i];
        first = false;
    }
    if (first) throw Error("ld_of_graph: no internal vertices");

    bool all_mult1 = true;
    for (const Link& l : g.links())
        if (l.mult != 1) all_mult1 = false;
    if (certificates && all_mult1) return SearchResult{best, true};

    GraphState st;
    st.a.assign(rep.a.begin(), rep.a.begin() + rep.internal_rows);
    for (const Edge& e : g.edges()) st.edges.push_back({e.a, e.b, e.mult});
    for (const Link& l : g.links()) st.links.push_back({l.ext, l.vert, l.mult});
    st.coeff.resize(g.external_count());
    for (int j = 0; j < g.external_count(); j++) {
        if (g.external(j).coeff) st.coeff[j] = *g.external(j).coeff;
        else {
            // promoted externals carry their solved value
            bool got = false;
            for (size_t k = 0; k < rep.promoted.size(); k++)
                if (rep.promoted[k] == j) {
                    st.coeff[j] = rep.b[rep.internal_rows + k];
                    got = true;
                }
            if (!got) throw Error("external '" + g.external(j).id + "' has no coefficient");
        }
    }

    Rational min_v = best;
    bool incomplete = false;

    // exhaustive depth-limited walk; moves mutate the state and are undone
    auto walk = [&](auto&& self, int level) -> void {
        if (level > depth) {
            // certificate: with every value >= 0 and only multiplicity-1
            // links, any deeper value is >= some current one
            bool cert = true;
            for (const Rational& v : st.a)
                if (v.sgn() < 0) cert = false;
            for (const auto& l : st.links)
                if (l[2] != 1) cert = false;
            if (!cert) incomplete = true;
            return;
        }
        size_t ne = st.edges.size(), nl = st.links.size(), nv = st.a.size();
        int w = (int)nv;
        for (size_t i = 0; i < ne; i++) {
            auto e = st.edges[i];
            if (e[2] == 0) continue;
            Rational v = st.a[e[0]] + st.a[e[1]];
            if (v < min_v) min_v = v;
            st.a.push_back(v);
            st.edges[i][2]--;
            st.edges.push_back({e[0], w, 1});
            st.edges.push_back({e[1], w, 1});
            self(self, level + 1);
            st.edges.pop_back();
            st.edges.pop_back();
            st.edges[i][2]++;
            st.a.pop_back();
        }
        for (size_t i = 0; i < nv; i++) {
            Rational v = st.a[i] + Rational(1);
            if (v < min_v) min_v = v;
            st.a.push_back(v);
            st.edges.push_back({(int)i, w, 1});
            self(self, level + 1);
            st.edges.pop_back();
            st.a.pop_back();
        }
        for (size_t i = 0; i < nl; i++) {
            auto l = st.links[i];
            Rational v = st.a[l[1]] + Rational(1) - Rational(l[2]) * st.coeff[l[0]];
            if (v < min_v) min_v = v;
            st.a.push_back(v);
            st.links[i][1] = w; // the whole link moves to the new vertex
            st.edges.push_back({l[1], w, 1});
            self(self, level + 1);
            st.edges.pop_back();
            st.links[i][1] = l[1];
            st.a.pop_back();
        }
    };
    if (depth > 0) walk(walk, 1);
    return SearchResult{min_v, !incomplete};
}

} // namespace discrep
