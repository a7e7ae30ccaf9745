#include "discrep/enumerate.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <set>
#include <utility>

#include "discrep/error.hpp"
#include "discrep/parallel.hpp"
#include "discrep/solver.hpp"

namespace discrep {
namespace {

using i128 = __int128;

void append_ll(std::string& s, long long v) {
    // Fixed-width big-endian with the sign bit flipped: byte order == numeric order.
    unsigned long long u = static_cast<unsigned long long>(v) ^ (1ULL << 63);
    for (int i = 7; i >= 0; i--) s.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

// ---------------------------------------------------------------------------
// Canonical form: lexicographically minimal serialization over relabelings.
// The serialization lists (weight, genus) per position, then for position
// k = 1..n-1 the edge multiplicities to positions 0..k-1, then the external
// records sorted. Minimal labelings therefore sort vertices by (weight,
// genus) first; the branch-and-bound explores only such labelings and prunes
// any prefix that already compares greater than the best one found.
// ---------------------------------------------------------------------------

std::string external_record(const WeightedGraph& g, int x, const std::vector<int>& pos_of) {
    const ExternalCurve& e = g.external(x);
    std::vector<std::pair<int, int>> ls;
    for (const Link& l : g.links())
        if (l.ext == x) ls.push_back({pos_of[l.vert], l.mult});
    std::sort(ls.begin(), ls.end());
    std::string r;
    r += e.coeff ? e.coeff->str() : "?";
    r.push_back('|');
    r += e.weight ? std::to_string(*e.weight) : "?";
    r.push_back('|');
    for (auto& [p, m] : ls) {
        append_ll(r, p);
        append_ll(r, m);
    }
    return r;
}

struct CanonSearch {
    const WeightedGraph* g = nullptr;
    int n = 0;
    std::vector<long long> mult; // n*n adjacency multiplicities
    std::vector<std::vector<int>> cls_members;
    std::vector<int> cls_of_pos;
    std::vector<int> lab, best_lab; // position -> original vertex
    std::vector<char> used;
    std::vector<long long> cur, best_edges;
    std::vector<std::pair<std::string, int>> best_ext; // (record, orig external)
    bool have_best = false;

    void run(const WeightedGraph& graph) {
        g = &graph;
        n = graph.vertex_count();
        if (n < 1 || n > 12)
            throw Error("canonical form supports 1..12 vertices, got " + std::to_string(n));
        mult.assign(static_cast<size_t>(n) * n, 0);
        for (const Edge& e : graph.edges()) {
            mult[static_cast<size_t>(e.a) * n + e.b] = e.mult;
            mult[static_cast<size_t>(e.b) * n + e.a] = e.mult;
        }
        std::vector<int> order(n);
        for (int i = 0; i < n; i++) order[i] = i;
        auto key = [&](int v) {
            return std::pair<int, int>(graph.vertex(v).weight, graph.vertex(v).genus);
        };
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
        cls_members.clear();
        cls_of_pos.assign(n, 0);
        for (int i = 0; i < n; i++) {
            if (i == 0 || key(order[i]) != key(order[i - 1])) cls_members.push_back({});
            cls_members.back().push_back(order[i]);
            cls_of_pos[i] = static_cast<int>(cls_members.size()) - 1;
        }
        lab.assign(n, -1);
        used.assign(n, 0);
        cur.clear();
        have_best = false;
        dfs(0, false);
    }

    std::vector<std::pair<std::string, int>> ext_records() const {
        std::vector<int> pos_of(n);
        for (int k = 0; k < n; k++) pos_of[lab[k]] = k;
        std::vector<std::pair<std::string, int>> recs;
        recs.reserve(g->external_count());
        for (int x = 0; x < g->external_count(); x++)
            recs.push_back({external_record(*g, x, pos_of), x});
        std::sort(recs.begin(), recs.end());
        return recs;
    }

    // Returns whether best was replaced somewhere in this subtree. A
    // replacement invalidates the caller's lt flag: the new best runs through
    // the current prefix, so the remaining siblings start from equality.
    bool dfs(int k, bool lt) {
        if (k == n) {
            auto ext = ext_records();
            if (!have_best || lt || ext < best_ext) {
                best_edges = cur;
                best_ext = std::move(ext);
                best_lab = lab;
                have_best = true;
                return true;
            }
            return false;
        }
        bool replaced = false;
        for (int u : cls_members[cls_of_pos[k]]) {
            if (used[u]) continue;
            if (replaced) lt = false;
            size_t base = cur.size();
            bool lt2 = lt, prune = false;
            for (int i = 0; i < k; i++) {
                long long e = mult[static_cast<size_t>(lab[i]) * n + u];
                if (have_best && !lt2) {
                    long long b = best_edges[base + static_cast<size_t>(i)];
                    if (e > b) {
                        prune = true;
                        break;
                    }
                    if (e < b) lt2 = true;
                }
                cur.push_back(e);
            }
            if (!prune) {
                lab[k] = u;
                used[u] = 1;
                if (dfs(k + 1, lt2)) replaced = true;
                used[u] = 0;
            }
            cur.resize(base);
        }
        return replaced;
    }

    std::string key() const {
        std::string s;
        append_ll(s, n);
        append_ll(s, g->external_count());
        for (int k = 0; k < n; k++) {
            append_ll(s, g->vertex(best_lab[k]).weight);
            append_ll(s, g->vertex(best_lab[k]).genus);
        }
        for (long long e : best_edges) append_ll(s, e);
        for (const auto& [rec, orig] : best_ext) {
            s.push_back(';');
            s += rec;
        }
        return s;
    }

    WeightedGraph rebuild() const {
        std::vector<int> pos_of(n);
        for (int k = 0; k < n; k++) pos_of[best_lab[k]] = k;
        GraphBuilder b;
        for (int k = 0; k < n; k++)
            b.add_vertex("v" + std::to_string(k + 1), g->vertex(best_lab[k]).weight,
                         g->vertex(best_lab[k]).genus);
        std::vector<Edge> es;
        for (const Edge& e : g->edges()) {
            int p = pos_of[e.a], q = pos_of[e.b];
            es.push_back({std::min(p, q), std::max(p, q), e.mult});
        }
        std::sort(es.begin(), es.end(), [](const Edge& x, const Edge& y) {
            return std::pair(x.a, x.b) < std::pair(y.a, y.b);
        });
        for (const Edge& e : es) b.add_edge(e.a, e.b, e.mult);
        for (size_t i = 0; i < best_ext.size(); i++) {
            const ExternalCurve& e = g->external(best_ext[i].second);
            int x = e.coeff ? b.add_external("x" + std::to_string(i + 1), *e.coeff, e.weight)
                            : b.add_external_unknown("x" + std::to_string(i + 1), e.weight);
            std::vector<std::pair<int, int>> ls;
            for (const Link& l : g->links())
                if (l.ext == best_ext[i].second) ls.push_back({pos_of[l.vert], l.mult});
            std::sort(ls.begin(), ls.end());
            for (auto& [p, m] : ls) b.add_link(x, p, m);
        }
        return b.build_fast();
    }
};

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct Partition {
    int n = 0;
    std::vector<int> weights; // nondecreasing
};

std::vector<Partition> make_partitions(const EnumerationSpec& spec) {
    std::vector<Partition> parts;
    std::vector<int> w;
    for (int n = spec.min_vertices; n <= spec.max_vertices; n++) {
        w.assign(n, 0);
        auto rec = [&](auto&& self, int i, int lo) -> void {
            if (i == n) {
                parts.push_back({n, w});
                return;
            }
            for (int v = lo; v <= spec.max_weight; v++) {
                w[i] = v;
                self(self, i + 1, v);
            }
        };
        rec(rec, 0, spec.minimal_only ? 2 : 1);
    }
    return parts;
}

int isqrt_ll(long long v) {
    int r = 0;
    while (static_cast<long long>(r + 1) * (r + 1) <= v) r++;
    return r;
}

int edge_cap(int wi, int wj, const EnumerationSpec& spec) {
    int cap;
    if (spec.shape != Shape::Any) {
        cap = 1;
    } else if (spec.max_edge_mult > 0) {
        cap = spec.max_edge_mult;
    } else if (spec.elliptic_only) {
        cap = isqrt_ll(static_cast<long long>(wi) * wj - 1);
    } else {
        cap = 2; // desk-scale default for indefinite enumeration
    }
    if (spec.elliptic_only)
        cap = std::min(cap, isqrt_ll(static_cast<long long>(wi) * wj - 1));
    return cap;
}

// Sign of the leading k x k minor of the symmetric matrix m (row-major n*n),
// by fraction-free elimination with row pivoting; entries stay exact.
int leading_minor_sign(const std::vector<long long>& m, int n, int k) {
    std::vector<long long> a(static_cast<size_t>(k) * k);
    for (int i = 0; i < k; i++)
        for (int j = 0; j < k; j++) a[static_cast<size_t>(i) * k + j] = m[static_cast<size_t>(i) * n + j];
    int sign = 1;
    long long prev = 1;
    for (int i = 0; i < k; i++) {
        if (a[static_cast<size_t>(i) * k + i] == 0) {
            int p = -1;
            for (int r = i + 1; r < k; r++)
                if (a[static_cast<size_t>(r) * k + i] != 0) {
                    p = r;
                    break;
                }
            if (p < 0) return 0;
            for (int c = 0; c < k; c++)
                std::swap(a[static_cast<size_t>(i) * k + c], a[static_cast<size_t>(p) * k + c]);
            sign = -sign;
        }
        for (int r = i + 1; r < k; r++) {
            for (int c = i + 1; c < k; c++) {
                i128 t = static_cast<i128>(a[static_cast<size_t>(r) * k + c]) * a[static_cast<size_t>(i) * k + i] -
                         static_cast<i128>(a[static_cast<size_t>(r) * k + i]) * a[static_cast<size_t>(i) * k + c];
                a[static_cast<size_t>(r) * k + c] = static_cast<long long>(t / prev);
            }
            a[static_cast<size_t>(r) * k + i] = 0;
        }
        prev = a[static_cast<size_t>(i) * k + i];
    }
    long long d = a[static_cast<size_t>(k - 1) * k + (k - 1)];
    return d > 0 ? sign : d < 0 ? -sign : 0;
}

bool connected_mults(const std::vector<long long>& m, int n) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < n; u++)
            if (!seen[u] && m[static_cast<size_t>(v) * n + u] > 0) {
                seen[u] = 1;
                cnt++;
                stack.push_back(u);
            }
    }
    return cnt == n;
}

bool shape_ok(const std::vector<long long>& m, int n, Shape shape) {
    if (shape == Shape::Any) return true;
    int edges = 0;
    std::vector<int> deg(n, 0);
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++)
            if (m[static_cast<size_t>(i) * n + j] > 0) {
                if (m[static_cast<size_t>(i) * n + j] > 1) return false;
                edges++;
                deg[i]++;
                deg[j]++;
            }
    if (edges != n - 1) return false; // connected is checked separately: acyclic
    if (shape == Shape::Chain)
        for (int i = 0; i < n; i++)
            if (deg[i] > 2) return false;
    return true;
}

WeightedGraph graph_of(const std::vector<int>& weights, const std::vector<long long>& m) {
    int n = static_cast<int>(weights.size());
    GraphBuilder b;
    for (int i = 0; i < n; i++) b.add_vertex("v" + std::to_string(i + 1), weights[i]);
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++)
            if (m[static_cast<size_t>(i) * n + j] > 0)
                b.add_edge(i, j, static_cast<int>(m[static_cast<size_t>(i) * n + j]));
    return b.build_fast();
}

// All connected edge assignments over the fixed weight list, deduplicated by
// canonical form. Pairs are filled grouped by the higher endpoint, so after
// vertex j's group the leading (j+1)-minor is final — that is where the
// negative-definiteness prune fires when elliptic_only is set.
void bare_graphs_generic(const Partition& part, const EnumerationSpec& spec,
                         std::vector<std::pair<std::string, WeightedGraph>>& out) {
    int n = part.n;
    std::vector<long long> m(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; i++) m[static_cast<size_t>(i) * n + i] = -part.weights[i];
    std::set<std::string> seen;
    CanonSearch canon;

    auto leaf = [&]() {
        if (!connected_mults(m, n)) return;
        if (!shape_ok(m, n, spec.shape)) return;
        WeightedGraph g = graph_of(part.weights, m);
        canon.run(g);
        std::string key = canon.key();
        if (seen.insert(key).second) out.push_back({std::move(key), canon.rebuild()});
    };

    auto rec = [&](auto&& self, int j, int i) -> void {
        if (j == n) {
            leaf();
            return;
        }
        if (i == j) {
            if (spec.elliptic_only && leading_minor_sign(m, n, j + 1) != ((j + 1) % 2 ? -1 : 1))
                return;
            self(self, j + 1, 0);
            return;
        }
        int cap = edge_cap(part.weights[i], part.weights[j], spec);
        for (int e = 0; e <= cap; e++) {
            m[static_cast<size_t>(i) * n + j] = e;
            m[static_cast<size_t>(j) * n + i] = e;
            self(self, j, i + 1);
        }
        m[static_cast<size_t>(i) * n + j] = 0;
        m[static_cast<size_t>(j) * n + i] = 0;
    };
    if (n == 1) {
        if (!spec.elliptic_only || part.weights[0] > 0) leaf();
        return;
    }
    rec(rec, 1, 0);
}

// Chains: arrangements of the weight multiset along a path, up to reversal.
// The tuple itself (not below its reversal) is the dedup key; a path's only
// nontrivial self-map is the flip, so this is exact and skips the generic
// canonical search.
void bare_graphs_chains(const Partition& part, const EnumerationSpec& spec,
                        std::vector<std::pair<std::string, WeightedGraph>>& out) {
    int n = part.n;
    std::vector<int> w = part.weights; // sorted: next_permutation covers all arrangements
    do {
        std::vector<int> rev(w.rbegin(), w.rend());
        if (rev < w) continue;
        if (spec.elliptic_only) {
            long long d1 = 1, d2 = 0; // continuants; all prefixes positive <=> elliptic
            bool ok = true;
            for (int i = 0; i < n; i++) {
                long long d = w[i] * d1 - d2;
                if (d <= 0) {
                    ok = false;
                    break;
                }
                d2 = d1;
                d1 = d;
            }
            if (!ok) continue;
        }
        std::string key;
        append_ll(key, n);
        for (int x : w) append_ll(key, x);
        GraphBuilder b;
        for (int i = 0; i < n; i++) b.add_vertex("v" + std::to_string(i + 1), w[i]);
        for (int i = 0; i + 1 < n; i++) b.add_edge(i, i + 1);
        out.push_back({std::move(key), b.build_fast()});
    } while (std::next_permutation(w.begin(), w.end()));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

bool passes_predicates(const WeightedGraph& g, const EnumerationSpec& spec) {
    if (!spec.lc_only && !spec.lt_only) return true;
    try {
        DiscrepancyReport r = solve_codiscrepancies(g);
        if (spec.lc_only && !r.lc) return false;
        if (spec.lt_only && !r.lt) return false;
    } catch (const DegenerateSystem&) {
        return false; // lc/lt are undefined on degenerate systems
    }
    return true;
}

void decorate_and_collect(const WeightedGraph& bare, const EnumerationSpec& spec,
                          std::vector<WeightedGraph>& out) {
    if (spec.coeffs.empty() || spec.max_externals == 0) {
        if (passes_predicates(bare, spec)) out.push_back(bare);
        return;
    }
    int n = bare.vertex_count();
    int lat = static_cast<int>(spec.coeffs.size());
    std::set<std::string> seen;
    std::vector<std::pair<std::string, WeightedGraph>> decorated;
    std::vector<std::pair<int, int>> picks; // (vertex, coeff index), nondecreasing
    CanonSearch canon;

    auto realize = [&]() {
        GraphBuilder b;
        for (int i = 0; i < n; i++)
            b.add_vertex(bare.vertex(i).id, bare.vertex(i).weight, bare.vertex(i).genus);
        for (const Edge& e : bare.edges()) b.add_edge(e.a, e.b, e.mult);
        for (size_t k = 0; k < picks.size(); k++) {
            int x = b.add_external("x" + std::to_string(k + 1), spec.coeffs[picks[k].second]);
            b.add_link(x, picks[k].first, 1);
        }
        WeightedGraph g = b.build_fast();
        canon.run(g);
        std::string key = canon.key();
        if (seen.insert(key).second) decorated.push_back({std::move(key), canon.rebuild()});
    };

    auto rec = [&](auto&& self, std::pair<int, int> lo) -> void {
        realize();
        if (static_cast<int>(picks.size()) == spec.max_externals) return;
        for (int v = lo.first; v < n; v++)
            for (int c = (v == lo.first ? lo.second : 0); c < lat; c++) {
                picks.push_back({v, c});
                self(self, {v, c});
                picks.pop_back();
            }
    };
    rec(rec, {0, 0});

    std::sort(decorated.begin(), decorated.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, g] : decorated)
        if (passes_predicates(g, spec)) out.push_back(std::move(g));
}

// Streams the partition's graphs to emit in deterministic (canonical key)
// order. Only one bare graph's decorations are ever buffered at a time; a
// partition's full output can dwarf memory at the larger desk scales.
void process_partition(const Partition& part, const EnumerationSpec& spec,
                       const std::function<void(WeightedGraph&&)>& emit) {
    std::vector<std::pair<std::string, WeightedGraph>> bare;
    if (spec.shape == Shape::Chain)
        bare_graphs_chains(part, spec, bare);
    else
        bare_graphs_generic(part, spec, bare);
    if (spec.shape != Shape::Chain)
        std::sort(bare.begin(), bare.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<WeightedGraph> buf;
    for (auto& [key, g] : bare) {
        buf.clear();
        decorate_and_collect(g, spec, buf);
        for (WeightedGraph& d : buf) emit(std::move(d));
    }
}

void validate_spec(const EnumerationSpec& spec) {
    if (spec.min_vertices < 1 || spec.max_vertices < spec.min_vertices)
        throw Error("enumeration needs 1 <= min_vertices <= max_vertices");
    // The general generator's exact minor arithmetic is sized for 9 vertices;
    // chains dodge it (continuant checks only) and stretch to 12.
    int cap = spec.shape == Shape::Chain ? 12 : 9;
    if (spec.max_vertices > cap)
        throw Error("enumeration supports at most " + std::to_string(cap) +
                    " vertices for this shape, got " + std::to_string(spec.max_vertices));
    if (spec.max_weight < 1 || spec.max_weight > 9)
        throw Error("enumeration supports weights 1..9, got max_weight " +
                    std::to_string(spec.max_weight));
    if (spec.max_edge_mult < 0 || spec.max_edge_mult > 8)
        throw Error("max_edge_mult must be in 0..8");
    if (spec.max_externals < 0) throw Error("max_externals must be >= 0");
    for (const Rational& c : spec.coeffs)
        if (c.sgn() <= 0 || c > Rational(1))
            throw Error("coefficient lattice values must lie in (0,1], got " + c.str());
}

} // namespace

std::string canonical_form(const WeightedGraph& g) {
    CanonSearch s;
    s.run(g);
    return s.key();
}

WeightedGraph canonical_graph(const WeightedGraph& g) {
    CanonSearch s;
    s.run(g);
    return s.rebuild();
}

void enumerate_graphs(const EnumerationSpec& spec,
                      const std::function<void(const WeightedGraph&)>& emit) {
    validate_spec(spec);
    std::vector<Partition> parts = make_partitions(spec);
    int np = static_cast<int>(parts.size());
    if (spec.threads == 0) {
        for (int p = 0; p < np; p++)
            process_partition(parts[p], spec, [&](WeightedGraph&& g) { emit(g); });
        return;
    }
    // Partition workers run concurrently but hand their buffers over in
    // partition order, so the merged stream matches the serial path while
    // only the in-flight partitions stay resident.
    std::vector<std::vector<WeightedGraph>> window(np);
    parallel_ordered_partitions(
        np, spec.threads,
        [&](int p) {
            process_partition(parts[p], spec,
                              [&](WeightedGraph&& g) { window[p].push_back(std::move(g)); });
        },
        [&](int p) {
            for (const WeightedGraph& g : window[p]) emit(g);
            std::vector<WeightedGraph>().swap(window[p]);
        });
}

long long enumerate_count(const EnumerationSpec& spec) {
    long long n = 0;
    enumerate_graphs(spec, [&](const WeightedGraph&) { n++; });
    return n;
}

} // namespace discrep
