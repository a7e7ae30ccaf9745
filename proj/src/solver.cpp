#include "discrep/solver.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

namespace discrep {

std::string to_string(GraphClass c) {
    switch (c) {
        case GraphClass::Elliptic: return "ELLIPTIC";
        case GraphClass::Parabolic: return "PARABOLIC";
        case GraphClass::Hyperbolic: return "HYPERBOLIC";
        default: return "OTHER";
    }
}

namespace {

bool mul_ck(long long a, long long b, long long& out) {
    return !__builtin_mul_overflow(a, b, &out);
}
bool sub_ck(long long a, long long b, long long& out) {
    return !__builtin_sub_overflow(a, b, &out);
}

// Assembled linear system over the solve rows (internal vertices first, then
// promoted unknown externals). Offdiagonals are kept once with i < j.
struct System {
    int n = 0, nv = 0;
    std::vector<long long> diag;  // F_k^2 = -weight
    std::vector<long long> base;  // 2 - 2 genus - weight
    std::vector<Rational> load;   // fixed boundary load per row
    std::vector<std::array<long long, 3>> off; // (i, j, mult), i < j
    std::vector<int> promoted;    // external index per promoted row
    // forest-order structure: at most one later neighbor per row
    std::vector<int> parent;      // later neighbor or -1
    std::vector<long long> offp;  // entry to parent
    bool forest = true;
};

struct Scratch {
    System sys;
    std::vector<int> ext_row;
    std::vector<long long> d, S, y, W;
    std::vector<long long> dense; // tier-2 Bareiss workspace
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

void assemble(const WeightedGraph& g, System& s, std::vector<int>& ext_row) {
    int nv = g.vertex_count();
    s.nv = nv;
    s.promoted.clear();
    ext_row.assign(g.external_count(), -1);
    for (int x = 0; x < g.external_count(); x++)
        if (!g.external(x).coeff) {
            if (!g.external(x).weight)
                throw Error("external '" + g.external(x).id +
                            "' has unknown coefficient but no weight; cannot be solved");
            ext_row[x] = nv + static_cast<int>(s.promoted.size());
            s.promoted.push_back(x);
        }
    int n = nv + static_cast<int>(s.promoted.size());
    s.n = n;
    s.diag.assign(n, 0);
    s.base.assign(n, 0);
    s.load.assign(n, Rational());
    s.off.clear();
    s.parent.assign(n, -1);
    s.offp.assign(n, 0);
    s.forest = true;

    for (int i = 0; i < nv; i++) {
        const Vertex& v = g.vertex(i);
        s.diag[i] = -static_cast<long long>(v.weight);
        s.base[i] = 2LL - 2 * v.genus - v.weight;
    }
    for (size_t p = 0; p < s.promoted.size(); p++) {
        int w = *g.external(s.promoted[p]).weight;
        s.diag[nv + static_cast<int>(p)] = -static_cast<long long>(w);
        s.base[nv + static_cast<int>(p)] = 2LL - w;
    }
    auto note_off = [&](int i, int j, long long m) {
        if (j < i) std::swap(i, j);
        s.off.push_back({i, j, m});
        if (s.parent[i] >= 0) s.forest = false;
        s.parent[i] = j;
        s.offp[i] = m;
    };
    for (const Edge& e : g.edges()) note_off(e.a, e.b, e.mult);
    for (const Link& l : g.links()) {
        if (ext_row[l.ext] >= 0) note_off(l.vert, ext_row[l.ext], l.mult);
        else s.load[l.vert] += *g.external(l.ext).coeff * Rational(l.mult);
    }
}

// Scales the rational right-hand sides base - load by L = lcm of the load
// denominators into integer y. Fails on overflow or oversized denominators.
bool scale_rhs(const System& s, std::vector<long long>& y, long long& L) {
    L = 1;
    for (int i = 0; i < s.n; i++) {
        if (s.load[i].is_zero()) continue;
        if (!s.load[i].fits_small()) return false;
        long long d = s.load[i].den();
        long long g = std::gcd(L, d);
        if (!mul_ck(L / g, d, L)) return false;
    }
    y.assign(s.n, 0);
    for (int i = 0; i < s.n; i++) {
        long long t;
        if (!mul_ck(s.base[i], L, t)) return false;
        if (!s.load[i].is_zero()) {
            long long lt;
            if (!mul_ck(s.load[i].num(), L / s.load[i].den(), lt)) return false;
            if (!sub_ck(t, lt, t)) return false;
        }
        y[i] = t;
    }
    return true;
}

// Division-free fraction-controlled elimination for forest-ordered systems
// (every row has at most one later neighbor): each row is combined into its
// parent exactly once, diagonals stay determinant-sized, and the inertia
// falls out of the pivot signs. Returns false to request the exact fallback.
bool forest_solve(const System& s, std::vector<Rational>& b, Signature& sig) {
    int n = s.n;
    auto& sc = scratch();
    long long L;
    if (!scale_rhs(s, sc.y, L)) return false;
    sc.d.assign(s.diag.begin(), s.diag.end());
    sc.S.assign(n, 1);
    auto& d = sc.d;
    auto& S = sc.S;
    auto& y = sc.y;
    int minus = 0;
    for (int i = 0; i < n; i++) {
        if (d[i] == 0) return false; // zero pivot: degenerate or needs pivoting
        bool neg = (d[i] < 0) != (S[i] < 0);
        if (neg) minus++;
        int p = s.parent[i];
        if (p < 0) continue;
        long long c_p, cc, t1, t2;
        if (!mul_ck(s.offp[i], S[p], c_p)) return false;   // parent's entry at col i
        if (!mul_ck(s.offp[i], S[i], cc)) return false;    // row i's entry at col p
        if (!mul_ck(d[i], d[p], t1)) return false;
        if (!mul_ck(c_p, cc, t2)) return false;
        if (!sub_ck(t1, t2, d[p])) return false;
        if (!mul_ck(d[i], y[p], t1)) return false;
        if (!mul_ck(c_p, y[i], t2)) return false;
        if (!sub_ck(t1, t2, y[p])) return false;
        if (!mul_ck(S[p], d[i], S[p])) return false;
    }
    sig = Signature{n - minus, 0, minus};

    long long det = 1;
    for (int i = 0; i < n; i++)
        if (s.parent[i] < 0 && !mul_ck(det, d[i], det)) return false;
    long long denom;
    if (!mul_ck(det, L, denom)) return false;

    auto& W = sc.W;
    W.assign(n, 0);
    for (int i = n - 1; i >= 0; i--) {
        int p = s.parent[i];
        __int128 q;
        if (p < 0) {
            q = static_cast<__int128>(y[i]) * (det / d[i]);
        } else {
            long long cc;
            if (!mul_ck(s.offp[i], S[i], cc)) return false;
            __int128 t =
                static_cast<__int128>(y[i]) * det - static_cast<__int128>(cc) * W[p];
            q = t / d[i];
            if (q * d[i] != t) return false;
        }
        if (q > INT64_MAX || q < INT64_MIN) return false;
        W[i] = static_cast<long long>(q);
    }
    b.resize(n);
    for (int i = 0; i < n; i++) b[i] = Rational(W[i], denom);
    return true;
}

// Dense fraction-free elimination (Bareiss) for small systems with cycles.
// Returns 1 on success, 0 to request the exact fallback, -1 if singular.
int bareiss_solve(const System& s, std::vector<Rational>& b, Signature& sig,
                  bool& have_sig) {
    int n = s.n;
    have_sig = false;
    auto& sc = scratch();
    long long L;
    if (!scale_rhs(s, sc.y, L)) return 0;
    int w = n + 1;
    sc.dense.assign(static_cast<size_t>(n) * w, 0);
    auto at = [&](int i, int j) -> long long& {
        return sc.dense[static_cast<size_t>(i) * w + j];
    };
    for (int i = 0; i < n; i++) {
        at(i, i) = s.diag[i];
        at(i, n) = sc.y[i];
    }
    for (const auto& o : s.off) {
        at(static_cast<int>(o[0]), static_cast<int>(o[1])) = o[2];
        at(static_cast<int>(o[1]), static_cast<int>(o[0])) = o[2];
    }
    bool swapped = false;
    int minus = 0;
    long long prev = 1;
    for (int k = 0; k < n; k++) {
        if (at(k, k) == 0) {
            int r = -1;
            for (int i = k + 1; i < n; i++)
                if (at(i, k) != 0) { r = i; break; }
            if (r < 0) return -1; // remaining column zero: singular
            for (int j = k; j <= n; j++) std::swap(at(k, j), at(r, j));
            swapped = true;
        }
        long long piv = at(k, k);
        for (int i = k + 1; i < n; i++) {
            long long f = at(i, k);
            if (f == 0 && piv == prev) continue; // row already scaled correctly
            for (int j = k + 1; j <= n; j++) {
                long long t1, t2;
                if (!mul_ck(piv, at(i, j), t1)) return 0;
                if (!mul_ck(f, at(k, j), t2)) return 0;
                if (!sub_ck(t1, t2, t1)) return 0;
                at(i, j) = t1 / prev; // exact by Bareiss
            }
            at(i, k) = 0;
        }
        if (!swapped && ((piv < 0) != (prev < 0))) minus++;
        prev = piv;
    }
    if (!swapped) {
        sig = Signature{n - minus, 0, minus};
        have_sig = true;
    }
    long long det = at(n - 1, n - 1), denom;
    if (!mul_ck(det, L, denom)) return 0;
    auto& W = sc.W;
    W.assign(n, 0);
    for (int i = n - 1; i >= 0; i--) {
        __int128 acc = static_cast<__int128>(at(i, n)) * det;
        for (int j = i + 1; j < n; j++) acc -= static_cast<__int128>(at(i, j)) * W[j];
        __int128 q = acc / at(i, i);
        if (q * at(i, i) != acc || q > INT64_MAX || q < INT64_MIN) return 0;
        W[i] = static_cast<long long>(q);
    }
    b.resize(n);
    for (int i = 0; i < n; i++) b[i] = Rational(W[i], denom);
    return 1;
}

// Exact symmetric congruence with diagonal and antidiagonal 2x2 pivot blocks;
// handles any symmetric matrix, degenerate included.
Signature congruence_inertia(std::vector<Rational> a, int n) {
    Signature s;
    std::vector<int> act(n);
    std::iota(act.begin(), act.end(), 0);
    auto A = [&](int i, int j) -> Rational& { return a[static_cast<size_t>(i) * n + j]; };
    while (!act.empty()) {
        int piv = -1;
        for (int i : act)
            if (A(i, i).sgn() != 0) { piv = i; break; }
        if (piv >= 0) {
            (A(piv, piv).sgn() > 0 ? s.plus : s.minus)++;
            for (int i : act) {
                if (i == piv || A(i, piv).sgn() == 0) continue;
                Rational f = A(i, piv) / A(piv, piv);
                for (int j : act)
                    if (j != piv) A(i, j) -= f * A(piv, j);
            }
            act.erase(std::find(act.begin(), act.end(), piv));
            continue;
        }
        int bi = -1, bj = -1;
        for (size_t u = 0; u < act.size() && bi < 0; u++)
            for (size_t v = u + 1; v < act.size(); v++)
                if (A(act[u], act[v]).sgn() != 0) {
                    bi = act[u];
                    bj = act[v];
                    break;
                }
        if (bi < 0) {
            s.zero += static_cast<int>(act.size());
            break;
        }
        s.plus++;
        s.minus++;
        Rational c = A(bi, bj);
        for (int r : act) {
            if (r == bi || r == bj) continue;
            Rational u = A(r, bi) / c, v = A(r, bj) / c;
            if (u.is_zero() && v.is_zero()) continue;
            for (int t : act)
                if (t != bi && t != bj) A(r, t) -= u * A(bj, t) + v * A(bi, t);
        }
        act.erase(std::find(act.begin(), act.end(), bi));
        act.erase(std::find(act.begin(), act.end(), bj));
    }
    return s;
}

std::vector<Rational> dense_rational(const System& s) {
    int n = s.n;
    std::vector<Rational> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; i++) a[static_cast<size_t>(i) * n + i] = Rational(s.diag[i]);
    for (const auto& o : s.off) {
        a[o[0] * static_cast<size_t>(n) + o[1]] = Rational(o[2]);
        a[o[1] * static_cast<size_t>(n) + o[0]] = Rational(o[2]);
    }
    return a;
}

// Exact GMP fallback: dense rational Gaussian elimination. Computes the
// inertia by congruence. Throws DegenerateSystem when singular.
void exact_solve(const System& s, std::vector<Rational>& b, Signature& sig) {
    int n = s.n;
    sig = congruence_inertia(dense_rational(s), n);
    if (sig.zero > 0)
        throw DegenerateSystem(sig, "intersection matrix is degenerate (class " +
                                        to_string(sig.cls()) + ", inertia " + sig.str() +
                                        "); system not solvable");
    std::vector<mpq_class> a(static_cast<size_t>(n) * (n + 1));
    auto at = [&](int i, int j) -> mpq_class& {
        return a[static_cast<size_t>(i) * (n + 1) + j];
    };
    // Entries are small; the casts keep gmpxx's long-based overloads happy.
    for (int i = 0; i < n; i++) {
        at(i, i) = static_cast<long>(s.diag[i]);
        at(i, n) = mpq_class(static_cast<long>(s.base[i])) - s.load[i].to_mpq();
    }
    for (const auto& o : s.off) {
        at(static_cast<int>(o[0]), static_cast<int>(o[1])) = static_cast<long>(o[2]);
        at(static_cast<int>(o[1]), static_cast<int>(o[0])) = static_cast<long>(o[2]);
    }
    for (int k = 0; k < n; k++) {
        int r = -1;
        for (int i = k; i < n; i++)
            if (at(i, k) != 0) { r = i; break; }
        if (r < 0)
            throw DegenerateSystem(sig, "intersection matrix is degenerate");
        if (r != k)
            for (int j = k; j <= n; j++) std::swap(at(k, j), at(r, j));
        for (int i = k + 1; i < n; i++) {
            if (at(i, k) == 0) continue;
            mpq_class f = at(i, k) / at(k, k);
            for (int j = k + 1; j <= n; j++) at(i, j) -= f * at(k, j);
            at(i, k) = 0;
        }
    }
    b.resize(n);
    std::vector<mpq_class> x(n);
    for (int i = n - 1; i >= 0; i--) {
        mpq_class acc = at(i, n);
        for (int j = i + 1; j < n; j++) acc -= at(i, j) * x[j];
        x[i] = acc / at(i, i);
        x[i].canonicalize();
        b[i] = Rational::from_mpq(x[i]);
    }
}

void finish_report(const WeightedGraph& g, DiscrepancyReport& r) {
    int n = static_cast<int>(r.b.size());
    r.a.resize(n);
    r.lc = true;
    r.lt = true;
    for (int i = 0; i < n; i++) {
        r.a[i] = Rational(1) - r.b[i];
        int sg = r.a[i].sgn();
        if (sg < 0) r.lc = false;
        if (sg <= 0) r.lt = false;
    }
    r.pld = Rational();
    r.pld_at.clear();
    for (int i = 0; i < r.internal_rows; i++) {
        if (r.pld_at.empty() || r.a[i] < r.pld) {
            r.pld = r.a[i];
            r.pld_at.assign(1, i);
        } else if (r.a[i] == r.pld) {
            r.pld_at.push_back(i);
        }
    }
    (void)g;
}

} // namespace

IntersectionMatrix intersection_matrix(const WeightedGraph& g) {
    auto& sc = scratch();
    assemble(g, sc.sys, sc.ext_row);
    const System& s = sc.sys;
    IntersectionMatrix m;
    m.n = s.n;
    m.entry.assign(static_cast<size_t>(s.n) * s.n, 0);
    for (int i = 0; i < s.n; i++) m.entry[static_cast<size_t>(i) * s.n + i] = s.diag[i];
    for (const auto& o : s.off) {
        m.entry[o[0] * static_cast<size_t>(s.n) + o[1]] = o[2];
        m.entry[o[1] * static_cast<size_t>(s.n) + o[0]] = o[2];
    }
    m.row_id.resize(s.n);
    m.row_vertex.assign(s.n, -1);
    m.row_external.assign(s.n, -1);
    for (int i = 0; i < s.nv; i++) {
        m.row_id[i] = g.vertex(i).id;
        m.row_vertex[i] = i;
    }
    for (size_t p = 0; p < s.promoted.size(); p++) {
        m.row_id[s.nv + p] = g.external(s.promoted[p]).id;
        m.row_external[s.nv + p] = s.promoted[p];
    }
    return m;
}

Signature inertia(const IntersectionMatrix& m) {
    std::vector<Rational> a(m.entry.size());
    for (size_t i = 0; i < m.entry.size(); i++) a[i] = Rational(m.entry[i]);
    return congruence_inertia(std::move(a), m.n);
}

Signature inertia(const WeightedGraph& g) {
    auto& sc = scratch();
    assemble(g, sc.sys, sc.ext_row);
    return congruence_inertia(dense_rational(sc.sys), sc.sys.n);
}

void solve_into(const WeightedGraph& g, DiscrepancyReport& r) {
    auto& sc = scratch();
    assemble(g, sc.sys, sc.ext_row);
    const System& s = sc.sys;
    r.internal_rows = s.nv;
    r.promoted.assign(s.promoted.begin(), s.promoted.end());

    bool done = false;
    if (s.forest) done = forest_solve(s, r.b, r.sig);
    if (!done && s.n <= 24) {
        bool have_sig = false;
        int rc = bareiss_solve(s, r.b, r.sig, have_sig);
        if (rc == 1) {
            done = true;
            if (!have_sig) r.sig = congruence_inertia(dense_rational(s), s.n);
        } else if (rc == -1) {
            Signature sig = congruence_inertia(dense_rational(s), s.n);
            throw DegenerateSystem(sig, "intersection matrix is degenerate (class " +
                                            to_string(sig.cls()) + ", inertia " +
                                            sig.str() + "); system not solvable");
        }
    }
    if (!done) exact_solve(s, r.b, r.sig);
    finish_report(g, r);
}

DiscrepancyReport solve_codiscrepancies(const WeightedGraph& g) {
    DiscrepancyReport r;
    solve_into(g, r);
    return r;
}

Rational pld(const WeightedGraph& g) {
    if (g.vertex_count() == 0) throw Error("pld of a graph with no vertices");
    DiscrepancyReport r = solve_codiscrepancies(g);
    if (r.sig.cls() != GraphClass::Elliptic)
        throw Error("pld requires an elliptic graph; class is " + to_string(r.sig.cls()));
    return r.pld;
}

bool check_local_bound(const WeightedGraph& g) {
    if (!g.connected()) throw Error("local bound check: graph is not connected");
    for (int x = 0; x < g.external_count(); x++)
        if (!g.external(x).coeff)
            throw Error("local bound check: external '" + g.external(x).id +
                        "' has unknown coefficient");
    std::vector<int> linked(g.external_count(), 0);
    for (const Link& l : g.links()) linked[l.ext] = 1;
    for (int x = 0; x < g.external_count(); x++)
        if (!linked[x])
            throw Error("local bound check: external '" + g.external(x).id +
                        "' is not linked to any vertex");
    DiscrepancyReport r;
    try {
        solve_into(g, r);
    } catch (const DegenerateSystem&) {
        throw Error("local bound check: graph is not elliptic");
    }
    if (r.sig.cls() != GraphClass::Elliptic)
        throw Error("local bound check: graph is not elliptic (class " +
                    to_string(r.sig.cls()) + ")");
    if (!r.lc) throw Error("local bound check: graph is not log canonical");
    Rational sum;
    for (int x = 0; x < g.external_count(); x++) sum += *g.external(x).coeff;
    return sum <= Rational(2);
}

bool unit_codiscrepancies_satisfy(const WeightedGraph& g) {
    auto& sc = scratch();
    assemble(g, sc.sys, sc.ext_row);
    const System& s = sc.sys;
    std::vector<Rational> row(s.n);
    for (int i = 0; i < s.n; i++) row[i] = Rational(s.diag[i]);
    for (const auto& o : s.off) {
        row[o[0]] += Rational(o[2]);
        row[o[1]] += Rational(o[2]);
    }
    for (int i = 0; i < s.n; i++)
        if (row[i] != Rational(s.base[i]) - s.load[i]) return false;
    return true;
}

std::vector<std::pair<int, Rational>>
triviality_defects(const WeightedGraph& g, const DiscrepancyReport& r) {
    std::vector<std::pair<int, Rational>> out;
    for (int x = 0; x < g.external_count(); x++) {
        const ExternalCurve& ext = g.external(x);
        if (!ext.weight) continue;
        Rational bx;
        if (ext.coeff) {
            bx = *ext.coeff;
        } else {
            auto it = std::find(r.promoted.begin(), r.promoted.end(), x);
            if (it == r.promoted.end()) continue;
            bx = r.b[r.internal_rows + (it - r.promoted.begin())];
        }
        // (K + sum b_j B_j + sum b_i F_i) . B_x with K.B_x = weight - 2.
        Rational defect = Rational(*ext.weight - 2) - bx * Rational(*ext.weight);
        for (const Link& l : g.links())
            if (l.ext == x) defect += r.b[l.vert] * Rational(l.mult);
        out.push_back({x, defect});
    }
    return out;
}

std::string render_report(const WeightedGraph& g, const DiscrepancyReport& r) {
    std::ostringstream out;
    std::vector<int> vorder(g.vertex_count());
    std::iota(vorder.begin(), vorder.end(), 0);
    std::sort(vorder.begin(), vorder.end(),
              [&](int a, int b) { return g.vertex(a).id < g.vertex(b).id; });
    for (int i : vorder)
        out << "vertex " << g.vertex(i).id << " a=" << r.a[i].str()
            << " b=" << r.b[i].str() << "\n";
    std::vector<int> xorder(r.promoted.size());
    std::iota(xorder.begin(), xorder.end(), 0);
    std::sort(xorder.begin(), xorder.end(), [&](int a, int b) {
        return g.external(r.promoted[a]).id < g.external(r.promoted[b]).id;
    });
    for (int p : xorder)
        out << "external " << g.external(r.promoted[p]).id
            << " solved=" << r.b[r.internal_rows + p].str() << "\n";
    if (r.sig.cls() == GraphClass::Elliptic && r.internal_rows > 0) {
        out << "pld=" << r.pld.str() << " at ";
        std::vector<std::string> ids;
        for (int v : r.pld_at) ids.push_back(g.vertex(v).id);
        std::sort(ids.begin(), ids.end());
        for (size_t i = 0; i < ids.size(); i++) out << (i ? "," : "") << ids[i];
        out << "\n";
    }
    out << "class=" << to_string(r.sig.cls()) << " inertia=" << r.sig.str() << "\n";
    out << "lc=" << (r.lc ? "true" : "false") << " lt=" << (r.lt ? "true" : "false")
        << "\n";
    return out.str();
}

} // namespace discrep
