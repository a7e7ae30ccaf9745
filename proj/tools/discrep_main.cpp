#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "discrep/blowup.hpp"
#include "discrep/chain.hpp"
#include "discrep/enumerate.hpp"
#include "discrep/error.hpp"
#include "discrep/family.hpp"
#include "discrep/graph.hpp"
#include "discrep/harness.hpp"
#include "discrep/rational.hpp"
#include "discrep/solver.hpp"

using namespace discrep;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join_ll(const std::vector<long long>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); i++) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::vector<Rational> parse_coeff_list(const std::string& list) {
    std::vector<Rational> out;
    std::istringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(Rational::from_string(item));
    return out;
}

// Shared enumeration flags for enumerate/spectrum/verify.
struct SpecFlags {
    int max_vertices = 4;
    int min_vertices = 1;
    int max_weight = 4;
    std::string shape = "any";
    std::string coeffs;
    int max_externals = 0;
    int max_edge_mult = 0;
    int threads = 0;
    bool lc = false, lt = false, minimal = false, elliptic = false;

    void attach(CLI::App* cmd, bool required) {
        auto* mv = cmd->add_option("--max-vertices", max_vertices, "vertex bound");
        auto* mw = cmd->add_option("--max-weight", max_weight, "weight bound");
        if (required) {
            mv->required();
            mw->required();
        }
        cmd->add_option("--min-vertices", min_vertices, "lower vertex bound");
        cmd->add_option("--shape", shape, "chain|tree|any")
            ->check(CLI::IsMember({"chain", "tree", "any"}));
        cmd->add_option("--coeffs", coeffs, "boundary coefficient lattice, e.g. 1/2,3/4,1");
        cmd->add_option("--max-externals", max_externals, "boundary curve bound");
        cmd->add_option("--max-edge-mult", max_edge_mult, "edge multiplicity cap (0 = auto)");
        cmd->add_option("--threads", threads, "parallel workers (0 = serial)");
        cmd->add_flag("--lc", lc, "keep only log canonical graphs");
        cmd->add_flag("--lt", lt, "keep only log terminal graphs");
        cmd->add_flag("--minimal", minimal, "exclude (-1)-curves");
        cmd->add_flag("--elliptic", elliptic, "negative definite graphs only");
    }

    EnumerationSpec spec() const {
        EnumerationSpec s;
        s.max_vertices = max_vertices;
        s.min_vertices = min_vertices;
        s.max_weight = max_weight;
        s.shape = shape == "chain" ? Shape::Chain
                : shape == "tree" ? Shape::Tree
                                  : Shape::Any;
        s.elliptic_only = elliptic;
        s.minimal_only = minimal;
        s.lc_only = lc;
        s.lt_only = lt;
        if (!coeffs.empty()) s.coeffs = parse_coeff_list(coeffs);
        s.max_externals = max_externals;
        s.max_edge_mult = max_edge_mult;
        s.threads = threads;
        return s;
    }
};

int cmd_solve(const std::string& file) {
    WeightedGraph g = parse_graph(slurp(file));
    try {
        DiscrepancyReport r = solve_codiscrepancies(g);
        std::cout << render_report(g, r);
    } catch (const DegenerateSystem& e) {
        std::cout << "class=" << to_string(e.sig.cls()) << " inertia=" << e.sig.str()
                  << "\n"
                  << "degenerate=true\n"
                  << "unit_boundary=" << (unit_codiscrepancies_satisfy(g) ? "true" : "false")
                  << "\n";
    }
    return 0;
}

int cmd_classify(const std::string& file) {
    WeightedGraph g = parse_graph(slurp(file));
    Signature s = inertia(g);
    std::cout << "vertices=" << g.vertex_count() << " externals=" << g.external_count()
              << "\n"
              << "class=" << to_string(s.cls()) << " inertia=" << s.str() << "\n"
              << "connected=" << (g.connected() ? "true" : "false")
              << " minimal=" << (is_minimal(g) ? "true" : "false")
              << " du_val=" << (is_du_val(g) ? "true" : "false") << "\n";
    return 0;
}

int cmd_chain(long long q, long long m) {
    Chain c = chain_from_pair(q, m);
    std::cout << "q=" << q << " m=" << m << "\n";
    std::string w;
    for (size_t i = 0; i < c.weights.size(); i++)
        w += (i ? "," : "") + std::to_string(c.weights[i]);
    std::cout << "weights=" << w << "\n";
    std::cout << "det=" << chain_determinant(c.weights) << "\n";
    std::cout << "r=" << join_ll(subchain_determinants(c.weights)) << "\n";
    auto [q2, m2] = pair_from_chain(c.weights);
    std::cout << "roundtrip=" << (q2 == q && m2 == m ? "true" : "false") << "\n";
    return q2 == q && m2 == m ? 0 : 1;
}

ArmSpec parse_arm(long long q, long long m, const Rational& alpha, bool fork) {
    if (fork) return ArmSpec{Chain::degenerate_arm(), {}};
    return arm_with_alpha(chain_from_pair(q, m), alpha);
}

int cmd_family_fig2(long long q1, long long m1, long long q2, long long m2, int run,
                    const std::string& alpha1, const std::string& alpha2, bool fork2) {
    TwoArmFamily f;
    f.left = parse_arm(q1, m1, Rational::from_string(alpha1), false);
    f.right = parse_arm(q2, m2, Rational::from_string(alpha2), fork2);
    f.run = run;
    TwoArmGraph tg = build_two_arm(f);
    DiscrepancyReport r = solve_codiscrepancies(tg.graph);
    std::cout << render_report(tg.graph, r);
    std::cout << "family=" << family_label(tg.graph) << "\n";

    bool match = true;
    if (!f.left.chain.empty() && !f.left.chain.degenerate) {
        Rational a1 = two_arm_head_a(f);
        Rational s1 = r.a[*tg.graph.find_vertex(tg.left_ids[0])];
        match = match && a1 == s1;
        std::cout << "a1=" << a1.str() << " a1_solver=" << s1.str() << "\n";
        std::cout << "limit1=" << two_arm_limit(f.left).str() << "\n";
    }
    if (!f.right.chain.empty() && !f.right.chain.degenerate) {
        Rational a2 = two_arm_head_a(f, true);
        Rational s2 = r.a[*tg.graph.find_vertex(tg.right_ids[0])];
        match = match && a2 == s2;
        std::cout << "a2=" << a2.str() << " a2_solver=" << s2.str() << "\n";
        std::cout << "limit2=" << two_arm_limit(f.right).str() << "\n";
    }
    std::cout << "match=" << (match ? "true" : "false") << "\n";
    return match ? 0 : 1;
}

int cmd_family_star(const std::vector<std::string>& arm_specs, int center_weight,
                    const std::string& center_coeff) {
    StarFamily f;
    f.center_weight = center_weight;
    for (const std::string& text : arm_specs) {
        std::istringstream ss(text);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, ',')) parts.push_back(part);
        if (parts.size() < 2 || parts.size() > 3)
            throw Error("--arm expects q,m or q,m,alpha; got '" + text + "'");
        long long q = std::stoll(parts[0]), m = std::stoll(parts[1]);
        Rational alpha = parts.size() == 3 ? Rational::from_string(parts[2]) : Rational(1);
        if (q == m) // q = m marks the degenerate arm (fork of two 2-tails)
            f.arms.push_back(ArmSpec{Chain::degenerate_arm(), {}});
        else
            f.arms.push_back(arm_with_alpha(chain_from_pair(q, m), alpha));
    }
    if (!center_coeff.empty()) f.center_coeff = Rational::from_string(center_coeff);
    std::cout << "arms=" << f.arms.size() << "\n";

    Rational closed;
    try {
        closed = star_center_closed_form(f);
    } catch (const Error& e) {
        StarGraph sg = build_star(f);
        Signature s = inertia(sg.graph);
        std::cout << "boundary_case=true\n"
                  << "class=" << to_string(s.cls()) << " inertia=" << s.str() << "\n";
        std::cout << "note=" << e.what() << "\n";
        return 0;
    }
    std::cout << "b0_closed=" << closed.str() << "\n";

    StarGraph sg = build_star(f);
    DiscrepancyReport r = solve_codiscrepancies(sg.graph);
    std::cout << render_report(sg.graph, r);
    bool match = true;
    if (!f.center_coeff) {
        Rational solved = r.b[*sg.graph.find_vertex(sg.center_id)];
        match = solved == closed;
        std::cout << "b0_solver=" << solved.str() << "\n";
    }
    if ((int)f.arms.size() >= 5 && center_weight == 1) {
        Rational bound = star_center_bound((int)f.arms.size());
        std::cout << "bound=" << bound.str()
                  << " within=" << (closed <= bound ? "true" : "false") << "\n";
    }
    std::cout << "match=" << (match ? "true" : "false") << "\n";
    return match ? 0 : 1;
}

int cmd_blowup(const std::string& file, int depth, bool prune) {
    Cluster c = parse_cluster(slurp(file));
    validate_cluster(c);
    BlowupTrace t = run_trace(c);
    for (size_t i = 0; i < c.points.size(); i++)
        std::cout << "point " << c.points[i].id << " s=" << t.s[i]
                  << " t=" << join_ll(t.t[i]) << " b=" << t.b[i].str()
                  << " a=" << t.a[i].str() << "\n";
    for (const ClusterBranch& br : c.branches)
        std::cout << "branch " << br.id << " coeff=" << br.coeff.str()
                  << " a=" << (Rational(1) - br.coeff).str() << "\n";
    std::cout << "min_a=" << t.min_a.str() << "\n";

    bool dual_match = true;
    try {
        WeightedGraph g = cluster_dual_graph(c);
        DiscrepancyReport r = solve_codiscrepancies(g);
        for (size_t i = 0; i < c.points.size(); i++)
            dual_match = dual_match && r.b[*g.find_vertex(c.points[i].id)] == t.b[i];
    } catch (const Error&) {
        dual_match = false;
    }
    std::cout << "dual_match=" << (dual_match ? "true" : "false") << "\n";

    if (depth > 0) {
        SearchResult s = ld_search(c, depth, prune);
        std::cout << "ld=" << s.value.str()
                  << " complete=" << (s.complete ? "true" : "false") << "\n";
    }
    return dual_match ? 0 : 1;
}

int cmd_enumerate(const SpecFlags& flags, bool count_only) {
    EnumerationSpec spec = flags.spec();
    if (count_only) {
        std::cout << "count=" << enumerate_count(spec) << "\n";
        return 0;
    }
    long long n = 0;
    enumerate_graphs(spec, [&](const WeightedGraph& g) {
        std::cout << "# " << ++n << "\n" << serialize_graph(g) << "\n";
    });
    std::cout << "count=" << n << "\n";
    return 0;
}

int cmd_spectrum(const SpecFlags& flags, const std::string& format,
                 const std::string& floor_s, const std::string& window_s,
                 long long min_support, int max_k, const std::string& tol_s) {
    PLDSet s = pld_spectrum(flags.spec());
    if (format == "tsv") {
        std::cout << "value\tgenerators\tfamilies\n";
        for (const SpectrumEntry& e : s.entries) {
            std::string fams;
            for (size_t i = 0; i < e.families.size(); i++)
                fams += (i ? ";" : "") + e.families[i];
            std::cout << e.value.str() << "\t" << e.generators << "\t" << fams << "\n";
        }
    } else {
        for (const SpectrumEntry& e : s.entries) {
            std::cout << "value=" << e.value.str() << " generators=" << e.generators
                      << " families=";
            for (size_t i = 0; i < e.families.size(); i++)
                std::cout << (i ? ";" : "") << e.families[i];
            std::cout << "\n";
        }
    }
    std::cout << "total=" << s.total_graphs << " values=" << s.entries.size() << "\n";

    ClusterReport rep =
        cluster_check(s, Rational::from_string(floor_s), Rational::from_string(window_s),
                      min_support, max_k, Rational::from_string(tol_s));
    std::cout << "candidates=" << rep.candidates
              << " all_near_targets=" << (rep.all_near_targets ? "true" : "false") << "\n";
    for (const ClusterCandidate& v : rep.violations)
        std::cout << "violation=" << v.center.str() << " support=" << v.support
                  << " nearest=" << v.nearest.str() << " distance=" << v.distance.str()
                  << "\n";
    return rep.all_near_targets ? 0 : 1;
}

bool strictly_decreasing(const SequenceVerdict& v) {
    for (size_t i = 1; i < v.steps.size(); i++)
        if (!(v.steps[i].value < v.steps[i - 1].value)) return false;
    return true;
}

// Canned finite-prefix checks: two families where the hypotheses hold and the
// tracked value falls, and the cone family where log canonicity must fail.
int cmd_verify_acc() {
    bool all = true;

    {
        TwoArmFamily f;
        f.left = arm_with_alpha(chain_from_pair(1, 3), Rational(1));
        f.right = ArmSpec{chain_from_pair(0, 1), {}};
        std::vector<WeightedGraph> seq;
        for (int run = 1; run <= 50; run++) {
            f.run = run;
            seq.push_back(build_two_arm(f).graph);
        }
        SequenceVerdict v = verify_acc_on_sequence(seq);
        // pld of [3,2^A] is (A+2)/(2A+3), falling toward 1/2.
        bool ok = v.hypotheses_ok && !v.increasing && strictly_decreasing(v) &&
                  v.steps.front().tracked == "pld" &&
                  v.steps.front().value == Rational(3, 5) &&
                  v.steps.back().value == Rational(52, 103);
        std::cout << "sequence=fig2_sweep elements=" << v.steps.size()
                  << " hypotheses_ok=" << (v.hypotheses_ok ? "true" : "false")
                  << " monotone=decreasing first=" << v.steps.front().value.str()
                  << " last=" << v.steps.back().value.str()
                  << " pass=" << (ok ? "true" : "false") << "\n";
        all = all && ok;
    }

    {
        std::vector<WeightedGraph> seq;
        for (int k = 1; k <= 4; k++) {
            GraphBuilder b;
            int v = b.add_vertex("v1", 2);
            b.add_link(b.add_external("x", Rational(k, 4)), v);
            seq.push_back(b.build());
        }
        SequenceVerdict v = verify_acc_on_sequence(seq);
        bool ok = v.hypotheses_ok && strictly_decreasing(v) &&
                  v.steps.back().value == Rational(1, 2);
        std::cout << "sequence=coeff_sweep elements=" << v.steps.size()
                  << " hypotheses_ok=" << (v.hypotheses_ok ? "true" : "false")
                  << " monotone=decreasing pass=" << (ok ? "true" : "false") << "\n";
        all = all && ok;
    }

    {
        std::vector<WeightedGraph> seq;
        for (int n = 2; n <= 10; n++) seq.push_back(cone_family_fixture(n));
        SequenceVerdict v = verify_acc_on_sequence(seq);
        bool lc_fails_everywhere = true;
        for (const SequenceStep& st : v.steps)
            lc_fails_everywhere = lc_fails_everywhere && !st.lc && st.group_ok;
        bool ok = !v.hypotheses_ok && v.first_violation == 0 && lc_fails_everywhere &&
                  v.increasing;
        std::cout << "sequence=cone_family elements=" << v.steps.size()
                  << " lc_fails=" << (lc_fails_everywhere ? "true" : "false")
                  << " tracked_increasing=" << (v.increasing ? "true" : "false")
                  << " pass=" << (ok ? "true" : "false") << "\n";
        all = all && ok;
    }

    std::cout << "acc=" << (all ? "pass" : "fail") << "\n";
    return all ? 0 : 1;
}

int cmd_verify(const std::string& name, const SpecFlags& flags) {
    if (name == "acc") return cmd_verify_acc();
    SuiteReport rep = verify_lemma_suite(name, flags.spec());
    std::cout << "suite=" << rep.name << " instances=" << rep.instances
              << " counterexamples=" << rep.counterexamples
              << " pass=" << (rep.pass ? "true" : "false") << "\n";
    for (const std::string& d : rep.details) {
        std::istringstream ss(d);
        std::string line;
        while (std::getline(ss, line)) std::cout << "  " << line << "\n";
        std::cout << "\n";
    }
    return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"log discrepancies of surface singularities from weighted dual graphs"};
    app.require_subcommand(1);

    std::string graph_file, cluster_file;
    auto* solve = app.add_subcommand("solve", "solve codiscrepancies of a graph file");
    solve->add_option("graph-file", graph_file)->required();
    auto* classify = app.add_subcommand("classify", "intersection-form class of a graph file");
    classify->add_option("graph-file", graph_file)->required();

    long long cq = 0, cm = 1;
    auto* chain = app.add_subcommand("chain", "expand a coprime pair into its chain");
    chain->add_option("q", cq)->required();
    chain->add_option("m", cm)->required();

    auto* family = app.add_subcommand("family", "parametric families with closed forms");
    family->require_subcommand(1);
    long long q1 = 0, m1 = 1, q2 = 0, m2 = 1;
    int run = 0;
    std::string alpha1 = "1", alpha2 = "1";
    bool fork2 = false;
    auto* fig2 = family->add_subcommand("fig2", "two arms joined by a run of 2's");
    fig2->add_option("--q1", q1)->required();
    fig2->add_option("--m1", m1)->required();
    fig2->add_option("--q2", q2);
    fig2->add_option("--m2", m2);
    fig2->add_option("-A,--run", run, "length of the middle run");
    fig2->add_option("--alpha1", alpha1, "left boundary weight alpha");
    fig2->add_option("--alpha2", alpha2, "right boundary weight alpha");
    fig2->add_flag("--fork2", fork2, "degenerate right arm (two weight-2 tails)");

    std::vector<std::string> arm_specs;
    int center_weight = 1;
    std::string center_coeff;
    auto* star = family->add_subcommand("star", "chain arms around a central vertex");
    star->add_option("--arm", arm_specs, "arm as q,m or q,m,alpha (repeatable)")
        ->required();
    star->add_option("--center-weight", center_weight);
    star->add_option("--center-coeff", center_coeff,
                     "fix the center as a boundary curve of this coefficient");

    int depth = 0;
    bool no_prune = false;
    auto* blowup = app.add_subcommand("blowup", "execute a cluster of infinitely near points");
    blowup->add_option("cluster-file", cluster_file)->required();
    blowup->add_option("--depth", depth, "search depth for the ld minimum");
    blowup->add_flag("--no-prune", no_prune, "disable certificate pruning in the search");

    SpecFlags eflags;
    bool count_only = false;
    auto* enumerate = app.add_subcommand("enumerate", "stream graphs within bounds");
    eflags.attach(enumerate, true);
    enumerate->add_flag("--count", count_only, "print the count only");

    SpecFlags sflags;
    std::string format = "keyvalue", floor_s = "9/100", window_s = "1/100",
                tol_s = "1/100";
    long long min_support = 10;
    int max_k = 11;
    auto* spectrum = app.add_subcommand("spectrum", "pld spectrum with accumulation check");
    sflags.attach(spectrum, true);
    spectrum->add_option("--format", format)->check(CLI::IsMember({"keyvalue", "tsv"}));
    spectrum->add_option("--floor", floor_s, "ignore values at or below this");
    spectrum->add_option("--window", window_s, "support-pooling radius");
    spectrum->add_option("--min-support", min_support, "generators needed for a candidate");
    spectrum->add_option("--max-k", max_k, "targets 1/k for k = 2..max_k");
    spectrum->add_option("--tol", tol_s, "distance allowed to the nearest target");

    std::string verify_name;
    SpecFlags vflags;
    vflags.coeffs = "1/4,1/2,3/4,1";
    vflags.max_externals = 2;
    auto* verify = app.add_subcommand("verify", "lemma suites and sequence checks");
    verify->add_option("name", verify_name,
                       "a_less1|subgraph_mono|hyper_mono|max_ell|max_hyp|loc_bound|acc")
        ->required();
    vflags.attach(verify, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(graph_file);
        if (classify->parsed()) return cmd_classify(graph_file);
        if (chain->parsed()) return cmd_chain(cq, cm);
        if (fig2->parsed())
            return cmd_family_fig2(q1, m1, q2, m2, run, alpha1, alpha2, fork2);
        if (star->parsed())
            return cmd_family_star(arm_specs, center_weight, center_coeff);
        if (blowup->parsed()) return cmd_blowup(cluster_file, depth, !no_prune);
        if (enumerate->parsed()) return cmd_enumerate(eflags, count_only);
        if (spectrum->parsed())
            return cmd_spectrum(sflags, format, floor_s, window_s, min_support, max_k,
                                tol_s);
        if (verify->parsed()) return cmd_verify(verify_name, vflags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
