#include "discrep/family.hpp"

#include <string>

#include "discrep/error.hpp"

namespace discrep {

namespace {

using i128 = __int128;

bool fits64(i128 v) { return v <= INT64_MAX && v > INT64_MIN; }

void validate_arm(const ArmSpec& a, const char* side) {
    if (a.chain.degenerate) {
        if (!a.loads.empty())
            throw Error(std::string(side) + " arm: degenerate arm cannot carry externals");
        if (!a.chain.weights.empty())
            throw Error(std::string(side) + " arm: degenerate arm must have no weights");
        return;
    }
    for (const ArmAttachment& at : a.loads) {
        if (at.vertex < 0 || (size_t)at.vertex >= a.chain.weights.size())
            throw Error(std::string(side) + " arm: attachment index out of range");
        if (at.mult < 1)
            throw Error(std::string(side) + " arm: attachment multiplicity < 1");
        if (at.coeff.sgn() <= 0 || at.coeff > Rational(1))
            throw Error(std::string(side) + " arm: coefficient " + at.coeff.str() +
                        " outside (0,1]");
    }
}

} // namespace

ArmSpec arm_with_alpha(Chain c, const Rational& target) {
    ArmSpec a;
    if (c.degenerate) {
        if (!target.is_zero())
            throw Error("degenerate arm has alpha = 0, cannot set " + target.str());
        a.chain = std::move(c);
        return a;
    }
    if (target.sgn() < 0 || target > Rational(1))
        throw Error("arm alpha " + target.str() + " outside [0,1]");
    if (c.weights.empty() && !target.is_one())
        throw Error("empty arm requires alpha = 1");
    a.chain = std::move(c);
    if (!target.is_one()) {
        // far end has subchain determinant 1, so coeff = 1 - alpha exactly
        ArmAttachment at;
        at.vertex = (int)a.chain.weights.size() - 1;
        at.mult = 1;
        at.coeff = Rational(1) - target;
        a.loads.push_back(at);
    }
    return a;
}

Rational arm_alpha(const ArmSpec& a) { return alpha(a.chain, a.loads); }

TwoArmGraph build_two_arm(const TwoArmFamily& f) {
    validate_arm(f.left, "left");
    validate_arm(f.right, "right");
    if (f.run < 0) throw Error("two-arm family: negative run length");

    struct Item {
        std::string id;
        int weight;
    };
    std::vector<Item> path;
    int nl = (int)f.left.chain.weights.size();
    int nr = (int)f.right.chain.weights.size();
    for (int i = nl; i-- > 0;)
        path.push_back({"l" + std::to_string(i), f.left.chain.weights[i]});
    for (int k = 1; k <= f.run; k++) path.push_back({"c" + std::to_string(k), 2});
    for (int i = 0; i < nr; i++)
        path.push_back({"r" + std::to_string(i), f.right.chain.weights[i]});
    int np = (int)path.size();
    if (np == 0)
        throw Error("two-arm family with no chain vertices (forks need a vertex to attach to)");

    GraphBuilder b;
    TwoArmGraph out;
    std::vector<int> pidx(np, -1);
    int lt1 = -1, lt2 = -1, rt1 = -1, rt2 = -1;
    if (f.left.chain.degenerate) {
        lt1 = b.add_vertex("p1", 2);
        lt2 = b.add_vertex("p2", 2);
        out.left_tail_ids = {"p1", "p2"};
    }
    for (int i = 0; i + 1 < np; i++) pidx[i] = b.add_vertex(path[i].id, path[i].weight);
    if (f.right.chain.degenerate) {
        rt1 = b.add_vertex("q1", 2);
        rt2 = b.add_vertex("q2", 2);
        out.right_tail_ids = {"q1", "q2"};
    }
    pidx[np - 1] = b.add_vertex(path[np - 1].id, path[np - 1].weight);

    for (int i = 0; i + 1 < np; i++) b.add_edge(pidx[i], pidx[i + 1]);
    if (lt1 >= 0) {
        b.add_edge(lt1, pidx[0]);
        b.add_edge(lt2, pidx[0]);
    }
    if (rt1 >= 0) {
        b.add_edge(rt1, pidx[np - 1]);
        b.add_edge(rt2, pidx[np - 1]);
    }

    int xn = 0;
    for (const ArmAttachment& at : f.left.loads) {
        int x = b.add_external("x" + std::to_string(++xn), at.coeff);
        b.add_link(x, pidx[nl - 1 - at.vertex], at.mult);
    }
    for (const ArmAttachment& at : f.right.loads) {
        int x = b.add_external("x" + std::to_string(++xn), at.coeff);
        b.add_link(x, pidx[nl + f.run + at.vertex], at.mult);
    }

    for (int i = 0; i < nl; i++) out.left_ids.push_back("l" + std::to_string(i));
    for (int k = 1; k <= f.run; k++) out.run_ids.push_back("c" + std::to_string(k));
    for (int i = 0; i < nr; i++) out.right_ids.push_back("r" + std::to_string(i));
    out.graph = b.build_fast();
    return out;
}

Rational two_arm_head_a(const TwoArmFamily& f, bool right_head) {
    const ArmSpec& s1 = right_head ? f.right : f.left;
    const ArmSpec& s2 = right_head ? f.left : f.right;
    if (s1.chain.degenerate) throw Error("degenerate arm has no head vertex");
    if (s1.chain.empty()) throw Error("empty arm has no head vertex");
    if (f.run < 0) throw Error("two-arm family: negative run length");

    long long q1 = s1.chain.q, m1 = s1.chain.m;
    long long q2 = s2.chain.degenerate ? 1 : s2.chain.q;
    long long m2 = s2.chain.degenerate ? 1 : s2.chain.m;
    Rational a1 = arm_alpha(s1);
    Rational a2 = s2.chain.degenerate ? Rational(0) : arm_alpha(s2);
    long long A = f.run;

    long long d2 = m2 - q2, d1 = m1 - q1; // d1 >= 1; d2 = 0 on a degenerate side
    if (a1.fits_small() && a2.fits_small()) {
        i128 den0 = (i128)A * d2 * d1 + (i128)m2 * d1 + (i128)q1 * d2;
        i128 num = (i128)a1.num() * ((i128)A * d2 + m2) * a2.den() +
                   (i128)a2.num() * a1.den() * q1;
        i128 den = (i128)a1.den() * a2.den() * den0;
        if (fits64(num) && fits64(den)) return Rational((long long)num, (long long)den);
    }
    Rational num = a1 * Rational(A * d2 + m2) + a2 * Rational(q1);
    Rational den = Rational(A) * Rational(d2) * Rational(d1) + Rational(m2) * Rational(d1) +
                   Rational(q1) * Rational(d2);
    return num / den;
}

Rational two_arm_limit(const ArmSpec& evaluated_side) {
    const Chain& c = evaluated_side.chain;
    if (c.degenerate) throw Error("degenerate arm has no head vertex");
    if (c.empty()) throw Error("empty arm has no head vertex");
    return arm_alpha(evaluated_side) / Rational(c.m - c.q);
}

StarGraph build_star(const StarFamily& f) {
    if (f.center_weight < 1 && !f.center_coeff)
        throw Error("star center weight must be >= 1");
    StarGraph out;
    GraphBuilder b;
    std::vector<int> heads; // builder indices of arm heads (or tails, for forks)
    out.arm_ids.resize(f.arms.size());
    out.tail_ids.resize(f.arms.size());

    int xn = 0;
    for (size_t s = 0; s < f.arms.size(); s++) {
        const ArmSpec& arm = f.arms[s];
        validate_arm(arm, ("arm " + std::to_string(s + 1)).c_str());
        std::string p = "a" + std::to_string(s + 1);
        if (arm.chain.degenerate) {
            int t1 = b.add_vertex(p + "t1", 2);
            int t2 = b.add_vertex(p + "t2", 2);
            out.tail_ids[s] = {p + "t1", p + "t2"};
            heads.push_back(t1);
            heads.push_back(t2);
            continue;
        }
        if (arm.chain.empty())
            throw Error("star arm " + std::to_string(s + 1) + " is empty");
        int k = (int)arm.chain.weights.size();
        std::vector<int> idx(k, -1); // by head-based position
        for (int i = k; i-- > 0;) {
            idx[i] = b.add_vertex(p + "v" + std::to_string(i), arm.chain.weights[i]);
            if (i + 1 < k) b.add_edge(idx[i], idx[i + 1]);
        }
        for (int i = 0; i < k; i++) out.arm_ids[s].push_back(p + "v" + std::to_string(i));
        for (const ArmAttachment& at : arm.loads) {
            int x = b.add_external("x" + std::to_string(++xn), at.coeff);
            b.add_link(x, idx[at.vertex], at.mult);
        }
        heads.push_back(idx[0]);
    }

    if (f.center_coeff) {
        if (f.center_coeff->sgn() <= 0 || *f.center_coeff > Rational(1))
            throw Error("star center coefficient " + f.center_coeff->str() +
                        " outside (0,1]");
        int c = b.add_external("c", *f.center_coeff, f.center_weight);
        for (int h : heads) b.add_link(c, h);
    } else {
        int c = b.add_vertex("c", f.center_weight);
        for (int h : heads) b.add_edge(h, c);
    }
    out.center_id = "c";
    out.graph = b.build_fast();
    return out;
}

Rational star_center_closed_form(const StarFamily& f) {
    long long n = (long long)f.arms.size();
    Rational q_sum, s_sum; // sum q/m and sum (q + alpha)/m
    for (const ArmSpec& arm : f.arms) {
        validate_arm(arm, "arm");
        if (arm.chain.degenerate) {
            q_sum += Rational(1);
            s_sum += Rational(1);
            continue;
        }
        if (arm.chain.empty()) throw Error("star arm is empty");
        q_sum += Rational(arm.chain.q, arm.chain.m);
        s_sum += (Rational(arm.chain.q) + arm_alpha(arm)) / Rational(arm.chain.m);
    }
    Rational den = q_sum - Rational(f.center_weight);
    if (den.is_zero())
        throw Error("star center: zero denominator (parabolic boundary case, "
                    "sum q_s/m_s equals the center weight)");
    return (s_sum - Rational(n - 2 + f.center_weight)) / den;
}

Rational star_center_bound(int n_arms) {
    if (n_arms < 5) throw Error("star center bound applies to N >= 5 arms");
    return Rational(n_arms + 2, 2LL * (n_arms - 1));
}

} // namespace discrep
