#pragma once

#include <optional>
#include <string>
#include <vector>

#include "discrep/chain.hpp"
#include "discrep/graph.hpp"

namespace discrep {

// One arm of a parametric family: a chain plus external curves attached
// along it. A degenerate arm (chain.degenerate) is the fork of two weight-2
// tails and carries no externals; it behaves formally as q = m, alpha = 0.
struct ArmSpec {
    Chain chain;
    std::vector<ArmAttachment> loads;
};

// Realizes a target alpha in (0,1] by a single multiplicity-1 external of
// coefficient 1 - alpha at the far end (where r = 1); alpha = 1 means no
// external. Requires a nonempty, non-degenerate chain unless alpha = 1.
ArmSpec arm_with_alpha(Chain c, const Rational& alpha);

Rational arm_alpha(const ArmSpec& a);

// Chain family: left arm -- run of `run` weight-2 vertices -- right arm.
// Either arm may be degenerate (a fork of two weight-2 tails at that end)
// or empty (q, m) = (0, 1) (the chain just stops).
struct TwoArmFamily {
    ArmSpec left, right;
    int run = 0;
};

struct TwoArmGraph {
    WeightedGraph graph;
    std::vector<std::string> left_ids, run_ids, right_ids; // arm ids head-first
    std::vector<std::string> left_tail_ids, right_tail_ids;
};

TwoArmGraph build_two_arm(const TwoArmFamily& f);

// Closed form for the log discrepancy at the head of one arm
// ((q1,m1,alpha1) = evaluated side, (q2,m2,alpha2) = other side, A = run):
//   a = [alpha1 (A(m2-q2) + m2) + alpha2 q1]
//       / [A(m2-q2)(m1-q1) + m2(m1-q1) + q1(m2-q2)]
// with the degenerate side entering as q2 = m2, alpha2 = 0.
Rational two_arm_head_a(const TwoArmFamily& f, bool right_head = false);

// Limit of two_arm_head_a as the run length grows: alpha / (m - q) for the
// evaluated side. Requires that side non-degenerate.
Rational two_arm_limit(const ArmSpec& evaluated_side);

// Star: central vertex of weight center_weight with N chain arms attached at
// their heads. center_coeff fixes the center as a boundary curve of that
// coefficient instead (it becomes an external with weight attribute).
struct StarFamily {
    std::vector<ArmSpec> arms;
    int center_weight = 1;
    std::optional<Rational> center_coeff;
};

struct StarGraph {
    WeightedGraph graph;
    std::string center_id; // vertex id, or external id in fixed-center mode
    std::vector<std::vector<std::string>> arm_ids; // per arm, head-first
    std::vector<std::vector<std::string>> tail_ids; // per degenerate arm
};

StarGraph build_star(const StarFamily& f);

// Codiscrepancy of the center:
//   b0 = [sum_s (q_s + alpha_s)/m_s - (N - 2 + w0)] / [sum_s q_s/m_s - w0]
// (degenerate arms contribute 1 to both sums). Throws on a zero denominator:
// that is the parabolic boundary case, reported rather than solved.
Rational star_center_closed_form(const StarFamily& f);

// Upper bound (N/2 + 1)/(N - 1) for the center codiscrepancy of an N-armed
// star, N >= 5, with weight-1 center and genuine arms; 7/8 at N = 5.
Rational star_center_bound(int n_arms);

} // namespace discrep
