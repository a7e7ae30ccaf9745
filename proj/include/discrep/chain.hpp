#pragma once

#include <utility>
#include <vector>

#include "discrep/rational.hpp"

namespace discrep {

// A chain arm: weights listed head-first, the head being the vertex nearest
// the attachment point (the rest of the graph). Orientation convention:
//   m = det(chain),  q = det(chain minus the head vertex),
// so chain_from_pair(q, m) expands m/q as a negative continued fraction and
// the empty chain is (q, m) = (0, 1). A degenerate arm (the fork of two
// weight-2 tails) is flagged and treated formally as q = m with alpha = 0.
struct Chain {
    std::vector<int> weights;
    long long q = 0, m = 1;
    bool degenerate = false;

    static Chain degenerate_arm() { return Chain{{}, 1, 1, true}; }
    bool empty() const { return weights.empty() && !degenerate; }
};

// External curve attached along an arm: vertex position (0 = head), link
// multiplicity, coefficient.
struct ArmAttachment {
    int vertex = 0;
    int mult = 1;
    Rational coeff;
};

// det of the weight list as a tridiagonal continuant (empty = 1).
// Throws on weights < 2 or int64 overflow.
long long chain_determinant(const std::vector<int>& weights);

Chain chain_from_pair(long long q, long long m);
std::pair<long long, long long> pair_from_chain(const std::vector<int>& weights);

// r_i = det of the subchain strictly beyond v_i, away from the attachment
// end: r_head = q, r_far = 1.
std::vector<long long> subchain_determinants(const std::vector<int>& weights);

// l_j = sum_i (B_j . F_i) r_i for one external linked along the chain.
long long l_multiplier(const std::vector<int>& weights,
                       const std::vector<std::pair<int, int>>& links);

// alpha = 1 - sum_j l_j b_j over the attachments; 0 for a degenerate arm.
Rational alpha(const Chain& c, const std::vector<ArmAttachment>& loads);

} // namespace discrep
