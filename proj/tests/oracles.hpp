#pragma once

#include <vector>

#include "discrep/graph.hpp"
#include "discrep/solver.hpp"

// Reference implementations kept deliberately naive and separate from the
// library code paths, for cross-checking results in tests.
namespace discrep::oracle {

// Numerically-trivial system assembled straight from the row definition and
// solved by dense rational Gaussian elimination. Rows: internal vertices in
// order, then unknown-coefficient externals in order. Throws on a singular
// matrix.
std::vector<Rational> solve_b(const WeightedGraph& g);

// Inertia from the characteristic polynomial (Faddeev-LeVerrier over
// rationals) and Descartes' rule of signs, exact because the matrix is
// symmetric.
Signature inertia_charpoly(const WeightedGraph& g);

// det of diag(w) with -1 off-diagonal couplings, by Gaussian elimination on
// the dense rational matrix.
long long tridiag_det(const std::vector<int>& weights);

// Labeled isomorphism of weighted graphs with decorated externals, by
// brute-force permutation. Requires <= 8 vertices.
bool isomorphic(const WeightedGraph& a, const WeightedGraph& b);

} // namespace discrep::oracle
