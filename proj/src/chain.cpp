#include "discrep/chain.hpp"

#include <numeric>
#include <string>

#include "discrep/error.hpp"

namespace discrep {

namespace {

using i128 = __int128;

long long checked_ll(i128 v, const char* what) {
    if (v > INT64_MAX || v < -(i128)INT64_MAX)
        throw Error(std::string("chain determinant overflow in ") + what);
    return (long long)v;
}

} // namespace

long long chain_determinant(const std::vector<int>& weights) {
    // continuant: D_{-1} = 0, D_0 = 1, D_k = w_k D_{k-1} - D_{k-2}
    i128 prev = 0, cur = 1;
    for (int w : weights) {
        if (w < 2) throw Error("chain weight must be >= 2, got " + std::to_string(w));
        i128 next = (i128)w * cur - prev;
        checked_ll(next, "chain_determinant");
        prev = cur;
        cur = next;
    }
    return (long long)cur;
}

Chain chain_from_pair(long long q, long long m) {
    if (m < 1) throw Error("chain pair needs m >= 1, got m=" + std::to_string(m));
    bool ok = (q == 0 && m == 1) || (q >= 1 && q < m);
    if (!ok)
        throw Error("chain pair out of range: q=" + std::to_string(q) +
                    " m=" + std::to_string(m) + " (need 0 <= q < m)");
    if (std::gcd(q, m) != 1)
        throw Error("chain pair not coprime: q=" + std::to_string(q) +
                    " m=" + std::to_string(m));
    Chain c;
    c.q = q;
    c.m = m;
    // negative continued fraction of m/q
    long long a = m, b = q;
    while (b > 0) {
        long long w = (a + b - 1) / b; // ceil(a/b)
        c.weights.push_back((int)w);
        long long r = w * b - a;
        a = b;
        b = r;
    }
    return c;
}

std::pair<long long, long long> pair_from_chain(const std::vector<int>& weights) {
    long long m = chain_determinant(weights);
    long long q = weights.empty()
                      ? 0
                      : chain_determinant({weights.begin() + 1, weights.end()});
    if (m < 1)
        throw Error("chain is not negative definite: det=" + std::to_string(m));
    return {q, m};
}

std::vector<long long> subchain_determinants(const std::vector<int>& weights) {
    // r_i = continuant of weights[i+1..]; computed right to left.
    size_t n = weights.size();
    std::vector<long long> r(n, 0);
    i128 prev = 0, cur = 1; // det past the end = 1, one further = 0
    for (size_t k = n; k-- > 0;) {
        if (k + 1 < n) {
            int w = weights[k + 1];
            if (w < 2) throw Error("chain weight must be >= 2");
            i128 next = (i128)w * cur - prev;
            checked_ll(next, "subchain_determinants");
            prev = cur;
            cur = next;
        }
        r[k] = (long long)cur;
    }
    return r;
}

long long l_multiplier(const std::vector<int>& weights,
                       const std::vector<std::pair<int, int>>& links) {
    std::vector<long long> r = subchain_determinants(weights);
    i128 l = 0;
    for (auto& [idx, mult] : links) {
        if (idx < 0 || (size_t)idx >= weights.size())
            throw Error("link index out of chain range");
        if (mult < 1) throw Error("link multiplicity must be >= 1");
        l += (i128)mult * r[idx];
    }
    return checked_ll(l, "l_multiplier");
}

Rational alpha(const Chain& c, const std::vector<ArmAttachment>& loads) {
    if (c.degenerate) {
        if (!loads.empty())
            throw Error("degenerate arm cannot carry external curves");
        return Rational(0);
    }
    Rational a(1);
    std::vector<long long> r = subchain_determinants(c.weights);
    for (const ArmAttachment& at : loads) {
        if (at.vertex < 0 || (size_t)at.vertex >= c.weights.size())
            throw Error("attachment index out of chain range");
        if (at.mult < 1) throw Error("attachment multiplicity must be >= 1");
        a -= Rational(at.mult) * Rational(r[at.vertex]) * at.coeff;
    }
    return a;
}

} // namespace discrep
