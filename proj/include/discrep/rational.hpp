#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "discrep/error.hpp"

namespace discrep {

// Exact rational number. Values live in a reduced int64 num/den pair and
// promote transparently to GMP when an operation outgrows 64 bits, demoting
// again as soon as the result fits. Denominator is always positive, fractions
// always in lowest terms. No floating point.
//
// Invariant: big_ is non-null exactly when the value does NOT fit the small
// representation (|num| <= INT64_MAX-ish, den <= INT64_MAX). Mixed-repr
// equality is therefore always false.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : n_(n) {} // NOLINT: implicit by design, like int
    Rational(int n) : n_(n) {}
    Rational(long long n, long long d);

    Rational(const Rational& o)
        : n_(o.n_), d_(o.d_),
          big_(o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr) {}
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& o) {
        if (this != &o) {
            n_ = o.n_;
            d_ = o.d_;
            big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    // Accepts "p", "-p", "p/q" (reduced on read). Throws Error on anything else.
    static Rational from_string(std::string_view s);

    // From a canonicalized GMP rational; demotes when it fits.
    static Rational from_mpq(const mpq_class& q) {
        Rational r;
        r.set_from_mpq_(q);
        return r;
    }

    bool fits_small() const { return !big_; }
    // Require fits_small(); the exact-arithmetic internals use these.
    long long num() const {
        if (big_) throw Error("rational too large for 64-bit access: " + str());
        return n_;
    }
    long long den() const {
        if (big_) throw Error("rational too large for 64-bit access: " + str());
        return d_;
    }

    int sgn() const {
        if (big_) return ::sgn(*big_);
        return n_ > 0 ? 1 : n_ < 0 ? -1 : 0;
    }
    bool is_zero() const { return !big_ && n_ == 0; }
    bool is_one() const { return !big_ && n_ == 1 && d_ == 1; }
    bool is_integer() const {
        return big_ ? big_->get_den() == 1 : d_ == 1;
    }

    // "p" for integers, "p/q" otherwise, always lowest terms.
    std::string str() const;

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
        if (a.big_ && b.big_) return mpq_equal(a.big_->get_mpq_t(), b.big_->get_mpq_t()) != 0;
        return false; // one fits, one doesn't: values differ
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp_(a, b) < 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp_(a, b) > 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp_(a, b) <= 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return cmp_(a, b) >= 0; }

    friend Rational abs(const Rational& a) { return a.sgn() < 0 ? -a : a; }

    // Exposes the GMP value (promoting a copy if needed); for oracles/tests.
    mpq_class to_mpq() const {
        if (big_) return *big_;
        return mpq_class(static_cast<long>(n_), static_cast<long>(d_));
    }

private:
    using i128 = __int128;

    long long n_ = 0;
    long long d_ = 1;
    std::unique_ptr<mpq_class> big_;

    void set_from_i128_(i128 n, i128 d);   // reduces, picks representation
    void set_from_mpq_(const mpq_class& q); // canonical input; demotes if it fits
    void promote_() const;                  // never called; big ops build temps

    static int cmp_(const Rational& a, const Rational& b);
    Rational& big_binop_(const Rational& o, char op);

    static unsigned long long uabs_(long long v) {
        return v < 0 ? 0ULL - static_cast<unsigned long long>(v)
                     : static_cast<unsigned long long>(v);
    }
};

inline Rational& Rational::operator+=(const Rational& o) {
    if (!big_ && !o.big_) {
        // Knuth 4.5.1: gcd work stays on 64-bit operands.
        long long g0 = std::gcd(d_, o.d_);
        i128 t = static_cast<i128>(n_) * (o.d_ / g0) + static_cast<i128>(o.n_) * (d_ / g0);
        i128 den = static_cast<i128>(d_ / g0) * o.d_;
        if (g0 != 1) {
            long long g1 = std::gcd(static_cast<long long>(t % g0), g0);
            if (g1 < 0) g1 = -g1;
            if (g1 > 1) { t /= g1; den /= g1; }
        }
        if (t > INT64_MIN && t <= INT64_MAX && den <= INT64_MAX) {
            n_ = static_cast<long long>(t);
            d_ = static_cast<long long>(den);
            return *this;
        }
        set_from_i128_(t, den);
        return *this;
    }
    return big_binop_(o, '+');
}

inline Rational& Rational::operator-=(const Rational& o) {
    if (!big_ && !o.big_) {
        long long g0 = std::gcd(d_, o.d_);
        i128 t = static_cast<i128>(n_) * (o.d_ / g0) - static_cast<i128>(o.n_) * (d_ / g0);
        i128 den = static_cast<i128>(d_ / g0) * o.d_;
        if (g0 != 1) {
            long long g1 = std::gcd(static_cast<long long>(t % g0), g0);
            if (g1 < 0) g1 = -g1;
            if (g1 > 1) { t /= g1; den /= g1; }
        }
        if (t > INT64_MIN && t <= INT64_MAX && den <= INT64_MAX) {
            n_ = static_cast<long long>(t);
            d_ = static_cast<long long>(den);
            return *this;
        }
        set_from_i128_(t, den);
        return *this;
    }
    return big_binop_(o, '-');
}

inline Rational& Rational::operator*=(const Rational& o) {
    if (!big_ && !o.big_) {
        // Cross-reduce first: results of coprime inputs come out reduced.
        long long g1 = std::gcd(uabs_(n_), static_cast<unsigned long long>(o.d_));
        long long g2 = std::gcd(uabs_(o.n_), static_cast<unsigned long long>(d_));
        i128 t = static_cast<i128>(n_ / g1) * (o.n_ / g2);
        i128 den = static_cast<i128>(d_ / g2) * (o.d_ / g1);
        if (t > INT64_MIN && t <= INT64_MAX && den <= INT64_MAX) {
            n_ = static_cast<long long>(t);
            d_ = static_cast<long long>(den);
            return *this;
        }
        set_from_i128_(t, den);
        return *this;
    }
    return big_binop_(o, '*');
}

inline Rational& Rational::operator/=(const Rational& o) {
    if (o.sgn() == 0) throw Error("rational division by zero");
    if (!big_ && !o.big_) {
        long long g1 = std::gcd(uabs_(n_), uabs_(o.n_));
        long long g2 = std::gcd(static_cast<unsigned long long>(o.d_),
                                static_cast<unsigned long long>(d_));
        i128 t = static_cast<i128>(n_ / g1) * (o.d_ / g2);
        i128 den = static_cast<i128>(d_ / g2) * (o.n_ / g1);
        if (den < 0) { t = -t; den = -den; }
        if (t > INT64_MIN && t <= INT64_MAX && den <= INT64_MAX) {
            n_ = static_cast<long long>(t);
            d_ = static_cast<long long>(den);
            return *this;
        }
        set_from_i128_(t, den);
        return *this;
    }
    return big_binop_(o, '/');
}

inline Rational Rational::operator-() const {
    if (!big_) {
        Rational r;
        r.n_ = -n_; // invariant keeps n_ > INT64_MIN
        r.d_ = d_;
        return r;
    }
    Rational r;
    r.big_ = std::make_unique<mpq_class>(-*big_);
    return r;
}

inline int Rational::cmp_(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
        i128 l = static_cast<i128>(a.n_) * b.d_;
        i128 r = static_cast<i128>(b.n_) * a.d_;
        return l < r ? -1 : l > r ? 1 : 0;
    }
    mpq_class l = a.to_mpq(), r = b.to_mpq();
    return mpq_cmp(l.get_mpq_t(), r.get_mpq_t());
}

} // namespace discrep
