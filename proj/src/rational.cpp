#include "discrep/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace discrep {

namespace {

void mpz_from_i128(mpz_class& z, __int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
    z = static_cast<unsigned long>(u >> 64);
    z <<= 64;
    z += static_cast<unsigned long>(u);
    if (neg) z = -z;
}

__int128 gcd_i128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool mpq_fits_small(const mpq_class& q, long long& n, long long& d) {
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (!num.fits_slong_p() || !den.fits_slong_p()) return false;
    long ln = num.get_si(), ld = den.get_si();
    if (ln == INT64_MIN) return false; // keep negation safe
    n = ln;
    d = ld;
    return true;
}

} // namespace

Rational::Rational(long long n, long long d) {
    if (d == 0) throw Error("rational with zero denominator");
    set_from_i128_(n, d);
}

void Rational::set_from_i128_(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    if (n == 0) { n_ = 0; d_ = 1; big_.reset(); return; }
    i128 g = gcd_i128(n, d);
    n /= g;
    d /= g;
    if (n > INT64_MIN && n <= INT64_MAX && d <= INT64_MAX) {
        n_ = static_cast<long long>(n);
        d_ = static_cast<long long>(d);
        big_.reset();
        return;
    }
    mpz_class zn, zd;
    mpz_from_i128(zn, n);
    mpz_from_i128(zd, d);
    big_ = std::make_unique<mpq_class>(mpq_class(zn) / mpq_class(zd));
}

void Rational::set_from_mpq_(const mpq_class& q) {
    long long n, d;
    if (mpq_fits_small(q, n, d)) {
        n_ = n;
        d_ = d;
        big_.reset();
    } else {
        big_ = std::make_unique<mpq_class>(q);
    }
}

Rational& Rational::big_binop_(const Rational& o, char op) {
    mpq_class l = to_mpq(), r = o.to_mpq();
    switch (op) {
        case '+': l += r; break;
        case '-': l -= r; break;
        case '*': l *= r; break;
        case '/': l /= r; break;
    }
    set_from_mpq_(l);
    return *this;
}

std::string Rational::str() const {
    if (big_) return big_->get_str();
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

Rational Rational::from_string(std::string_view s) {
    auto bad = [&] { throw Error("not a rational: '" + std::string(s) + "'"); };
    if (s.empty()) bad();
    size_t i = 0;
    if (s[0] == '-') i = 1;
    size_t num_begin = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) i++;
    if (i == num_begin) bad();
    size_t num_end = i, den_begin = 0, den_end = 0;
    if (i < s.size()) {
        if (s[i] != '/') bad();
        den_begin = ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) i++;
        if (i != s.size() || i == den_begin) bad();
        den_end = i;
    }
    // Fast path: short literals fit int64 comfortably.
    if (num_end <= 18 && (den_end == 0 || den_end - den_begin <= 18)) {
        long long n = std::strtoll(std::string(s.substr(0, num_end)).c_str(), nullptr, 10);
        long long d = 1;
        if (den_begin) d = std::strtoll(std::string(s.substr(den_begin, den_end - den_begin)).c_str(), nullptr, 10);
        if (d == 0) throw Error("rational with zero denominator: '" + std::string(s) + "'");
        return Rational(n, d);
    }
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), std::string(s).c_str(), 10) != 0) bad();
    if (q.get_den() == 0) throw Error("rational with zero denominator: '" + std::string(s) + "'");
    q.canonicalize();
    Rational r;
    r.set_from_mpq_(q);
    return r;
}

} // namespace discrep
