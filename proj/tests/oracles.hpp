#pragma once

// Independent reference computations over Q with GMP, mapped into a ring at the end.

#include <gmpxx.h>

#include <vector>

#include "padyn/series.hpp"

namespace oracle {

using padyn::Elem;
using padyn::KValue;
using padyn::RingPtr;
using padyn::Series1;
using padyn::Series2;

/// Image of a rational number in K.
inline KValue from_rational(const RingPtr& R, const mpq_class& x) {
    mpz_class num = x.get_num();
    mpz_class den = x.get_den();
    const mpz_class p(static_cast<unsigned long>(R->p()));
    int k = 0;
    while (den % p == 0) {
        den /= p;
        ++k;
    }
    mpz_class m;
    mpz_set_ui(m.get_mpz_t(), 1);
    for (int i = 0; i < R->storage_digits(); ++i) m *= p;
    // m < 2^62, so a reduced value fits an unsigned long on LP64.
    auto to_k = [&](const mpz_class& v) {
        mpz_class r = v % m;
        if (r < 0) r += m;
        return KValue::from_int(R, static_cast<std::int64_t>(r.get_ui()));
    };
    KValue out = to_k(num) / to_k(den);
    const KValue pk = KValue::from_int(R, static_cast<std::int64_t>(R->p()));
    for (int i = 0; i < k; ++i) out = out / pk;
    return out;
}

inline Series1 series_from(const RingPtr& R, int D, const std::vector<mpq_class>& c) {
    Series1 s(R, D);
    for (int i = 0; i <= D && i < static_cast<int>(c.size()); ++i) s.set(i, from_rational(R, c[static_cast<std::size_t>(i)]));
    return s;
}

/// Generalized binomial coefficients C(a, k), k = 0..D.
inline std::vector<mpq_class> binomials(const mpq_class& a, int D) {
    std::vector<mpq_class> c(static_cast<std::size_t>(D) + 1);
    c[0] = 1;
    for (int k = 1; k <= D; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] * (a - (k - 1)) / k;
    return c;
}

/// (1+T)^a - 1.
inline Series1 binomial_minus_one(const RingPtr& R, int D, const mpq_class& a) {
    auto c = binomials(a, D);
    c[0] = 0;
    return series_from(R, D, c);
}

/// log(1+T) = sum (-1)^(k+1) T^k / k.
inline Series1 log1p(const RingPtr& R, int D) {
    std::vector<mpq_class> c(static_cast<std::size_t>(D) + 1);
    for (int k = 1; k <= D; ++k) c[static_cast<std::size_t>(k)] = mpq_class(k % 2 ? 1 : -1, k);
    return series_from(R, D, c);
}

/// exp(T) - 1.
inline Series1 expm1(const RingPtr& R, int D) {
    std::vector<mpq_class> c(static_cast<std::size_t>(D) + 1);
    mpz_class f = 1;
    for (int k = 1; k <= D; ++k) {
        f *= k;
        c[static_cast<std::size_t>(k)] = mpq_class(1) / f;
    }
    return series_from(R, D, c);
}

/// Catalan numbers C_0..C_n.
inline std::vector<mpz_class> catalan(int n) {
    std::vector<mpz_class> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1;
    for (int k = 1; k <= n; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] * 2 * (2 * k - 1) / (k + 1);
    return c;
}

/// Integer polynomial product, truncated at degree D.
inline std::vector<mpz_class> poly_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int D) {
    std::vector<mpz_class> c(static_cast<std::size_t>(D) + 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= D; ++j) c[i + j] += a[i] * b[j];
    return c;
}

/// Integer polynomial composition a(b), truncated at degree D (b(0) = 0).
inline std::vector<mpz_class> poly_compose(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int D) {
    std::vector<mpz_class> r(static_cast<std::size_t>(D) + 1);
    std::vector<mpz_class> pw(static_cast<std::size_t>(D) + 1);
    pw[0] = 1;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (int m = 0; m <= D; ++m) r[static_cast<std::size_t>(m)] += a[k] * pw[static_cast<std::size_t>(m)];
        pw = poly_mul(pw, b, D);
    }
    return r;
}

inline Series1 series_from_z(const RingPtr& R, int D, const std::vector<mpz_class>& c) {
    std::vector<mpq_class> q(c.begin(), c.end());
    return series_from(R, D, q);
}

/// Multiplicative formal group X + Y + XY.
inline Series2 multiplicative_law(const RingPtr& R, int D) {
    Series2 g(R, D);
    g.set(1, 0, R->one());
    g.set(0, 1, R->one());
    if (D >= 2) g.set(1, 1, R->one());
    return g;
}

/// Integer polynomial composition a(b) with coefficients reduced mod m.
inline std::vector<mpz_class> poly_compose_mod(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int D,
                                               const mpz_class& m) {
    std::vector<mpz_class> r(static_cast<std::size_t>(D) + 1);
    std::vector<mpz_class> pw(static_cast<std::size_t>(D) + 1);
    pw[0] = 1;
    for (std::size_t k = 0; k < a.size() && k <= static_cast<std::size_t>(D); ++k) {
        for (int i = 0; i <= D; ++i) r[static_cast<std::size_t>(i)] = (r[static_cast<std::size_t>(i)] + a[k] * pw[static_cast<std::size_t>(i)]) % m;
        pw = poly_mul(pw, b, D);
        for (auto& c : pw) c %= m;
    }
    return r;
}

/// Logarithm of the formal group of an integer series f = pT + ..., f = T^p mod p,
/// as the limit of p^-n f^(n), with n iterations carried modulo p^(N + 2n).
inline std::vector<mpq_class> log_by_iteration(long p, const std::vector<mpz_class>& f, int D, int N, int n) {
    mpz_class m;
    mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N + 2 * n));
    std::vector<mpz_class> it(static_cast<std::size_t>(D) + 1);
    it[1] = 1;
    for (int k = 0; k < n; ++k) it = poly_compose_mod(f, it, D, m);
    mpz_class pn;
    mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
    std::vector<mpq_class> out(static_cast<std::size_t>(D) + 1);
    for (int i = 0; i <= D; ++i) {
        out[static_cast<std::size_t>(i)] = mpq_class(it[static_cast<std::size_t>(i)], pn);
        out[static_cast<std::size_t>(i)].canonicalize();
    }
    return out;
}

}  // namespace oracle
