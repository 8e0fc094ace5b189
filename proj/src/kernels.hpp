#pragma once

// Coefficient kernels for truncated series. Every kernel is generic over an
// arithmetic policy: RawOps works on integral values as raw coordinates with a
// precision bound, ElemOps on tracked elements of K.

#include <algorithm>
#include <vector>

#include "padyn/ring.hpp"

namespace padyn::detail {

inline constexpr int kExact = 1 << 29;

struct RawVal {
    Coords c{};
    int prec = kExact;
};

struct RawOps {
    using V = RawVal;
    const Ring& R;

    [[nodiscard]] V zero() const noexcept { return {}; }
    [[nodiscard]] bool negligible(const V& a) const noexcept { return a.prec >= R.N() && R.raw_is_zero(a.c); }
    [[nodiscard]] V add(const V& a, const V& b) const noexcept { return {R.raw_add(a.c, b.c), std::min(a.prec, b.prec)}; }
    [[nodiscard]] V sub(const V& a, const V& b) const noexcept { return {R.raw_sub(a.c, b.c), std::min(a.prec, b.prec)}; }
    [[nodiscard]] V neg(const V& a) const noexcept { return {R.raw_neg(a.c), a.prec}; }
    // A zero factor known to prec P makes the product divisible by pi^P.
    [[nodiscard]] static int mul_prec(const V& a, bool za, const V& b, bool zb) noexcept {
        if (za && zb) return std::max(a.prec, b.prec);
        if (za) return a.prec;
        if (zb) return b.prec;
        return std::min(a.prec, b.prec);
    }
    [[nodiscard]] V mul(const V& a, const V& b) const noexcept {
        const bool za = R.raw_is_zero(a.c);
        const bool zb = R.raw_is_zero(b.c);
        V r;
        r.prec = mul_prec(a, za, b, zb);
        if (!za && !zb) r.c = R.raw_mul(a.c, b.c);
        return r;
    }
    void fma(V& acc, const V& a, const V& b) const noexcept {
        const bool za = R.raw_is_zero(a.c);
        const bool zb = R.raw_is_zero(b.c);
        acc.prec = std::min(acc.prec, mul_prec(a, za, b, zb));
        if (!za && !zb) R.raw_fma(acc.c, a.c, b.c);
    }
};

struct ElemOps {
    using V = Elem;
    const Ring& R;

    // Exact zeros mark structural positions only; a zero known to N digits still
    // contributes N + val(other factor) to a product over K.
    [[nodiscard]] V zero() const noexcept { return exact_zero(); }
    [[nodiscard]] static V exact_zero() noexcept { return Elem{kExact, kExact, {}}; }
    [[nodiscard]] V exact_one() const noexcept {
        Elem e = R.one();
        e.prec = kExact;
        return e;
    }
    [[nodiscard]] bool negligible(const V& a) const noexcept { return a.prec >= kExact && a.is_zero(); }
    [[nodiscard]] V add(const V& a, const V& b) const noexcept { return R.add(a, b); }
    [[nodiscard]] V sub(const V& a, const V& b) const noexcept { return R.sub(a, b); }
    [[nodiscard]] V neg(const V& a) const noexcept { return R.neg(a); }
    [[nodiscard]] V mul(const V& a, const V& b) const noexcept { return R.mul(a, b); }
    void fma(V& acc, const V& a, const V& b) const noexcept { acc = R.add(acc, R.mul(a, b)); }
};

std::vector<RawVal> to_raw(const Ring& R, const std::vector<Elem>& v);
std::vector<Elem> from_raw(const Ring& R, const std::vector<RawVal>& v);

/// Index of the first entry that is not negligible (size if none).
template <class Ops>
int lowest(const Ops& ops, const std::vector<typename Ops::V>& a) {
    int i = 0;
    while (i < static_cast<int>(a.size()) && ops.negligible(a[static_cast<std::size_t>(i)])) ++i;
    return i;
}

/// Truncated product of two coefficient vectors of length D+1.
template <class Ops>
std::vector<typename Ops::V> mul1(const Ops& ops, const std::vector<typename Ops::V>& a,
                                  const std::vector<typename Ops::V>& b, int D) {
    std::vector<typename Ops::V> c(static_cast<std::size_t>(D) + 1, ops.zero());
    const int la = lowest(ops, a);
    const int lb = lowest(ops, b);
    for (int i = la; i <= D; ++i) {
        const auto& ai = a[static_cast<std::size_t>(i)];
        if (ops.negligible(ai)) continue;
        for (int j = lb; i + j <= D; ++j) {
            const auto& bj = b[static_cast<std::size_t>(j)];
            if (ops.negligible(bj)) continue;
            ops.fma(c[static_cast<std::size_t>(i + j)], ai, bj);
        }
    }
    return c;
}

/// Multiplicative inverse of a series with invertible constant term (ElemOps only).
std::vector<Elem> inv1(const Ring& R, const std::vector<Elem>& a, int D);

/// Compositional inverse h of a series a with a[0] = 0 and invertible a[1]; a[1]^{-1} is passed in.
template <class Ops>
std::vector<typename Ops::V> reverse1(const Ops& ops, const std::vector<typename Ops::V>& a,
                                      const typename Ops::V& inv_a1, int D) {
    using V = typename Ops::V;
    const auto sz = static_cast<std::size_t>(D) + 1;
    std::vector<V> h(sz, ops.zero());
    if (D < 1) return h;
    h[1] = inv_a1;
    // pw[k][m] = coefficient of T^m in h^k, filled as h becomes known.
    std::vector<std::vector<V>> pw(sz, std::vector<V>(sz, ops.zero()));
    pw[1][1] = h[1];
    for (int m = 2; m <= D; ++m) {
        V s = ops.zero();
        for (int k = m; k >= 2; --k) {
            V acc = ops.zero();
            if (k == m) {
                acc = ops.mul(pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)], h[1]);
            } else {
                for (int t = 1; t <= m - k + 1; ++t)
                    ops.fma(acc, h[static_cast<std::size_t>(t)],
                            pw[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - t)]);
            }
            pw[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = acc;
            ops.fma(s, a[static_cast<std::size_t>(k)], acc);
        }
        h[static_cast<std::size_t>(m)] = ops.neg(ops.mul(s, inv_a1));
        pw[1][static_cast<std::size_t>(m)] = h[static_cast<std::size_t>(m)];
    }
    return h;
}

// ---- two variables: triangular storage, block t holds total degree t ----

inline constexpr std::size_t tri_index(int i, int j) noexcept {
    const int t = i + j;
    return static_cast<std::size_t>(t * (t + 1) / 2 + j);
}
inline constexpr std::size_t tri_size(int D) noexcept { return static_cast<std::size_t>((D + 1) * (D + 2) / 2); }

/// Lowest total degree carrying a non-negligible coefficient (D+1 if none).
template <class Ops>
int lowest_block(const Ops& ops, const std::vector<typename Ops::V>& a, int D) {
    for (int t = 0; t <= D; ++t)
        for (int j = 0; j <= t; ++j)
            if (!ops.negligible(a[tri_index(t - j, j)])) return t;
    return D + 1;
}

/// Truncated product of two bivariate series.
template <class Ops>
std::vector<typename Ops::V> mul2(const Ops& ops, const std::vector<typename Ops::V>& a,
                                  const std::vector<typename Ops::V>& b, int D) {
    std::vector<typename Ops::V> c(tri_size(D), ops.zero());
    const int la = lowest_block(ops, a, D);
    const int lb = lowest_block(ops, b, D);
    for (int ta = la; ta + lb <= D; ++ta)
        for (int ja = 0; ja <= ta; ++ja) {
            const auto& av = a[tri_index(ta - ja, ja)];
            if (ops.negligible(av)) continue;
            for (int tb = lb; ta + tb <= D; ++tb) {
                const std::size_t base = tri_index(ta + tb, 0) + static_cast<std::size_t>(ja);
                const std::size_t bb = tri_index(tb, 0);
                for (int jb = 0; jb <= tb; ++jb) {
                    const auto& bv = b[bb + static_cast<std::size_t>(jb)];
                    if (ops.negligible(bv)) continue;
                    ops.fma(c[base + static_cast<std::size_t>(jb)], av, bv);
                }
            }
        }
    return c;
}

}  // namespace padyn::detail
