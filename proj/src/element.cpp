#include <algorithm>
#include <climits>

#include "padyn/ring.hpp"

namespace padyn {

Elem Ring::zero(int prec) const noexcept {
    Elem z;
    z.prec = std::min(prec, N_);
    z.val = z.prec;
    return z;
}

Elem Ring::normalize(const Coords& raw, int shift, int rel) const noexcept {
    rel = std::min({rel, N_ - shift, N_, e_ * M_});
    if (rel <= 0) return zero(shift + rel);
    const int v = raw_val(raw, rel);
    if (v >= rel) return zero(shift + rel);
    Elem r;
    r.val = shift + v;
    r.prec = shift + rel;
    r.unit = raw_canonical(raw_div_pi_pow(raw, v), rel - v);
    return r;
}

Elem Ring::from_int(std::int64_t n) const noexcept { return normalize(raw_from_int(n), 0, N_); }

Elem Ring::uniformizer() const noexcept { return normalize(pi_pow_[1], 0, N_); }

Coords Ring::to_raw(const Elem& x) const {
    if (x.is_zero()) {
        if (x.prec < 0) throw PrecisionError("to_raw: value not known to be integral");
        return raw_zero();
    }
    if (x.val < 0) throw MathError("to_raw: value is not integral");
    if (x.val >= e_ * M_) return raw_zero();
    return x.val == 0 ? x.unit : raw_mul(x.unit, pi_pow_[static_cast<std::size_t>(x.val)]);
}

Elem Ring::add(const Elem& a, const Elem& b) const noexcept {
    const int P = std::min({a.prec, b.prec, N_});
    const bool ua = !a.is_zero() && a.val < P;
    const bool ub = !b.is_zero() && b.val < P;
    if (!ua && !ub) return zero(P);
    if (!ub) return with_prec(a, P);
    if (!ua) return with_prec(b, P);
    const int s = std::min(a.val, b.val);
    Coords x = a.val == s ? a.unit : raw_mul(a.unit, pi_pow_[static_cast<std::size_t>(a.val - s)]);
    if (b.val == s)
        x = raw_add(x, b.unit);
    else
        raw_fma(x, b.unit, pi_pow_[static_cast<std::size_t>(b.val - s)]);
    return normalize(x, s, P - s);
}

Elem Ring::neg(const Elem& a) const noexcept {
    if (a.is_zero()) return a;
    Elem r = a;
    r.unit = raw_canonical(raw_neg(a.unit), a.prec - a.val);
    return r;
}

Elem Ring::sub(const Elem& a, const Elem& b) const noexcept { return add(a, neg(b)); }

Elem Ring::mul(const Elem& a, const Elem& b) const noexcept {
    // A zero operand contributes its precision as a valuation lower bound.
    const long long va = a.val;
    const long long vb = b.val;
    long long P = std::min<long long>({a.prec + vb, b.prec + va, N_});
    if (a.is_zero() || b.is_zero()) return zero(static_cast<int>(std::clamp<long long>(P, INT_MIN / 4, N_)));
    const long long v = va + vb;
    if (v >= P) return zero(static_cast<int>(P));
    Elem r;
    r.val = static_cast<int>(v);
    r.prec = static_cast<int>(P);
    r.unit = raw_canonical(raw_mul(a.unit, b.unit), r.prec - r.val);
    return r;
}

Elem Ring::shift(const Elem& a, int k) const noexcept {
    if (a.is_zero()) return zero(a.prec + k);
    Elem r = a;
    r.val += k;
    r.prec += k;
    if (r.prec > N_) {
        r.prec = N_;
        if (r.val >= r.prec) return zero(N_);
        r.unit = raw_canonical(r.unit, r.prec - r.val);
    }
    return r;
}

Elem Ring::inv(const Elem& a) const {
    if (a.is_zero()) throw PrecisionError("inverse: value indistinguishable from zero");
    Elem r;
    r.val = -a.val;
    const int rel = a.prec - a.val;
    r.prec = std::min(r.val + rel, N_);
    r.unit = raw_canonical(raw_inv_unit(a.unit), r.prec - r.val);
    return r;
}

Elem Ring::pow(const Elem& a, std::uint64_t n) const noexcept {
    Elem acc = one();
    Elem base = a;
    while (n > 0) {
        if (n & 1) acc = mul(acc, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return acc;
}

Elem Ring::with_prec(const Elem& a, int prec) const noexcept {
    if (a.is_zero()) return zero(prec);
    if (a.val >= prec) return zero(prec);
    Elem r = a;
    r.prec = std::min({prec, N_, a.val + N_});
    if (r.prec < a.prec) r.unit = raw_canonical(a.unit, r.prec - r.val);
    return r;
}

}  // namespace padyn
